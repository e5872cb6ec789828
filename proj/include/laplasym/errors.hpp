#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace laplasym {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument / precondition violation (bad flags, odd n, tol too small, ...).
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

/// Lexing/parsing failure. `position` is a character index into the source text.
class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& message)
        : Error(message + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Evaluation left the mathematical domain (log of nonpositive, sqrt of
/// negative, division by zero, negative base under a non-integer power).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& message, std::size_t position = 0)
        : Error(message), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Jet arithmetic hit an abs() node.
class NonSmoothError : public Error {
public:
    using Error::Error;
};

/// Requested jet order above the supported cap.
class OrderLimitError : public Error {
public:
    using Error::Error;
};

/// Base for violations of the theorem hypotheses detected during analysis.
/// The CLI maps these to exit code 3.
class HypothesisError : public Error {
public:
    using Error::Error;
};

class NonUniqueMaxError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

class DegenerateHessianError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

class OddInteriorOrderError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

class AllDerivativesVanishError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

class OddPanelError : public InvalidArgumentError {
public:
    using InvalidArgumentError::InvalidArgumentError;
};

class NonPositiveTError : public InvalidArgumentError {
public:
    using InvalidArgumentError::InvalidArgumentError;
};

class NonPositiveConstantError : public InvalidArgumentError {
public:
    using InvalidArgumentError::InvalidArgumentError;
};

class DepthExceededError : public Error {
public:
    using Error::Error;
};

class InsufficientPointsError : public Error {
public:
    using Error::Error;
};

}  // namespace laplasym
