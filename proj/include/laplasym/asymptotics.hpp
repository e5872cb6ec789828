#pragma once

#include <cmath>

#include "laplasym/analysis.hpp"
#include "laplasym/errors.hpp"

namespace laplasym {

/// m!! with the empty-product conventions (-1)!! = 0!! = 1.
/// Exact in 64 bits up to m = 33.
inline long long double_factorial(int m) {
    if (m < -1)
        throw InvalidArgumentError("double factorial requires m >= -1");
    if (m > 33)
        throw InvalidArgumentError(
            "double factorial overflows 64 bits for m > 33");
    long long r = 1;
    for (long long i = m; i >= 2; i -= 2) r *= i;
    return r;
}

namespace detail {

inline long double factorial_l(int n) {
    long double r = 1.0L;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// log(m!!) for m >= -1, via lgamma so large m stays in range.
inline long double log_double_factorial(int m) {
    if (m <= 0) return 0.0L;
    if (m % 2 == 0) {
        const long double half = m / 2;
        return half * std::log(2.0L) + std::lgamma(half + 1.0L);
    }
    const long double half = (m + 1) / 2;
    return std::lgamma(static_cast<long double>(m) + 2.0L) -
           half * std::log(2.0L) - std::lgamma(half + 1.0L);
}

inline constexpr long double kPiL = 3.14159265358979323846264338327950288L;

}  // namespace detail

/// The endpoint-side/parity constant of the flat-endpoint case:
///   even k:          sqrt(pi/2^k) (k-1)!!/k!
///   odd k, left end: ((k-1)/2)!/k!
///   odd k, right end: -((k-1)/2)!/k!
inline double gamma_const(int k, Side side) {
    if (k < 0) throw InvalidArgumentError("gamma_const requires k >= 0");
    if (side != Side::Left && side != Side::Right)
        throw InvalidArgumentError("gamma_const requires an endpoint side");
    if (k <= 20) {
        if (k % 2 == 0) {
            const long double v = std::sqrt(detail::kPiL / std::exp2(static_cast<long double>(k))) *
                                  static_cast<long double>(double_factorial(k - 1)) /
                                  detail::factorial_l(k);
            return static_cast<double>(v);
        }
        const long double v =
            detail::factorial_l((k - 1) / 2) / detail::factorial_l(k);
        return static_cast<double>(side == Side::Left ? v : -v);
    }
    if (k % 2 == 0) {
        const long double logv = 0.5L * (std::log(detail::kPiL) -
                                         k * std::log(2.0L)) +
                                 detail::log_double_factorial(k - 1) -
                                 std::lgamma(static_cast<long double>(k) + 1.0L);
        return static_cast<double>(std::exp(logv));
    }
    const long double logv =
        std::lgamma(static_cast<long double>((k - 1) / 2) + 1.0L) -
        std::lgamma(static_cast<long double>(k) + 1.0L);
    const long double v = std::exp(logv);
    return static_cast<double>(side == Side::Left ? v : -v);
}

/// -1 at the left endpoint, +1 at the right.
inline int eta(Side side) {
    if (side == Side::Left) return -1;
    if (side == Side::Right) return 1;
    throw InvalidArgumentError("eta requires an endpoint side");
}

/// Leading-term data: I(t) ~ exp(t*hc) * amplitude * t^power, with the
/// residual after factoring exp(t*hc) of order t^remainder_exponent.
struct AsymptoticApproximation {
    double amplitude = 0.0;
    double power = 0.0;
    double hc = 0.0;
    double remainder_exponent = 0.0;
    CaseTag case_tag = CaseTag::Interior;
    int k = 0;
};

/// Leading coefficient and exponents for a classified problem.
///
/// Amplitudes are evaluated directly (long double) for k < 8 and in
/// log-space with a separately tracked sign for k >= 8, where |h''(c)|^(k+1)
/// and the factorials would otherwise run out of range.
inline AsymptoticApproximation leading_term(const Classification& cl) {
    if (cl.gk == 0.0)
        throw InvalidArgumentError("g^(k)(c) must be nonzero");
    AsymptoticApproximation ap;
    ap.hc = cl.hc;
    ap.case_tag = cl.case_tag;
    ap.k = cl.k;

    const int k = cl.k;
    const long double gk = cl.gk;
    const long double sign_gk = gk < 0 ? -1.0L : 1.0L;

    switch (cl.case_tag) {
        case CaseTag::Interior: {
            if (cl.h2 == 0.0 || cl.h2 > 0.0)
                throw DegenerateHessianError(
                    "interior leading term requires h''(c) < 0");
            if (k % 2 != 0)
                throw OddInteriorOrderError(
                    "interior leading term requires even k");
            ap.power = -0.5 - 0.5 * k;
            ap.remainder_exponent = -1.0 - 0.5 * k;
            const long double ah2 = std::abs(static_cast<long double>(cl.h2));
            if (k < 8) {
                const long double v =
                    gk *
                    std::sqrt(2.0L * detail::kPiL / std::pow(ah2, k + 1)) *
                    static_cast<long double>(double_factorial(k - 1)) /
                    detail::factorial_l(k);
                ap.amplitude = static_cast<double>(v);
            } else {
                const long double logv =
                    std::log(std::abs(gk)) +
                    0.5L * (std::log(2.0L * detail::kPiL) -
                            (k + 1) * std::log(ah2)) +
                    detail::log_double_factorial(k - 1) -
                    std::lgamma(static_cast<long double>(k) + 1.0L);
                ap.amplitude = static_cast<double>(sign_gk * std::exp(logv));
            }
            break;
        }
        case CaseTag::EndpointFlat: {
            if (cl.h2 == 0.0 || cl.h2 > 0.0)
                throw DegenerateHessianError(
                    "flat-endpoint leading term requires h''(c) < 0");
            ap.power = -0.5 - 0.5 * k;
            ap.remainder_exponent = -1.0 - 0.5 * k;
            const long double ah2 = std::abs(static_cast<long double>(cl.h2));
            const long double gam = gamma_const(k, cl.side);
            if (k < 8) {
                const long double v =
                    gk *
                    std::sqrt(std::exp2(static_cast<long double>(k - 1)) /
                              std::pow(ah2, k + 1)) *
                    gam;
                ap.amplitude = static_cast<double>(v);
            } else {
                const long double logv =
                    std::log(std::abs(gk)) +
                    0.5L * ((k - 1) * std::log(2.0L) -
                            (k + 1) * std::log(ah2)) +
                    std::log(std::abs(gam));
                const long double sign = sign_gk * (gam < 0 ? -1.0L : 1.0L);
                ap.amplitude = static_cast<double>(sign * std::exp(logv));
            }
            break;
        }
        case CaseTag::EndpointSlope: {
            if (cl.h1 == 0.0)
                throw InvalidArgumentError(
                    "sloped-endpoint leading term requires h'(c) != 0");
            ap.power = -1.0 - k;
            ap.remainder_exponent = -2.0 - k;
            const long double et = eta(cl.side);
            const long double parity = (k % 2 == 0) ? 1.0L : -1.0L;
            const long double h1 = cl.h1;
            if (k < 8) {
                const long double v =
                    gk * std::pow(h1, static_cast<long double>(-1 - k)) *
                    parity * et;
                ap.amplitude = static_cast<double>(v);
            } else {
                const long double logv = std::log(std::abs(gk)) -
                                         (k + 1) * std::log(std::abs(h1));
                long double sign = sign_gk * parity * et;
                if (h1 < 0 && (k + 1) % 2 != 0) sign = -sign;
                ap.amplitude = static_cast<double>(sign * std::exp(logv));
            }
            break;
        }
    }
    if (!std::isfinite(ap.amplitude) || ap.amplitude == 0.0)
        throw InvalidArgumentError(
            "leading-term amplitude is zero or non-finite");
    return ap;
}

/// evaluate_approx result; underflow marks t*hc < -700, where exp(t*hc)
/// underflows IEEE doubles and 0 is returned.
struct ApproxValue {
    double value = 0.0;
    bool underflow = false;
};

template <typename Real>
struct BasicApproxValue {
    Real value{};
    bool underflow = false;
};

/// exp(t*hc) * amplitude * t^power at an arbitrary scalar type. The exponent
/// is assembled in log form so huge |t*hc| does not overflow intermediates.
template <typename Real>
BasicApproxValue<Real> evaluate_approx_as(const AsymptoticApproximation& ap,
                                          Real t) {
    using std::exp;
    using std::log;
    if (!(t > Real(0)))
        throw NonPositiveTError("evaluate_approx requires t > 0");
    BasicApproxValue<Real> out;
    if (static_cast<double>(t) * ap.hc < -700.0) {
        out.value = Real(0);
        out.underflow = true;
        return out;
    }
    out.value =
        Real(ap.amplitude) * exp(t * Real(ap.hc) + Real(ap.power) * log(t));
    return out;
}

inline ApproxValue evaluate_approx(const AsymptoticApproximation& ap, double t) {
    BasicApproxValue<double> v = evaluate_approx_as<double>(ap, t);
    return ApproxValue{v.value, v.underflow};
}

}  // namespace laplasym
