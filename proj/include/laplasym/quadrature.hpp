#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "laplasym/analysis.hpp"
#include "laplasym/errors.hpp"
#include "laplasym/expr.hpp"
#include "laplasym/jet.hpp"

namespace laplasym {

/// Sample count for the grids behind simpson_error_bound's max|f''''| and
/// the max|h| normalization of the error-model constants.
inline constexpr int kBoundSamplePoints = 1001;

enum class QuadMethod { Simpson, Adaptive };

struct QuadResult {
    double value = 0.0;
    QuadMethod method = QuadMethod::Simpson;
    long long n = 0;            // composite rule: panels
    long long evaluations = 0;  // adaptive rule: integrand evaluations
    double error_bound = std::numeric_limits<double>::quiet_NaN();
    double requested_tol = 0.0;
};

namespace detail {

template <typename Real>
Real integrand(const Problem& p, Real t, Real x) {
    using std::exp;
    return exp(t * eval_as<Real>(p.h, x)) * eval_as<Real>(p.g, x);
}

// Neumaier compensated accumulation.
class CompensatedSum {
public:
    void add(double term) {
        const double t = sum_ + term;
        if (std::abs(sum_) >= std::abs(term))
            comp_ += (sum_ - t) + term;
        else
            comp_ += (term - t) + sum_;
        sum_ = t;
    }
    double get() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace detail

/// Composite Simpson value S_n[f] for f(x) = exp(t*h(x))*g(x):
///   (mesh/3) (f(x_0) + 2 sum f(x_{2i}) + 4 sum f(x_{2i-1}) + f(x_n)),
/// mesh = (b-a)/n, x_i = a + i*mesh. Weighted terms are accumulated in index
/// order with Neumaier compensation so large n does not drown the
/// fourth-order signal in rounding.
inline QuadResult simpson(const Problem& p, double t, long long n) {
    detail::validate_problem(p);
    if (!(t > 0.0)) throw NonPositiveTError("simpson requires t > 0");
    if (n < 2) throw InvalidArgumentError("simpson requires n >= 2");
    if (n % 2 != 0)
        throw OddPanelError("simpson requires an even panel count, got " +
                            std::to_string(n));
    const double mesh = (p.b - p.a) / static_cast<double>(n);
    detail::CompensatedSum acc;
    for (long long i = 0; i <= n; ++i) {
        const double x = p.a + static_cast<double>(i) * mesh;
        const double f = detail::integrand<double>(p, t, x);
        double w = 2.0;
        if (i == 0 || i == n)
            w = 1.0;
        else if (i % 2 == 1)
            w = 4.0;
        acc.add(w * f);
    }
    QuadResult r;
    r.method = QuadMethod::Simpson;
    r.n = n;
    r.value = mesh * acc.get() / 3.0;
    if (!std::isfinite(r.value))
        throw DomainError("composite Simpson value is not finite");
    return r;
}

/// (b-a)^5/(180 n^4) * M4, with M4 the max of |d^4/dx^4 exp(t*h(x))g(x)|
/// over a uniform grid of sample_points, each fourth derivative exact via an
/// order-4 jet of the combined integrand. The sampled max is a
/// high-resolution estimate of the sup, not a verified bound.
inline double simpson_error_bound(const Problem& p, double t, long long n,
                                  int sample_points = kBoundSamplePoints) {
    detail::validate_problem(p);
    if (!(t > 0.0)) throw NonPositiveTError("simpson_error_bound requires t > 0");
    if (n < 2) throw InvalidArgumentError("simpson_error_bound requires n >= 2");
    if (n % 2 != 0)
        throw OddPanelError("simpson_error_bound requires an even panel count");
    if (sample_points < 101)
        throw InvalidArgumentError("sample_points must be >= 101");
    const Expr combined =
        Expr::binary(BinaryOp::Mul,
                     Expr::unary(UnaryOp::Exp,
                                 Expr::binary(BinaryOp::Mul,
                                              Expr::constant(t), p.h)),
                     p.g);
    double m4 = 0.0;
    const std::vector<double> xs =
        detail::uniform_grid(p.a, p.b, sample_points);
    for (double x : xs) {
        const Jet jet = eval_jet(combined, x, 4);
        m4 = std::max(m4, std::abs(24.0 * jet.coeffs[4]));
    }
    const double width = p.b - p.a;
    const double n4 = static_cast<double>(n) * static_cast<double>(n) *
                      static_cast<double>(n) * static_cast<double>(n);
    return std::pow(width, 5) / (180.0 * n4) * m4;
}

template <typename Real>
struct BasicQuadResult {
    Real value{};
    long long evaluations = 0;
    Real requested_tol{};
};

namespace detail {

template <typename Real>
class AdaptiveSimpson {
public:
    AdaptiveSimpson(const Problem& p, Real t, int min_depth, int max_depth)
        : p_(p), t_(t), min_depth_(min_depth), max_depth_(max_depth) {}

    Real integrate(Real a, Real b, Real tol) {
        const Real fa = f(a);
        const Real fb = f(b);
        const Real m = (a + b) / Real(2);
        const Real fm = f(m);
        const Real whole = (b - a) / Real(6) * (fa + Real(4) * fm + fb);
        return recurse(a, b, fa, fm, fb, whole, tol, 0);
    }

    long long evaluations() const { return evaluations_; }

private:
    Real f(Real x) {
        ++evaluations_;
        return integrand<Real>(p_, t_, x);
    }

    Real recurse(Real a, Real b, Real fa, Real fm, Real fb, Real whole,
                 Real tol, int depth) {
        const Real m = (a + b) / Real(2);
        const Real lm = (a + m) / Real(2);
        const Real rm = (m + b) / Real(2);
        const Real flm = f(lm);
        const Real frm = f(rm);
        const Real left = (m - a) / Real(6) * (fa + Real(4) * flm + fm);
        const Real right = (b - m) / Real(6) * (fm + Real(4) * frm + fb);
        const Real s2 = left + right;
        const Real delta = s2 - whole;
        if (depth >= min_depth_) {
            using std::abs;
            if (abs(delta) <= Real(15) * tol) return s2 + delta / Real(15);
            // rounding floor of the local sums: refinement cannot resolve
            // anything further at this scalar's precision
            const Real floor = Real(16) *
                               std::numeric_limits<Real>::epsilon() *
                               (abs(s2) + abs(whole));
            if (abs(delta) <= floor) return s2 + delta / Real(15);
        }
        if (depth >= max_depth_)
            throw DepthExceededError(
                "adaptive quadrature exceeded depth " +
                std::to_string(max_depth_) + "; worst interval [" +
                std::to_string(static_cast<double>(a)) + ", " +
                std::to_string(static_cast<double>(b)) + "]");
        return recurse(a, m, fa, flm, fm, left, tol / Real(2), depth + 1) +
               recurse(m, b, fm, frm, fb, right, tol / Real(2), depth + 1);
    }

    const Problem& p_;
    Real t_;
    int min_depth_;
    int max_depth_;
    long long evaluations_ = 0;
};

}  // namespace detail

/// Recursive interval-halving Simpson with the standard |S_fine-S_coarse|/15
/// acceptance test, tolerance halved per side, Richardson-corrected return
/// value, and a forced minimum depth of 12 so sharply peaked integrands are
/// not accepted off a blind coarse estimate. Depth cap 60.
template <typename Real>
BasicQuadResult<Real> adaptive_quad_as(const Problem& p, Real t, Real tol,
                                       int min_depth = 12, int max_depth = 60) {
    detail::validate_problem(p);
    if (!(t > Real(0)))
        throw NonPositiveTError("adaptive_quad requires t > 0");
    if (!(tol >= Real(1e-13)))
        throw InvalidArgumentError("adaptive_quad requires tol >= 1e-13");
    detail::AdaptiveSimpson<Real> core(p, t, min_depth, max_depth);
    BasicQuadResult<Real> r;
    r.value = core.integrate(Real(p.a), Real(p.b), tol);
    r.evaluations = core.evaluations();
    r.requested_tol = tol;
    if (!std::isfinite(static_cast<double>(r.value)))
        throw DomainError("adaptive quadrature value is not finite");
    return r;
}

/// Ground-truth oracle for I(t). Evaluates and accumulates in long double
/// and rounds the result once at the end.
inline QuadResult adaptive_quad(const Problem& p, double t, double tol) {
    BasicQuadResult<long double> core = adaptive_quad_as<long double>(
        p, static_cast<long double>(t), static_cast<long double>(tol));
    QuadResult r;
    r.method = QuadMethod::Adaptive;
    r.value = static_cast<double>(core.value);
    r.evaluations = core.evaluations;
    r.requested_tol = tol;
    return r;
}

}  // namespace laplasym
