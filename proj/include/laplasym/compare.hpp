#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <span>
#include <thread>
#include <vector>

#include "laplasym/analysis.hpp"
#include "laplasym/asymptotics.hpp"
#include "laplasym/errors.hpp"
#include "laplasym/quadrature.hpp"

namespace laplasym {

/// Per-t data collected for the asymptotics-vs-Simpson comparison.
/// simpson_values / simpson_errors are indexed [n_index][t_index].
/// below_noise marks t-points where |residual| < 100 * oracle_tol *
/// |integral| and the residual measures quadrature noise rather than the
/// asymptotic remainder; fits exclude them.
struct SweepResult {
    Classification classification;
    AsymptoticApproximation approx;
    std::vector<double> t_values;
    std::vector<double> integral_values;
    std::vector<double> approx_values;
    std::vector<double> residuals;
    std::vector<double> scaled_residuals;  // |residual| * exp(-t*h(c))
    std::vector<char> below_noise;
    std::vector<long long> n_list;
    std::vector<std::vector<double>> simpson_values;
    std::vector<std::vector<double>> simpson_errors;
    double h_max_abs = 0.0;  // max |h| over the bound sample grid
    double oracle_tol = 0.0;
};

struct FitReport {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double theoretical_exponent = 0.0;
    bool pass = false;
    // set when the residual dives below the noise floor at the top of the t
    // range, i.e. decays faster than any power the sweep can resolve
    bool superpolynomial = false;
};

struct ConstantEstimates {
    double C0 = 0.0;     // residual model, exp(t*max|h|) normalization
    double c0 = 0.0;     // Simpson model
    double C0_hc = 0.0;  // residual model normalized by exp(t*h(c)) instead
};

namespace detail {

inline double max_abs_h(const Problem& p) {
    double hmax = 0.0;
    for (double x : uniform_grid(p.a, p.b, kBoundSamplePoints))
        hmax = std::max(hmax, std::abs(eval(p.h, x)));
    return hmax;
}

inline std::size_t resolve_threads(int threads, std::size_t work_items) {
    if (threads < 1) threads = 1;
    return std::min<std::size_t>(static_cast<std::size_t>(threads), work_items);
}

}  // namespace detail

/// Classify once, then for each t on a geometric grid collect the oracle
/// integral, leading-term value, residual (oracle - approx), scaled residual,
/// and composite-Simpson values/errors for each n. Rows are independent;
/// with threads > 1 they are computed by a worker pool into fixed slots, so
/// the result is identical for any worker count.
inline SweepResult sweep(const Problem& p, double t_min, double t_max,
                         int points, std::span<const long long> n_list,
                         double oracle_tol = 1e-12, int threads = 1) {
    if (!(t_min > 0.0) || !(t_min < t_max))
        throw InvalidArgumentError("sweep requires 0 < t_min < t_max");
    if (points < 5)
        throw InvalidArgumentError("sweep requires at least 5 t-points");
    if (!(oracle_tol >= 1e-13))
        throw InvalidArgumentError("sweep requires oracle_tol >= 1e-13");
    for (long long n : n_list) {
        if (n < 2) throw InvalidArgumentError("sweep n values must be >= 2");
        if (n % 2 != 0)
            throw OddPanelError("sweep n values must be even, got " +
                                std::to_string(n));
    }

    SweepResult s;
    s.classification = classify(p);
    s.approx = leading_term(s.classification);
    s.h_max_abs = detail::max_abs_h(p);
    s.oracle_tol = oracle_tol;
    s.n_list.assign(n_list.begin(), n_list.end());

    const std::size_t m = static_cast<std::size_t>(points);
    s.t_values.resize(m);
    s.integral_values.resize(m);
    s.approx_values.resize(m);
    s.residuals.resize(m);
    s.scaled_residuals.resize(m);
    s.below_noise.assign(m, 0);
    s.simpson_values.assign(n_list.size(), std::vector<double>(m, 0.0));
    s.simpson_errors.assign(n_list.size(), std::vector<double>(m, 0.0));

    const double ratio = t_max / t_min;
    for (std::size_t i = 0; i < m; ++i)
        s.t_values[i] =
            t_min * std::pow(ratio, static_cast<double>(i) /
                                        static_cast<double>(points - 1));
    s.t_values.back() = t_max;

    const double hc = s.classification.hc;
    auto compute_row = [&](std::size_t i) {
        const double t = s.t_values[i];
        const double oracle = adaptive_quad(p, t, oracle_tol).value;
        const double av = evaluate_approx_as<double>(s.approx, t).value;
        const double resid = oracle - av;
        s.integral_values[i] = oracle;
        s.approx_values[i] = av;
        s.residuals[i] = resid;
        s.scaled_residuals[i] =
            resid == 0.0 ? 0.0
                         : std::exp(std::log(std::abs(resid)) - t * hc);
        s.below_noise[i] =
            std::abs(resid) < 100.0 * oracle_tol * std::abs(oracle) ? 1 : 0;
        for (std::size_t ni = 0; ni < s.n_list.size(); ++ni) {
            const double sv = simpson(p, t, s.n_list[ni]).value;
            s.simpson_values[ni][i] = sv;
            s.simpson_errors[ni][i] = std::abs(sv - oracle);
        }
    };

    const std::size_t workers = detail::resolve_threads(threads, m);
    if (workers <= 1) {
        for (std::size_t i = 0; i < m; ++i) compute_row(i);
    } else {
        std::vector<std::exception_ptr> errors(m);
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= m) return;
                try {
                    compute_row(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
        for (const std::exception_ptr& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return s;
}

/// Least-squares slope of log(scaled residual) against log(t) over the
/// usable (non-flagged) points, compared with the theoretical remainder
/// exponent r. pass is two-sided (|slope - r| <= band and r^2 >= 0.98)
/// unless the residual decayed below the noise floor at the top of the
/// sweep, in which case the decay is super-polynomial and the one-sided
/// criterion slope <= r + band applies.
inline FitReport fit_remainder_exponent(const SweepResult& s,
                                        double band = 0.15) {
    const double hc = s.classification.hc;
    std::vector<double> xs, ys;
    double t_max_usable = -1.0;
    for (std::size_t i = 0; i < s.t_values.size(); ++i) {
        if (s.below_noise[i] || s.residuals[i] == 0.0) continue;
        xs.push_back(std::log(s.t_values[i]));
        ys.push_back(std::log(std::abs(s.residuals[i])) - s.t_values[i] * hc);
        t_max_usable = std::max(t_max_usable, s.t_values[i]);
    }
    if (xs.size() < 5)
        throw InsufficientPointsError(
            "remainder fit needs at least 5 usable points, found " +
            std::to_string(xs.size()));

    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    FitReport fit;
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double yhat = fit.slope * xs[i] + fit.intercept;
        ss_res += (ys[i] - yhat) * (ys[i] - yhat);
        ss_tot += (ys[i] - ymean) * (ys[i] - ymean);
    }
    fit.r_squared = ss_tot == 0.0 ? 1.0 : std::max(0.0, 1.0 - ss_res / ss_tot);
    fit.theoretical_exponent = s.approx.remainder_exponent;

    for (std::size_t i = 0; i < s.t_values.size(); ++i)
        if (s.below_noise[i] && s.t_values[i] > t_max_usable)
            fit.superpolynomial = true;

    const double r = fit.theoretical_exponent;
    const bool two_sided = std::abs(fit.slope - r) <= band &&
                           fit.r_squared >= 0.98;
    const bool one_sided = fit.superpolynomial && fit.slope <= r + band;
    fit.pass = two_sided || one_sided;
    return fit;
}

/// Max-based estimators for the error-model constants:
///   C0 = max_t |residual(t)| exp(-t H) t^{-r},  H = max over the grid of |h|
///   c0 = max_{t,n} simpson_error(t,n) n^4 exp(-t H) t^{-4}
/// (inverting the two error displays). C0_hc is the exp(t*h(c))-normalized
/// companion, reported because H-normalized constants can be astronomically
/// small when h(c) is far below max|h|.
inline ConstantEstimates estimate_constants(const SweepResult& s,
                                            [[maybe_unused]] int k, double r) {
    if (s.n_list.empty())
        throw InvalidArgumentError(
            "estimate_constants needs Simpson errors for at least one n");
    const double H = s.h_max_abs;
    const double hc = s.classification.hc;
    ConstantEstimates est;
    std::size_t usable = 0;
    for (std::size_t i = 0; i < s.t_values.size(); ++i) {
        if (s.below_noise[i] || s.residuals[i] == 0.0) continue;
        ++usable;
        const double t = s.t_values[i];
        const double ar = std::abs(s.residuals[i]);
        est.C0 = std::max(est.C0, ar * std::exp(-t * H) * std::pow(t, -r));
        est.C0_hc =
            std::max(est.C0_hc, ar * std::exp(-t * hc) * std::pow(t, -r));
    }
    if (usable == 0)
        throw InsufficientPointsError(
            "estimate_constants found no usable residual points");
    for (std::size_t ni = 0; ni < s.n_list.size(); ++ni) {
        const double n4 = std::pow(static_cast<double>(s.n_list[ni]), 4.0);
        for (std::size_t i = 0; i < s.t_values.size(); ++i) {
            const double t = s.t_values[i];
            est.c0 = std::max(est.c0, s.simpson_errors[ni][i] * n4 *
                                          std::exp(-t * H) * std::pow(t, -4.0));
        }
    }
    return est;
}

/// T = (C0 n^4 / c0)^{1/(5 + k/2)}: beyond this t the residual error model
/// drops below the composite-Simpson error model for mesh number n.
inline double crossover_time(double C0, double c0, long long n, int k) {
    if (!(C0 > 0.0) || !(c0 > 0.0))
        throw NonPositiveConstantError(
            "crossover_time requires positive C0 and c0");
    if (n < 1) throw InvalidArgumentError("crossover_time requires n >= 1");
    const double n4 = std::pow(static_cast<double>(n), 4.0);
    return std::pow(C0 * n4 / c0, 1.0 / (5.0 + 0.5 * k));
}

}  // namespace laplasym
