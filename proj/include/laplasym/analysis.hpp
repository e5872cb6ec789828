#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <vector>

#include "laplasym/errors.hpp"
#include "laplasym/expr.hpp"
#include "laplasym/jet.hpp"

namespace laplasym {

struct AnalysisOptions {
    int grid_points = 2049;                  // >= 3 and odd
    std::optional<double> refine_tol;        // default 1e-12 * (b - a)
    std::optional<double> endpoint_tol;      // default 1e-9 * (b - a)
    double deriv_zero_tol = 1e-9;
    int k_max = 16;

    double resolved_refine_tol(double a, double b) const {
        return refine_tol.value_or(1e-12 * (b - a));
    }
    double resolved_endpoint_tol(double a, double b) const {
        return endpoint_tol.value_or(1e-9 * (b - a));
    }
};

/// The integral specification: I(t) = int_a^b exp(t*h(x)) g(x) dx.
struct Problem {
    Expr g;
    Expr h;
    double a = 0.0;
    double b = 1.0;
    AnalysisOptions options;
};

enum class CaseTag { Interior, EndpointFlat, EndpointSlope };
enum class Side { NotEndpoint, Left, Right };

inline const char* to_string(CaseTag c) {
    switch (c) {
        case CaseTag::Interior: return "interior";
        case CaseTag::EndpointFlat: return "endpoint_flat";
        case CaseTag::EndpointSlope: return "endpoint_slope";
    }
    return "?";
}

inline const char* to_string(Side s) {
    switch (s) {
        case Side::NotEndpoint: return "not_endpoint";
        case Side::Left: return "left";
        case Side::Right: return "right";
    }
    return "?";
}

/// Where the maximum sits, how many g-derivatives vanish there, and the
/// derivative values the leading-term formulas consume.
struct Classification {
    double c = 0.0;
    CaseTag case_tag = CaseTag::Interior;
    Side side = Side::NotEndpoint;
    int k = 0;
    double gk = 0.0;  // g^(k)(c)
    double h1 = 0.0;  // h'(c)
    double h2 = 0.0;  // h''(c)
    double h3 = 0.0;  // h'''(c)
    double hc = 0.0;  // h(c)
};

struct LocateResult {
    double c = 0.0;
    bool unique = true;
};

namespace detail {

inline void validate_problem(const Problem& p) {
    if (!p.g.valid() || !p.h.valid())
        throw InvalidArgumentError("problem is missing g or h");
    if (!(p.a < p.b) || !std::isfinite(p.a) || !std::isfinite(p.b))
        throw InvalidArgumentError("problem requires finite a < b");
    const AnalysisOptions& o = p.options;
    if (o.grid_points < 3 || o.grid_points % 2 == 0)
        throw InvalidArgumentError("grid_points must be odd and >= 3");
    if (o.resolved_refine_tol(p.a, p.b) <= 0.0 ||
        o.resolved_endpoint_tol(p.a, p.b) <= 0.0 || o.deriv_zero_tol <= 0.0)
        throw InvalidArgumentError("tolerances must be positive");
    if (o.k_max < 0 || o.k_max > kMaxJetOrder)
        throw InvalidArgumentError("k_max must lie in [0, 32]");
}

inline std::vector<double> uniform_grid(double a, double b, int n_points) {
    std::vector<double> xs(static_cast<std::size_t>(n_points));
    const double step = (b - a) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) xs[static_cast<std::size_t>(i)] = a + i * step;
    xs.back() = b;
    return xs;
}

}  // namespace detail

/// Locate the maximizer of h on [a,b]: coarse grid argmax (lowest index wins
/// on ties), golden-section refinement to refine_tol, then a guarded Newton
/// polish on h' (exact jets) that only runs while the iterates stay inside
/// the grid-cell bracket, so sloped endpoint maxima are left alone.
///
/// Throws NonUniqueMaxError when a second grid sample matches the maximum to
/// 1e-12 of the value scale at a distance of more than 10 grid cells.
inline LocateResult locate_max(const Problem& p) {
    detail::validate_problem(p);
    const int n = p.options.grid_points;
    const std::vector<double> xs = detail::uniform_grid(p.a, p.b, n);
    std::vector<double> hs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) hs[i] = eval(p.h, xs[i]);

    std::size_t imax = 0;
    double scale = 1.0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (hs[i] > hs[imax]) imax = i;
        scale = std::max(scale, std::abs(hs[i]));
    }
    const double value_tol = 1e-12 * scale;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (hs[imax] - hs[i] <= value_tol &&
            (i > imax ? i - imax : imax - i) > 10)
            throw NonUniqueMaxError(
                "non-unique maximum: h attains its maximum value near x = " +
                std::to_string(xs[imax]) + " and x = " + std::to_string(xs[i]));
    }

    double lo = xs[imax > 0 ? imax - 1 : 0];
    double hi = xs[std::min(imax + 1, xs.size() - 1)];
    const double refine_tol = p.options.resolved_refine_tol(p.a, p.b);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = eval(p.h, x1);
    double f2 = eval(p.h, x2);
    for (int iter = 0; iter < 300 && (hi - lo) > refine_tol; ++iter) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = eval(p.h, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = eval(p.h, x1);
        }
    }
    double c = 0.5 * (lo + hi);

    // Newton polish on h'. Value comparisons alone cannot place a quadratic
    // maximum to better than ~sqrt(eps); the polish recovers full precision
    // when a critical point exists inside the bracket.
    const double bracket_lo = xs[imax > 0 ? imax - 1 : 0];
    const double bracket_hi = xs[std::min(imax + 1, xs.size() - 1)];
    try {
        double best = c;
        double best_slope = std::abs(eval_jet(p.h, c, 1).coeffs[1]);
        double cc = c;
        for (int iter = 0; iter < 16; ++iter) {
            Jet j2 = eval_jet(p.h, cc, 2);
            const double d1 = j2.coeffs[1];
            const double d2 = 2.0 * j2.coeffs[2];
            if (d2 == 0.0) break;
            const double cand = cc - d1 / d2;
            if (!(cand >= bracket_lo && cand <= bracket_hi)) break;
            cc = cand;
            const double slope = std::abs(eval_jet(p.h, cc, 1).coeffs[1]);
            if (slope <= best_slope) {
                best_slope = slope;
                best = cc;
            }
            if (slope == 0.0) break;
        }
        c = best;
    } catch (const NonSmoothError&) {
        // h not jet-differentiable (abs): keep the golden-section result
    } catch (const DomainError&) {
        // singular derivative data near c: keep the golden-section result
    }

    c = std::clamp(c, p.a, p.b);
    return LocateResult{c, true};
}

/// Smallest j <= k_max with |g^(j)(c)| above deriv_zero_tol * max(1, max|g|)
/// (max over the analysis grid), plus that derivative value.
inline std::pair<int, double> detect_k(const Problem& p, double c) {
    detail::validate_problem(p);
    if (!(c >= p.a && c <= p.b))
        throw InvalidArgumentError("c must lie in [a, b]");
    const std::vector<double> xs =
        detail::uniform_grid(p.a, p.b, p.options.grid_points);
    double gmax = 0.0;
    for (double x : xs) gmax = std::max(gmax, std::abs(eval(p.g, x)));
    const double threshold = p.options.deriv_zero_tol * std::max(1.0, gmax);

    Jet jet = eval_jet(p.g, c, p.options.k_max);
    double fact = 1.0;
    for (int j = 0; j <= p.options.k_max; ++j) {
        if (j >= 2) fact *= j;
        const double dj = jet.coeffs[static_cast<std::size_t>(j)] * fact;
        if (std::abs(dj) > threshold) return {j, dj};
    }
    throw AllDerivativesVanishError(
        "all derivatives of g at c = " + std::to_string(c) + " up to order " +
        std::to_string(p.options.k_max) +
        " vanish (g may be zero near c, or k exceeds k_max)");
}

/// Full Theorem-hypothesis check: locate the maximizer, snap it to an
/// endpoint within endpoint_tol, detect k, fill the derivative values, and
/// classify into the Interior / EndpointFlat / EndpointSlope case.
inline Classification classify(const Problem& p) {
    LocateResult loc = locate_max(p);
    double c = loc.c;
    const double endpoint_tol = p.options.resolved_endpoint_tol(p.a, p.b);
    if (std::abs(c - p.a) <= endpoint_tol)
        c = p.a;
    else if (std::abs(p.b - c) <= endpoint_tol)
        c = p.b;

    Jet hjet = eval_jet(p.h, c, 3);
    Classification cl;
    cl.c = c;
    cl.hc = hjet.coeffs[0];
    cl.h1 = hjet.coeffs[1];
    cl.h2 = 2.0 * hjet.coeffs[2];
    cl.h3 = 6.0 * hjet.coeffs[3];

    auto [k, gk] = detect_k(p, c);
    cl.k = k;
    cl.gk = gk;

    const double dtol = p.options.deriv_zero_tol;
    if (c == p.a || c == p.b) {
        cl.side = (c == p.a) ? Side::Left : Side::Right;
        if (std::abs(cl.h1) <= dtol) {
            cl.case_tag = CaseTag::EndpointFlat;
            if (std::abs(cl.h2) <= dtol)
                throw DegenerateHessianError(
                    "|h''(c)| <= deriv_zero_tol at the flat endpoint maximizer; "
                    "the expansion requires h''(c) != 0");
            if (cl.h2 > 0.0)
                throw DegenerateHessianError(
                    "h''(c) > 0 at a flat endpoint contradicts the maximum "
                    "hypothesis");
        } else {
            cl.case_tag = CaseTag::EndpointSlope;
            if ((cl.side == Side::Left && cl.h1 > 0.0) ||
                (cl.side == Side::Right && cl.h1 < 0.0))
                throw HypothesisError(
                    "slope sign at the endpoint maximizer is inconsistent "
                    "with a maximum there");
        }
    } else {
        cl.case_tag = CaseTag::Interior;
        cl.side = Side::NotEndpoint;
        if (std::abs(cl.h1) > dtol)
            throw HypothesisError(
                "interior maximizer with |h'(c)| above tolerance; no critical "
                "point was found");
        if (std::abs(cl.h2) <= dtol)
            throw DegenerateHessianError(
                "|h''(c)| <= deriv_zero_tol at the interior maximizer; the "
                "expansion requires h''(c) != 0");
        if (cl.h2 > 0.0)
            throw DegenerateHessianError(
                "h''(c) > 0 at an interior maximizer contradicts the maximum "
                "hypothesis");
        if (cl.k % 2 != 0)
            throw OddInteriorOrderError(
                "odd vanishing order k = " + std::to_string(cl.k) +
                " at an interior maximum: the leading even term vanishes and "
                "the next-order expansion term would be required");
    }
    return cl;
}

}  // namespace laplasym
