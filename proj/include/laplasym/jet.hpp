#pragma once

#include <cmath>
#include <vector>

#include "laplasym/errors.hpp"
#include "laplasym/expr.hpp"

namespace laplasym {

inline constexpr int kMaxJetOrder = 32;

/// Truncated Taylor data of an expression at a point: coeffs[j] = f^(j)(x0)/j!.
/// Coefficients are stored normalized (divided by j!) so that orders up to 32
/// stay in range; derivative() rescales on exit.
template <typename Real>
struct BasicJet {
    Real base{};
    std::vector<Real> coeffs;

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

using Jet = BasicJet<double>;

namespace detail {

template <typename Real>
using Coeffs = std::vector<Real>;

template <typename Real>
Coeffs<Real> jconst(Real v, int m) {
    Coeffs<Real> c(m + 1, Real(0));
    c[0] = v;
    return c;
}

template <typename Real>
Coeffs<Real> jvariable(Real x0, int m) {
    Coeffs<Real> c(m + 1, Real(0));
    c[0] = x0;
    if (m >= 1) c[1] = Real(1);
    return c;
}

template <typename Real>
Coeffs<Real> jadd(const Coeffs<Real>& u, const Coeffs<Real>& v) {
    Coeffs<Real> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] + v[i];
    return w;
}

template <typename Real>
Coeffs<Real> jsub(const Coeffs<Real>& u, const Coeffs<Real>& v) {
    Coeffs<Real> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] - v[i];
    return w;
}

template <typename Real>
Coeffs<Real> jneg(const Coeffs<Real>& u) {
    Coeffs<Real> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = -u[i];
    return w;
}

template <typename Real>
Coeffs<Real> jmul(const Coeffs<Real>& u, const Coeffs<Real>& v) {
    const int m = static_cast<int>(u.size()) - 1;
    Coeffs<Real> w(m + 1, Real(0));
    for (int n = 0; n <= m; ++n)
        for (int j = 0; j <= n; ++j) w[n] += u[j] * v[n - j];
    return w;
}

template <typename Real>
Coeffs<Real> jdiv(const Coeffs<Real>& u, const Coeffs<Real>& v,
                  std::size_t pos) {
    if (v[0] == Real(0)) throw DomainError("division by zero", pos);
    const int m = static_cast<int>(u.size()) - 1;
    Coeffs<Real> w(m + 1, Real(0));
    for (int n = 0; n <= m; ++n) {
        Real s = u[n];
        for (int j = 0; j < n; ++j) s -= w[j] * v[n - j];
        w[n] = s / v[0];
    }
    return w;
}

template <typename Real>
Coeffs<Real> jexp(const Coeffs<Real>& u) {
    using std::exp;
    const int m = static_cast<int>(u.size()) - 1;
    Coeffs<Real> w(m + 1, Real(0));
    w[0] = exp(u[0]);
    for (int n = 1; n <= m; ++n) {
        Real s(0);
        for (int j = 1; j <= n; ++j) s += Real(j) * u[j] * w[n - j];
        w[n] = s / Real(n);
    }
    return w;
}

template <typename Real>
Coeffs<Real> jlog(const Coeffs<Real>& u, std::size_t pos) {
    using std::log;
    if (!(u[0] > Real(0)))
        throw DomainError("log of a nonpositive argument", pos);
    const int m = static_cast<int>(u.size()) - 1;
    Coeffs<Real> w(m + 1, Real(0));
    w[0] = log(u[0]);
    for (int n = 1; n <= m; ++n) {
        Real s = Real(n) * u[n];
        for (int j = 1; j < n; ++j) s -= Real(j) * w[j] * u[n - j];
        w[n] = s / (Real(n) * u[0]);
    }
    return w;
}

template <typename Real>
Coeffs<Real> jsqrt(const Coeffs<Real>& u, std::size_t pos) {
    using std::sqrt;
    if (!(u[0] > Real(0)))
        throw DomainError("sqrt is singular at a nonpositive expansion point",
                          pos);
    const int m = static_cast<int>(u.size()) - 1;
    Coeffs<Real> w(m + 1, Real(0));
    w[0] = sqrt(u[0]);
    for (int n = 1; n <= m; ++n) {
        Real s = u[n];
        for (int j = 1; j < n; ++j) s -= w[j] * w[n - j];
        w[n] = s / (Real(2) * w[0]);
    }
    return w;
}

// sin and cos propagate as a pair: s' = c u', c' = -s u'.
template <typename Real>
void jsincos(const Coeffs<Real>& u, Coeffs<Real>& s, Coeffs<Real>& c) {
    using std::cos;
    using std::sin;
    const int m = static_cast<int>(u.size()) - 1;
    s.assign(m + 1, Real(0));
    c.assign(m + 1, Real(0));
    s[0] = sin(u[0]);
    c[0] = cos(u[0]);
    for (int n = 1; n <= m; ++n) {
        Real as(0), ac(0);
        for (int j = 1; j <= n; ++j) {
            as += Real(j) * u[j] * c[n - j];
            ac += Real(j) * u[j] * s[n - j];
        }
        s[n] = as / Real(n);
        c[n] = -ac / Real(n);
    }
}

// w = tanh(u): w' = (1 - w^2) u'; q tracks w^2 incrementally.
template <typename Real>
Coeffs<Real> jtanh(const Coeffs<Real>& u) {
    using std::tanh;
    const int m = static_cast<int>(u.size()) - 1;
    Coeffs<Real> w(m + 1, Real(0)), q(m + 1, Real(0));
    w[0] = tanh(u[0]);
    q[0] = w[0] * w[0];
    for (int n = 1; n <= m; ++n) {
        Real s(0);
        for (int j = 1; j <= n; ++j) {
            Real one_minus_q = (n - j == 0 ? Real(1) : Real(0)) - q[n - j];
            s += Real(j) * u[j] * one_minus_q;
        }
        w[n] = s / Real(n);
        Real qn(0);
        for (int i = 0; i <= n; ++i) qn += w[i] * w[n - i];
        q[n] = qn;
    }
    return w;
}

template <typename Real>
Coeffs<Real> jipow(const Coeffs<Real>& u, long long e, std::size_t pos) {
    const int m = static_cast<int>(u.size()) - 1;
    if (e < 0) return jdiv(jconst(Real(1), m), jipow(u, -e, pos), pos);
    Coeffs<Real> result = jconst(Real(1), m);
    Coeffs<Real> acc = u;
    while (e > 0) {
        if (e & 1) result = jmul(result, acc);
        acc = jmul(acc, acc);
        e >>= 1;
    }
    return result;
}

template <typename Real>
Coeffs<Real> jet_node(const Node& n, Real x0, int m) {
    switch (n.kind) {
        case Node::Kind::Constant:
            return jconst(Real(n.value), m);
        case Node::Kind::Variable:
            return jvariable(x0, m);
        case Node::Kind::Unary: {
            if (n.uop == UnaryOp::Abs)
                throw NonSmoothError(
                    "abs is not differentiable; jets reject it");
            Coeffs<Real> u = jet_node<Real>(*n.a, x0, m);
            switch (n.uop) {
                case UnaryOp::Neg: return jneg(u);
                case UnaryOp::Exp: return jexp(u);
                case UnaryOp::Log: return jlog(u, n.pos);
                case UnaryOp::Sqrt: return jsqrt(u, n.pos);
                case UnaryOp::Tanh: return jtanh(u);
                case UnaryOp::Sin: {
                    Coeffs<Real> s, c;
                    jsincos(u, s, c);
                    return s;
                }
                case UnaryOp::Cos: {
                    Coeffs<Real> s, c;
                    jsincos(u, s, c);
                    return c;
                }
                case UnaryOp::Abs: break;
            }
            break;
        }
        case Node::Kind::Binary: {
            Coeffs<Real> u = jet_node<Real>(*n.a, x0, m);
            if (n.bop == BinaryOp::Pow && n.has_int_exponent)
                return jipow(u, n.int_exponent, n.pos);
            Coeffs<Real> v = jet_node<Real>(*n.b, x0, m);
            switch (n.bop) {
                case BinaryOp::Add: return jadd(u, v);
                case BinaryOp::Sub: return jsub(u, v);
                case BinaryOp::Mul: return jmul(u, v);
                case BinaryOp::Div: return jdiv(u, v, n.pos);
                case BinaryOp::Pow:
                    // general power: u^v = exp(v log u), u(x0) > 0 required
                    return jexp(jmul(v, jlog(u, n.pos)));
            }
            break;
        }
    }
    throw DomainError("malformed expression tree");
}

}  // namespace detail

/// Taylor coefficients of e at x0 through the requested order, at an
/// arbitrary scalar type.
template <typename Real>
BasicJet<Real> eval_jet_as(const Expr& e, Real x0, int order) {
    if (order < 0) throw InvalidArgumentError("jet order must be nonnegative");
    if (order > kMaxJetOrder)
        throw OrderLimitError("jet order " + std::to_string(order) +
                              " exceeds the cap of " +
                              std::to_string(kMaxJetOrder));
    BasicJet<Real> jet;
    jet.base = x0;
    jet.coeffs = detail::jet_node<Real>(e.node(), x0, order);
    for (const Real& c : jet.coeffs)
        if (!std::isfinite(c)) throw DomainError("non-finite Taylor coefficient");
    return jet;
}

inline Jet eval_jet(const Expr& e, double x0, int order) {
    return eval_jet_as<double>(e, x0, order);
}

/// j-th derivative of e at x0 (exact up to rounding): j! * coeffs[j].
inline double derivative(const Expr& e, double x0, int j) {
    Jet jet = eval_jet(e, x0, j);
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    return jet.coeffs[static_cast<std::size_t>(j)] * fact;
}

}  // namespace laplasym
