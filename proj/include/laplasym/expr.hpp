#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

#include "laplasym/errors.hpp"

namespace laplasym {

enum class UnaryOp { Neg, Sin, Cos, Exp, Log, Sqrt, Tanh, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

namespace detail {
struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Constant, Variable, Unary, Binary };
    Kind kind;
    double value = 0.0;  // Constant
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    NodePtr a, b;
    // Pow only: exponent folded to an integer when the rhs is x-free and
    // integral. Enables any-base integer-power semantics.
    bool has_int_exponent = false;
    long long int_exponent = 0;
    std::size_t pos = 0;  // source offset; 0 for synthesized nodes
};
}  // namespace detail

/// Immutable univariate expression tree in the single variable x.
///
/// Grammar (parse):
///   expression := term (('+'|'-') term)*
///   term       := unary (('*'|'/') unary)*
///   unary      := '-' unary | power
///   power      := atom ('^' unary)?          -- right-associative
///   atom       := number | 'x' | 'pi' | 'e'
///             | func '(' expression ')' | '(' expression ')'
///   func       := sin | cos | exp | log | sqrt | tanh | abs
///
/// '^' binds tighter than unary minus, so "-x^2" is -(x^2). Implicit
/// multiplication is rejected. Numbers are decimal literals with an optional
/// exponent part. pi and e become Constant nodes at parse time.
///
/// Expr values are immutable after construction and safe to share across
/// threads.
class Expr {
public:
    using Kind = detail::Node::Kind;

    Expr() = default;

    static Expr constant(double v) {
        auto n = std::make_shared<detail::Node>();
        n->kind = Kind::Constant;
        n->value = v;
        return Expr(std::move(n));
    }

    static Expr variable() {
        auto n = std::make_shared<detail::Node>();
        n->kind = Kind::Variable;
        return Expr(std::move(n));
    }

    static Expr unary(UnaryOp op, Expr child) {
        auto n = std::make_shared<detail::Node>();
        n->kind = Kind::Unary;
        n->uop = op;
        n->a = std::move(child.node_);
        return Expr(std::move(n));
    }

    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);

    bool valid() const noexcept { return node_ != nullptr; }

    Kind kind() const { return node_->kind; }
    double constant_value() const { return node_->value; }
    UnaryOp unary_op() const { return node_->uop; }
    BinaryOp binary_op() const { return node_->bop; }
    Expr child() const { return Expr(node_->a); }
    Expr lhs() const { return Expr(node_->a); }
    Expr rhs() const { return Expr(node_->b); }

    const detail::Node& node() const { return *node_; }
    const detail::NodePtr& ptr() const { return node_; }

private:
    explicit Expr(detail::NodePtr n) : node_(std::move(n)) {}
    detail::NodePtr node_;

    friend class Parser;
};

namespace detail {

inline bool contains_variable(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Constant: return false;
        case Node::Kind::Variable: return true;
        case Node::Kind::Unary: return contains_variable(*n.a);
        case Node::Kind::Binary:
            return contains_variable(*n.a) || contains_variable(*n.b);
    }
    return false;
}

template <typename Real>
Real ipow(Real base, long long m, std::size_t pos) {
    if (m < 0) {
        if (base == Real(0))
            throw DomainError("zero base with a negative integer exponent", pos);
        return Real(1) / ipow(base, -m, pos);
    }
    Real result(1);
    Real acc = base;
    while (m > 0) {
        if (m & 1) result *= acc;
        acc *= acc;
        m >>= 1;
    }
    return result;
}

template <typename Real>
Real eval_node(const Node& n, Real x) {
    using std::abs;
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;
    using std::tanh;
    switch (n.kind) {
        case Node::Kind::Constant:
            return Real(n.value);
        case Node::Kind::Variable:
            return x;
        case Node::Kind::Unary: {
            Real v = eval_node(*n.a, x);
            switch (n.uop) {
                case UnaryOp::Neg: return -v;
                case UnaryOp::Sin: return sin(v);
                case UnaryOp::Cos: return cos(v);
                case UnaryOp::Exp: return exp(v);
                case UnaryOp::Log:
                    if (!(v > Real(0)))
                        throw DomainError("log of a nonpositive argument", n.pos);
                    return log(v);
                case UnaryOp::Sqrt:
                    if (v < Real(0))
                        throw DomainError("sqrt of a negative argument", n.pos);
                    return sqrt(v);
                case UnaryOp::Tanh: return tanh(v);
                case UnaryOp::Abs: return abs(v);
            }
            break;
        }
        case Node::Kind::Binary: {
            Real l = eval_node(*n.a, x);
            if (n.bop == BinaryOp::Pow && n.has_int_exponent)
                return ipow(l, n.int_exponent, n.pos);
            Real r = eval_node(*n.b, x);
            switch (n.bop) {
                case BinaryOp::Add: return l + r;
                case BinaryOp::Sub: return l - r;
                case BinaryOp::Mul: return l * r;
                case BinaryOp::Div:
                    if (r == Real(0)) throw DomainError("division by zero", n.pos);
                    return l / r;
                case BinaryOp::Pow:
                    // Non-integer exponent: nonnegative-base contract.
                    if (l < Real(0))
                        throw DomainError(
                            "negative base with a non-integer exponent", n.pos);
                    if (l == Real(0) && r <= Real(0))
                        throw DomainError("zero base with a nonpositive exponent",
                                          n.pos);
                    return pow(l, r);
            }
            break;
        }
    }
    throw DomainError("malformed expression tree");
}

}  // namespace detail

inline Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<detail::Node>();
    n->kind = Kind::Binary;
    n->bop = op;
    n->a = std::move(lhs.node_);
    n->b = std::move(rhs.node_);
    if (op == BinaryOp::Pow && !detail::contains_variable(*n->b)) {
        try {
            double v = detail::eval_node<double>(*n->b, 0.0);
            if (std::isfinite(v) && v == std::rint(v) && std::abs(v) < 9.0e15) {
                n->has_int_exponent = true;
                n->int_exponent = static_cast<long long>(v);
            }
        } catch (const DomainError&) {
            // unevaluable exponent: leave it for eval to report
        }
    }
    return Expr(std::move(n));
}

/// IEEE-754 double evaluation of the tree at x.
inline double eval(const Expr& e, double x) {
    return detail::eval_node<double>(e.node(), x);
}

/// Evaluation at an arbitrary scalar type (float, double, long double).
template <typename Real>
Real eval_as(const Expr& e, Real x) {
    return detail::eval_node<Real>(e.node(), x);
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string to_text_node(const Node& n) {
    switch (n.kind) {
        case Node::Kind::Constant:
            return format_double(n.value);
        case Node::Kind::Variable:
            return "x";
        case Node::Kind::Unary: {
            std::string c = to_text_node(*n.a);
            switch (n.uop) {
                case UnaryOp::Neg: return "(-" + c + ")";
                case UnaryOp::Sin: return "sin(" + c + ")";
                case UnaryOp::Cos: return "cos(" + c + ")";
                case UnaryOp::Exp: return "exp(" + c + ")";
                case UnaryOp::Log: return "log(" + c + ")";
                case UnaryOp::Sqrt: return "sqrt(" + c + ")";
                case UnaryOp::Tanh: return "tanh(" + c + ")";
                case UnaryOp::Abs: return "abs(" + c + ")";
            }
            break;
        }
        case Node::Kind::Binary: {
            std::string l = to_text_node(*n.a);
            std::string r = to_text_node(*n.b);
            const char* op = "+";
            switch (n.bop) {
                case BinaryOp::Add: op = "+"; break;
                case BinaryOp::Sub: op = "-"; break;
                case BinaryOp::Mul: op = "*"; break;
                case BinaryOp::Div: op = "/"; break;
                case BinaryOp::Pow: op = "^"; break;
            }
            return "(" + l + " " + op + " " + r + ")";
        }
    }
    return "";
}

}  // namespace detail

/// Fully parenthesized rendering. parse(to_text(e)) is structurally equal to
/// e for every tree the parser can produce (literal constants are
/// nonnegative; a hand-built negative Constant renders as "-c", which parses
/// back as Neg(Constant) -- numerically equal, structurally not).
inline std::string to_text(const Expr& e) {
    return detail::to_text_node(e.node());
}

/// Structural equality: same shape, same operators, bit-equal constants.
/// Source positions are ignored.
inline bool structurally_equal(const Expr& x, const Expr& y) {
    const detail::Node& m = x.node();
    const detail::Node& n = y.node();
    if (m.kind != n.kind) return false;
    switch (m.kind) {
        case Expr::Kind::Constant: return m.value == n.value;
        case Expr::Kind::Variable: return true;
        case Expr::Kind::Unary:
            return m.uop == n.uop && structurally_equal(x.child(), y.child());
        case Expr::Kind::Binary:
            return m.bop == n.bop && structurally_equal(x.lhs(), y.lhs()) &&
                   structurally_equal(x.rhs(), y.rhs());
    }
    return false;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expr parse() {
        skip_ws();
        if (at_end()) throw ParseError(0, "empty expression");
        Expr e = parse_expression();
        skip_ws();
        if (!at_end())
            throw ParseError(pos_, "unexpected trailing input '" +
                                       std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    bool at_end() const { return pos_ >= src_.size(); }
    char peek() const { return at_end() ? '\0' : src_[pos_]; }

    void skip_ws() {
        while (!at_end() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                             src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (!at_end() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_expression() {
        Expr lhs = parse_term();
        for (;;) {
            skip_ws();
            std::size_t p = pos_;
            if (consume('+'))
                lhs = with_pos(Expr::binary(BinaryOp::Add, lhs, parse_term()), p);
            else if (consume('-'))
                lhs = with_pos(Expr::binary(BinaryOp::Sub, lhs, parse_term()), p);
            else
                return lhs;
        }
    }

    Expr parse_term() {
        Expr lhs = parse_unary();
        for (;;) {
            skip_ws();
            std::size_t p = pos_;
            if (consume('*'))
                lhs = with_pos(Expr::binary(BinaryOp::Mul, lhs, parse_unary()), p);
            else if (consume('/'))
                lhs = with_pos(Expr::binary(BinaryOp::Div, lhs, parse_unary()), p);
            else
                return lhs;
        }
    }

    Expr parse_unary() {
        skip_ws();
        std::size_t p = pos_;
        if (consume('-'))
            return with_pos(Expr::unary(UnaryOp::Neg, parse_unary()), p);
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        skip_ws();
        std::size_t p = pos_;
        if (consume('^'))
            return with_pos(Expr::binary(BinaryOp::Pow, base, parse_unary()), p);
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (at_end()) throw ParseError(pos_, "expected expression");
        std::size_t p = pos_;
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = parse_expression();
            if (!consume(')'))
                throw ParseError(pos_, "unbalanced parentheses: expected ')'");
            return inner;
        }
        if (is_digit(c) || c == '.') return parse_number();
        if (is_ident_start(c)) return parse_identifier();
        throw ParseError(p, std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        std::size_t start = pos_;
        while (!at_end() && is_digit(src_[pos_])) ++pos_;
        if (!at_end() && src_[pos_] == '.') {
            ++pos_;
            while (!at_end() && is_digit(src_[pos_])) ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && src_[start] == '.'))
            throw ParseError(start, "malformed number");
        // exponent part only when it is actually well-formed; otherwise the
        // 'e' is an identifier and the parser reports it as trailing input
        if (!at_end() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (!at_end() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (!at_end() && is_digit(src_[pos_])) {
                while (!at_end() && is_digit(src_[pos_])) ++pos_;
            } else {
                pos_ = mark;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_)
            throw ParseError(start, "malformed number");
        return with_pos(Expr::constant(v), start);
    }

    Expr parse_identifier() {
        std::size_t start = pos_;
        while (!at_end() && is_ident_char(src_[pos_])) ++pos_;
        std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") return with_pos(Expr::variable(), start);
        if (name == "pi") return with_pos(Expr::constant(M_PI), start);
        if (name == "e") return with_pos(Expr::constant(M_E), start);
        UnaryOp op;
        if (name == "sin") op = UnaryOp::Sin;
        else if (name == "cos") op = UnaryOp::Cos;
        else if (name == "exp") op = UnaryOp::Exp;
        else if (name == "log") op = UnaryOp::Log;
        else if (name == "sqrt") op = UnaryOp::Sqrt;
        else if (name == "tanh") op = UnaryOp::Tanh;
        else if (name == "abs") op = UnaryOp::Abs;
        else
            throw ParseError(start,
                             "unknown identifier '" + std::string(name) + "'");
        if (!consume('('))
            throw ParseError(pos_, "expected '(' after function name '" +
                                       std::string(name) + "'");
        Expr arg = parse_expression();
        if (!consume(')'))
            throw ParseError(pos_, "unbalanced parentheses: expected ')'");
        return with_pos(Expr::unary(op, arg), start);
    }

    static bool is_digit(char c) { return c >= '0' && c <= '9'; }
    static bool is_ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

    static Expr with_pos(Expr e, std::size_t p) {
        const_cast<detail::Node&>(e.node()).pos = p;
        return e;
    }
};

/// Parse an expression in the single variable x. Throws ParseError.
inline Expr parse(std::string_view source) {
    return Parser(source).parse();
}

}  // namespace laplasym
