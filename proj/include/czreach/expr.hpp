#ifndef CZREACH_EXPR_HPP
#define CZREACH_EXPR_HPP

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "czreach/errors.hpp"
#include "czreach/interval.hpp"

namespace czreach {

/// Immutable polynomial AST over { constant, x_i, +, -, *, integer power,
/// unary minus }. Nodes are shared; copying an Expr is cheap.
class Expr {
  public:
    enum class Kind { Constant, Variable, Add, Sub, Mul, Neg, Pow };

    Expr() : Expr(constant(0.0)) {}

    static Expr constant(double v) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Constant;
        n->value = v;
        return Expr(std::move(n));
    }
    static Expr variable(int index) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        n->var = index;
        return Expr(std::move(n));
    }
    static Expr add(Expr a, Expr b) { return fold_binary(Kind::Add, std::move(a), std::move(b)); }
    static Expr sub(Expr a, Expr b) { return fold_binary(Kind::Sub, std::move(a), std::move(b)); }
    static Expr mul(Expr a, Expr b) { return fold_binary(Kind::Mul, std::move(a), std::move(b)); }
    static Expr neg(Expr a) {
        if (a.kind() == Kind::Constant) return constant(-a.value());
        auto n = std::make_shared<Node>();
        n->kind = Kind::Neg;
        n->lhs = a.node_;
        return Expr(std::move(n));
    }
    static Expr pow(Expr base, int exponent) {
        if (exponent < 0) throw SyntaxError("negative exponent", 0);
        if (exponent == 0) return constant(1.0);
        if (exponent == 1) return base;
        if (base.kind() == Kind::Constant) return constant(std::pow(base.value(), exponent));
        auto n = std::make_shared<Node>();
        n->kind = Kind::Pow;
        n->lhs = base.node_;
        n->exponent = exponent;
        return Expr(std::move(n));
    }

    Kind kind() const { return node_->kind; }
    double value() const { return node_->value; }
    int var_index() const { return node_->var; }
    int exponent() const { return node_->exponent; }
    Expr lhs() const { return Expr(node_->lhs); }
    Expr rhs() const { return Expr(node_->rhs); }

    bool is_constant(double v) const { return kind() == Kind::Constant && value() == v; }
    bool is_zero() const { return is_constant(0.0); }

  private:
    struct Node {
        Kind kind = Kind::Constant;
        double value = 0.0;
        int var = 0;
        int exponent = 0;
        std::shared_ptr<const Node> lhs, rhs;
    };

    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Expr fold_binary(Kind k, Expr a, Expr b) {
        // Constant folding plus additive/multiplicative identities only.
        if (a.kind() == Kind::Constant && b.kind() == Kind::Constant) {
            switch (k) {
                case Kind::Add: return constant(a.value() + b.value());
                case Kind::Sub: return constant(a.value() - b.value());
                case Kind::Mul: return constant(a.value() * b.value());
                default: break;
            }
        }
        if (k == Kind::Add) {
            if (a.is_zero()) return b;
            if (b.is_zero()) return a;
        }
        if (k == Kind::Sub && b.is_zero()) return a;
        if (k == Kind::Mul) {
            if (a.is_zero() || b.is_zero()) return constant(0.0);
            if (a.is_constant(1.0)) return b;
            if (b.is_constant(1.0)) return a;
        }
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->lhs = a.node_;
        n->rhs = b.node_;
        return Expr(std::move(n));
    }

    std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

inline double eval_real(const Expr& e, const Eigen::VectorXd& x) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return e.value();
        case Expr::Kind::Variable:
            if (e.var_index() >= x.size()) {
                throw IndexOutOfRange("eval_real: variable index outside the point dimension.");
            }
            return x(e.var_index());
        case Expr::Kind::Add: return eval_real(e.lhs(), x) + eval_real(e.rhs(), x);
        case Expr::Kind::Sub: return eval_real(e.lhs(), x) - eval_real(e.rhs(), x);
        case Expr::Kind::Mul: return eval_real(e.lhs(), x) * eval_real(e.rhs(), x);
        case Expr::Kind::Neg: return -eval_real(e.lhs(), x);
        case Expr::Kind::Pow: {
            const double base = eval_real(e.lhs(), x);
            double out = 1.0;
            for (int k = 0; k < e.exponent(); ++k) out *= base;
            return out;
        }
    }
    throw std::logic_error("eval_real: unreachable");
}

/// Natural interval extension; powers evaluate as repeated multiplication,
/// so the result is sound but not the tightest possible enclosure.
inline Interval eval_interval(const Expr& e, const Box& box) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return Interval::point(e.value());
        case Expr::Kind::Variable:
            if (e.var_index() >= box.dim()) {
                throw IndexOutOfRange("eval_interval: variable index outside the box dimension.");
            }
            return box.coord(e.var_index());
        case Expr::Kind::Add: return eval_interval(e.lhs(), box) + eval_interval(e.rhs(), box);
        case Expr::Kind::Sub: return eval_interval(e.lhs(), box) - eval_interval(e.rhs(), box);
        case Expr::Kind::Mul: return eval_interval(e.lhs(), box) * eval_interval(e.rhs(), box);
        case Expr::Kind::Neg: return -eval_interval(e.lhs(), box);
        case Expr::Kind::Pow: {
            const Interval base = eval_interval(e.lhs(), box);
            Interval out = Interval::point(1.0);
            for (int k = 0; k < e.exponent(); ++k) out = out * base;
            return out;
        }
    }
    throw std::logic_error("eval_interval: unreachable");
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

inline Expr differentiate(const Expr& e, int var_index) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return Expr::constant(0.0);
        case Expr::Kind::Variable:
            return Expr::constant(e.var_index() == var_index ? 1.0 : 0.0);
        case Expr::Kind::Add:
            return Expr::add(differentiate(e.lhs(), var_index), differentiate(e.rhs(), var_index));
        case Expr::Kind::Sub:
            return Expr::sub(differentiate(e.lhs(), var_index), differentiate(e.rhs(), var_index));
        case Expr::Kind::Mul:
            return Expr::add(Expr::mul(differentiate(e.lhs(), var_index), e.rhs()),
                             Expr::mul(e.lhs(), differentiate(e.rhs(), var_index)));
        case Expr::Kind::Neg: return Expr::neg(differentiate(e.lhs(), var_index));
        case Expr::Kind::Pow:
            return Expr::mul(Expr::mul(Expr::constant(e.exponent()),
                                       Expr::pow(e.lhs(), e.exponent() - 1)),
                             differentiate(e.lhs(), var_index));
    }
    throw std::logic_error("differentiate: unreachable");
}

// ---------------------------------------------------------------------------
// Parsing and printing
// ---------------------------------------------------------------------------

namespace detail {

class ExprParser {
  public:
    ExprParser(const std::string& text, int n_vars) : text_(text), n_(n_vars) {}

    Expr parse() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) throw SyntaxError("unexpected trailing input", pos_);
        return e;
    }

  private:
    // sum    := product (('+'|'-') product)*
    // product:= factor ('*' factor)*
    // factor := '-' factor | atom ('^' uint)?
    // atom   := number | 'x' uint | '(' sum ')'
    Expr parse_sum() {
        Expr e = parse_product();
        for (;;) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                e = Expr::add(e, parse_product());
            } else if (peek() == '-') {
                ++pos_;
                e = Expr::sub(e, parse_product());
            } else {
                return e;
            }
        }
    }

    Expr parse_product() {
        Expr e = parse_factor();
        for (;;) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                e = Expr::mul(e, parse_factor());
            } else {
                return e;
            }
        }
    }

    Expr parse_factor() {
        skip_ws();
        if (peek() == '-') {
            ++pos_;
            return Expr::neg(parse_factor());
        }
        Expr base = parse_atom();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            const std::size_t start = pos_;
            int exp = parse_uint();
            if (pos_ == start) throw SyntaxError("expected integer exponent", pos_);
            return Expr::pow(base, exp);
        }
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        const char ch = peek();
        if (ch == '(') {
            ++pos_;
            Expr e = parse_sum();
            skip_ws();
            if (peek() != ')') throw SyntaxError("expected ')'", pos_);
            ++pos_;
            return e;
        }
        if (ch == 'x') {
            const std::size_t at = pos_;
            ++pos_;
            const std::size_t start = pos_;
            const int idx = parse_uint();
            if (pos_ == start) throw SyntaxError("expected variable index after 'x'", pos_);
            if (idx < 1 || idx > n_) {
                throw UnknownVariable("variable x" + std::to_string(idx) +
                                          " outside declared dimension " + std::to_string(n_),
                                      at);
            }
            return Expr::variable(idx - 1);
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            return parse_number();
        }
        throw SyntaxError("expected number, variable, or '('", pos_);
    }

    Expr parse_number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw SyntaxError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return Expr::constant(v);
    }

    int parse_uint() {
        long v = 0;
        std::size_t digits = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1'000'000) throw SyntaxError("integer literal too large", pos_);
            ++pos_;
            ++digits;
        }
        return digits == 0 ? 0 : static_cast<int>(v);
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    const std::string& text_;
    int n_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses the polynomial grammar: numbers, x1..xn, + - * ^, parentheses.
inline Expr parse_expr(const std::string& text, int n_vars) {
    return detail::ExprParser(text, n_vars).parse();
}

inline std::string to_string(const Expr& e) {
    std::ostringstream os;
    os.precision(17);
    switch (e.kind()) {
        case Expr::Kind::Constant: os << e.value(); break;
        case Expr::Kind::Variable: os << "x" << (e.var_index() + 1); break;
        case Expr::Kind::Add: os << "(" << to_string(e.lhs()) << " + " << to_string(e.rhs()) << ")"; break;
        case Expr::Kind::Sub: os << "(" << to_string(e.lhs()) << " - " << to_string(e.rhs()) << ")"; break;
        case Expr::Kind::Mul: os << "(" << to_string(e.lhs()) << " * " << to_string(e.rhs()) << ")"; break;
        case Expr::Kind::Neg: os << "(-" << to_string(e.lhs()) << ")"; break;
        case Expr::Kind::Pow: os << "(" << to_string(e.lhs()) << ")^" << e.exponent(); break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Nonlinear model
// ---------------------------------------------------------------------------

/// x(t+1) = f(x(t)) + B_d u(t) with f given componentwise as expressions.
/// The Jacobian and the half-Hessians (H_ii = f_xixi / 2, H_ij = f_xixj for
/// i < j, zero below the diagonal) are derived symbolically on construction.
struct NonlinearModel {
    int n = 0;
    std::vector<Expr> f;
    Eigen::MatrixXd B_d;
    std::vector<std::vector<Expr>> jacobian;            // [q][i] = d f_q / d x_i
    std::vector<std::vector<std::vector<Expr>>> half_hessian;  // [q][i][j]

    NonlinearModel() = default;
    NonlinearModel(std::vector<Expr> f_, Eigen::MatrixXd B_d_)
        : n(static_cast<int>(f_.size())), f(std::move(f_)), B_d(std::move(B_d_)) {
        if (B_d.rows() != n) throw DimensionMismatch("NonlinearModel: B_d rows != state dimension.");
        jacobian.resize(f.size());
        half_hessian.resize(f.size());
        for (std::size_t q = 0; q < f.size(); ++q) {
            jacobian[q].resize(f.size());
            half_hessian[q].assign(f.size(), std::vector<Expr>(f.size(), Expr::constant(0.0)));
            for (int i = 0; i < n; ++i) jacobian[q][static_cast<std::size_t>(i)] = differentiate(f[q], i);
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j) {
                    Expr d2 = differentiate(jacobian[q][static_cast<std::size_t>(i)], j);
                    if (i == j) d2 = Expr::mul(Expr::constant(0.5), d2);
                    half_hessian[q][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d2;
                }
            }
        }
    }

    static NonlinearModel from_strings(const std::vector<std::string>& exprs,
                                       Eigen::MatrixXd B_d_) {
        std::vector<Expr> fs;
        fs.reserve(exprs.size());
        for (const auto& s : exprs) fs.push_back(parse_expr(s, static_cast<int>(exprs.size())));
        return {std::move(fs), std::move(B_d_)};
    }

    int input_dim() const { return static_cast<int>(B_d.cols()); }

    Eigen::VectorXd eval(const Eigen::VectorXd& x) const {
        Eigen::VectorXd out(n);
        for (int q = 0; q < n; ++q) out(q) = eval_real(f[static_cast<std::size_t>(q)], x);
        return out;
    }

    Eigen::MatrixXd eval_jacobian(const Eigen::VectorXd& x) const {
        Eigen::MatrixXd J(n, n);
        for (int q = 0; q < n; ++q) {
            for (int i = 0; i < n; ++i) {
                J(q, i) = eval_real(jacobian[static_cast<std::size_t>(q)][static_cast<std::size_t>(i)], x);
            }
        }
        return J;
    }

    /// True when every half-Hessian entry folds to the zero constant.
    bool is_affine() const {
        for (const auto& hq : half_hessian) {
            for (const auto& row : hq) {
                for (const auto& entry : row) {
                    if (!entry.is_zero()) return false;
                }
            }
        }
        return true;
    }
};

} // namespace czreach

#endif
