#pragma once

// =============================================================================
// Scalar expression trees: parse, evaluate, differentiate, print, compile.
// =============================================================================
// Expressions define subsystem vector fields f_i(x, v), Lyapunov functions
// V_i(x), gain functions gamma(r) and time-dependent inputs v(t). Trees are
// immutable after construction and safe to share across threads.
//
// Grammar (conventional infix):
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)*          exponent must fold to a constant
//   atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'
// Precedence: ^ > unary - > * / > + -, all left-associative. Functions:
// sin cos exp ln abs sqrt. Numbers: decimal with optional exponent.
// =============================================================================

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swsys/numeric.hpp"

namespace swsys {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class ExprError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ParseError : public ExprError {
public:
    ParseError(const std::string& what, std::size_t position)
        : ExprError(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

class UnknownVariableError : public ParseError {
public:
    UnknownVariableError(const std::string& name, std::size_t position)
        : ParseError("unknown variable '" + name + "'", position), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class EvalError : public ExprError {
    using ExprError::ExprError;
};

/// ln/sqrt of a negative argument, division by zero, fractional power of a
/// negative base, or a non-finite result.
class DomainError : public EvalError {
    using EvalError::EvalError;
};

class MissingBindingError : public EvalError {
public:
    explicit MissingBindingError(const std::string& name)
        : EvalError("no binding for variable '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

enum class UnaryOp { Neg, Sin, Cos, Exp, Ln, Abs, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div };

namespace detail {

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    enum class Kind { Constant, Variable, Unary, Binary, Pow };
    Kind kind;
    double value = 0.0;  // Constant value, or Pow exponent
    std::string name;    // Variable name
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    NodePtr lhs, rhs;  // Unary/Pow use lhs only
};

inline NodePtr make_constant(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Constant;
    n->value = v;
    return n;
}

inline NodePtr make_variable(std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->name = std::move(name);
    return n;
}

inline NodePtr make_unary(UnaryOp op, NodePtr child) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->uop = op;
    n->lhs = std::move(child);
    return n;
}

inline NodePtr make_binary(BinaryOp op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->bop = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

inline NodePtr make_pow(NodePtr base, double exponent) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Pow;
    n->value = exponent;
    n->lhs = std::move(base);
    return n;
}

inline bool is_const(const NodePtr& n, double v) {
    return n->kind == ExprNode::Kind::Constant && n->value == v;
}

// Folding constructors used by differentiation to keep derivatives compact.
inline NodePtr fold_add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->kind == ExprNode::Kind::Constant && b->kind == ExprNode::Kind::Constant)
        return make_constant(a->value + b->value);
    return make_binary(BinaryOp::Add, std::move(a), std::move(b));
}

inline NodePtr fold_sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (a->kind == ExprNode::Kind::Constant && b->kind == ExprNode::Kind::Constant)
        return make_constant(a->value - b->value);
    if (is_const(a, 0.0)) return make_unary(UnaryOp::Neg, std::move(b));
    return make_binary(BinaryOp::Sub, std::move(a), std::move(b));
}

inline NodePtr fold_mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->kind == ExprNode::Kind::Constant && b->kind == ExprNode::Kind::Constant)
        return make_constant(a->value * b->value);
    return make_binary(BinaryOp::Mul, std::move(a), std::move(b));
}

inline NodePtr fold_div(NodePtr a, NodePtr b) {
    if (is_const(b, 1.0)) return a;
    if (b->kind == ExprNode::Kind::Constant && b->value != 0.0 &&
        a->kind == ExprNode::Kind::Constant)
        return make_constant(a->value / b->value);
    return make_binary(BinaryOp::Div, std::move(a), std::move(b));
}

inline NodePtr fold_pow(NodePtr base, double exponent) {
    if (exponent == 1.0) return base;
    if (exponent == 0.0) return make_constant(1.0);
    return make_pow(std::move(base), exponent);
}

class Parser;

}  // namespace detail

// ---------------------------------------------------------------------------
// Expr value type
// ---------------------------------------------------------------------------

class Expr {
public:
    Expr() = default;

    bool valid() const noexcept { return root_ != nullptr; }

    static Expr constant(double v) { return Expr(detail::make_constant(v)); }
    static Expr variable(std::string name) { return Expr(detail::make_variable(std::move(name))); }

    /// Evaluates at the given bindings. Every free variable must be bound.
    double evaluate(const std::map<std::string, double>& bindings) const {
        require_valid();
        double v = eval_node(root_.get(), bindings);
        if (!std::isfinite(v)) throw DomainError("non-finite result");
        return v;
    }

    std::set<std::string> free_variables() const {
        std::set<std::string> out;
        if (root_) collect_vars(root_.get(), out);
        return out;
    }

    bool is_constant() const { return root_ && free_variables().empty(); }

    double constant_value() const { return evaluate({}); }

    /// Symbolic partial derivative with respect to `var`. Differentiating by
    /// a variable that does not occur yields the zero expression.
    Expr derivative(const std::string& var) const {
        require_valid();
        return Expr(diff_node(root_, var));
    }

    /// Infix text form; parse(to_string()) is evaluation-equivalent.
    std::string to_string() const {
        require_valid();
        return print_node(root_.get());
    }

private:
    friend class CompiledExpr;
    friend class detail::Parser;
    friend Expr parse_expression(std::string_view, const std::set<std::string>*);

    explicit Expr(detail::NodePtr root) : root_(std::move(root)) {}

    void require_valid() const {
        if (!root_) throw ExprError("empty expression");
    }

    static double checked_pow(double base, double exponent) {
        if (base < 0.0 && exponent != std::floor(exponent))
            throw DomainError("fractional power of negative base");
        if (base == 0.0 && exponent < 0.0) throw DomainError("zero base with negative exponent");
        return std::pow(base, exponent);
    }

    static double eval_node(const detail::ExprNode* n, const std::map<std::string, double>& b) {
        using K = detail::ExprNode::Kind;
        switch (n->kind) {
            case K::Constant:
                return n->value;
            case K::Variable: {
                auto it = b.find(n->name);
                if (it == b.end()) throw MissingBindingError(n->name);
                return it->second;
            }
            case K::Unary: {
                double v = eval_node(n->lhs.get(), b);
                switch (n->uop) {
                    case UnaryOp::Neg: return -v;
                    case UnaryOp::Sin: return std::sin(v);
                    case UnaryOp::Cos: return std::cos(v);
                    case UnaryOp::Exp: return std::exp(v);
                    case UnaryOp::Ln:
                        if (v <= 0.0) throw DomainError("ln of non-positive value");
                        return std::log(v);
                    case UnaryOp::Abs: return std::abs(v);
                    case UnaryOp::Sqrt:
                        if (v < 0.0) throw DomainError("sqrt of negative value");
                        return std::sqrt(v);
                }
                throw ExprError("unreachable");
            }
            case K::Binary: {
                double l = eval_node(n->lhs.get(), b);
                double r = eval_node(n->rhs.get(), b);
                switch (n->bop) {
                    case BinaryOp::Add: return l + r;
                    case BinaryOp::Sub: return l - r;
                    case BinaryOp::Mul: return l * r;
                    case BinaryOp::Div:
                        if (r == 0.0) throw DomainError("division by zero");
                        return l / r;
                }
                throw ExprError("unreachable");
            }
            case K::Pow:
                return checked_pow(eval_node(n->lhs.get(), b), n->value);
        }
        throw ExprError("unreachable");
    }

    static void collect_vars(const detail::ExprNode* n, std::set<std::string>& out) {
        using K = detail::ExprNode::Kind;
        if (n->kind == K::Variable) out.insert(n->name);
        if (n->lhs) collect_vars(n->lhs.get(), out);
        if (n->rhs) collect_vars(n->rhs.get(), out);
    }

    static detail::NodePtr diff_node(const detail::NodePtr& n, const std::string& var) {
        using namespace detail;
        using K = ExprNode::Kind;
        switch (n->kind) {
            case K::Constant:
                return make_constant(0.0);
            case K::Variable:
                return make_constant(n->name == var ? 1.0 : 0.0);
            case K::Unary: {
                NodePtr du = diff_node(n->lhs, var);
                const NodePtr& u = n->lhs;
                switch (n->uop) {
                    case UnaryOp::Neg:
                        if (is_const(du, 0.0)) return du;
                        return make_unary(UnaryOp::Neg, std::move(du));
                    case UnaryOp::Sin:
                        return fold_mul(make_unary(UnaryOp::Cos, u), std::move(du));
                    case UnaryOp::Cos:
                        return fold_mul(make_unary(UnaryOp::Neg, make_unary(UnaryOp::Sin, u)),
                                        std::move(du));
                    case UnaryOp::Exp:
                        return fold_mul(make_unary(UnaryOp::Exp, u), std::move(du));
                    case UnaryOp::Ln:
                        return fold_div(std::move(du), u);
                    case UnaryOp::Abs:
                        // d|u| = u/|u| * du, undefined at u = 0
                        return fold_mul(fold_div(u, make_unary(UnaryOp::Abs, u)), std::move(du));
                    case UnaryOp::Sqrt:
                        return fold_div(std::move(du),
                                        fold_mul(make_constant(2.0), make_unary(UnaryOp::Sqrt, u)));
                }
                break;
            }
            case K::Binary: {
                NodePtr dl = diff_node(n->lhs, var);
                NodePtr dr = diff_node(n->rhs, var);
                switch (n->bop) {
                    case BinaryOp::Add: return fold_add(std::move(dl), std::move(dr));
                    case BinaryOp::Sub: return fold_sub(std::move(dl), std::move(dr));
                    case BinaryOp::Mul:
                        return fold_add(fold_mul(std::move(dl), n->rhs),
                                        fold_mul(n->lhs, std::move(dr)));
                    case BinaryOp::Div:
                        return fold_div(fold_sub(fold_mul(std::move(dl), n->rhs),
                                                 fold_mul(n->lhs, std::move(dr))),
                                        fold_pow(n->rhs, 2.0));
                }
                break;
            }
            case K::Pow: {
                // d(u^c) = c * u^(c-1) * du
                NodePtr du = diff_node(n->lhs, var);
                return fold_mul(fold_mul(make_constant(n->value), fold_pow(n->lhs, n->value - 1.0)),
                                std::move(du));
            }
        }
        throw ExprError("unreachable");
    }

    // Precedence for printing: + - (1), * / (2), unary - (3), ^ (4), atom (5).
    static int print_prec(const detail::ExprNode* n) {
        using K = detail::ExprNode::Kind;
        switch (n->kind) {
            case K::Constant: return n->value < 0.0 ? 3 : 5;
            case K::Variable: return 5;
            case K::Unary: return n->uop == UnaryOp::Neg ? 3 : 5;
            case K::Binary:
                return (n->bop == BinaryOp::Add || n->bop == BinaryOp::Sub) ? 1 : 2;
            case K::Pow: return 4;
        }
        return 5;
    }

    static std::string wrap(const detail::ExprNode* n, int minimum) {
        std::string s = print_node(n);
        if (print_prec(n) < minimum) return "(" + s + ")";
        return s;
    }

    static std::string print_node(const detail::ExprNode* n) {
        using K = detail::ExprNode::Kind;
        switch (n->kind) {
            case K::Constant:
                return format_double(n->value);
            case K::Variable:
                return n->name;
            case K::Unary: {
                switch (n->uop) {
                    case UnaryOp::Neg: return "-" + wrap(n->lhs.get(), 3);
                    case UnaryOp::Sin: return "sin(" + print_node(n->lhs.get()) + ")";
                    case UnaryOp::Cos: return "cos(" + print_node(n->lhs.get()) + ")";
                    case UnaryOp::Exp: return "exp(" + print_node(n->lhs.get()) + ")";
                    case UnaryOp::Ln: return "ln(" + print_node(n->lhs.get()) + ")";
                    case UnaryOp::Abs: return "abs(" + print_node(n->lhs.get()) + ")";
                    case UnaryOp::Sqrt: return "sqrt(" + print_node(n->lhs.get()) + ")";
                }
                break;
            }
            case K::Binary: {
                const int p = print_prec(n);
                const char* op = n->bop == BinaryOp::Add ? " + "
                                 : n->bop == BinaryOp::Sub ? " - "
                                 : n->bop == BinaryOp::Mul ? "*"
                                                           : "/";
                // Right operand is parenthesized at equal precedence so the
                // reparsed tree reproduces the original grouping exactly.
                return wrap(n->lhs.get(), p) + op + wrap(n->rhs.get(), p + 1);
            }
            case K::Pow:
                return wrap(n->lhs.get(), 4) + "^" + format_double(n->value);
        }
        throw ExprError("unreachable");
    }

    detail::NodePtr root_;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
    enum class Kind { Number, Name, Op, End } kind;
    double number = 0.0;
    std::string name;
    char op = 0;
    std::size_t position = 0;
};

class Tokenizer {
public:
    explicit Tokenizer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        Token t;
        t.position = pos_;
        if (pos_ >= text_.size()) {
            t.kind = Token::Kind::End;
            return t;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = pos_;
            while (end < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.'))
                ++end;
            if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
                std::size_t exp_end = end + 1;
                if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-'))
                    ++exp_end;
                if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
                    end = exp_end;
                    while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end])))
                        ++end;
                }
            }
            double value = 0;
            if (!parse_double_strict(text_.substr(pos_, end - pos_), value))
                throw ParseError("malformed number", pos_);
            t.kind = Token::Kind::Number;
            t.number = value;
            pos_ = end;
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                          text_[end] == '_'))
                ++end;
            t.kind = Token::Kind::Name;
            t.name = std::string(text_.substr(pos_, end - pos_));
            pos_ = end;
            return t;
        }
        if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' || c == '(' || c == ')') {
            t.kind = Token::Kind::Op;
            t.op = c;
            ++pos_;
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    Parser(std::string_view text, const std::set<std::string>* allowed_vars)
        : tokenizer_(text), allowed_(allowed_vars) {
        advance();
    }

    NodePtr parse() {
        NodePtr e = parse_expr();
        if (current_.kind != Token::Kind::End)
            throw ParseError("unexpected trailing input", current_.position);
        return e;
    }

private:
    static const std::set<std::string>& functions() {
        static const std::set<std::string> fns = {"sin", "cos", "exp", "ln", "abs", "sqrt"};
        return fns;
    }

    void advance() { current_ = tokenizer_.next(); }

    bool accept_op(char c) {
        if (current_.kind == Token::Kind::Op && current_.op == c) {
            advance();
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept_op('+'))
                lhs = make_binary(BinaryOp::Add, std::move(lhs), parse_term());
            else if (accept_op('-'))
                lhs = make_binary(BinaryOp::Sub, std::move(lhs), parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept_op('*'))
                lhs = make_binary(BinaryOp::Mul, std::move(lhs), parse_unary());
            else if (accept_op('/'))
                lhs = make_binary(BinaryOp::Div, std::move(lhs), parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept_op('-')) return make_unary(UnaryOp::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        while (current_.kind == Token::Kind::Op && current_.op == '^') {
            const std::size_t caret_pos = current_.position;
            advance();
            // The exponent operand binds tighter than '^' itself, so chains
            // like a^b^c group left: (a^b)^c.
            NodePtr exponent = parse_exponent_operand();
            base = make_pow(std::move(base), fold_exponent(exponent, caret_pos));
        }
        return base;
    }

    NodePtr parse_exponent_operand() {
        if (accept_op('-')) return make_unary(UnaryOp::Neg, parse_exponent_operand());
        return parse_atom();
    }

    // Exponents are restricted to constants so differentiation stays total.
    static double fold_exponent(const NodePtr& e, std::size_t caret_pos) {
        std::set<std::string> vars;
        Expr::collect_vars(e.get(), vars);
        if (!vars.empty())
            throw ParseError("exponent must be a constant expression", caret_pos);
        try {
            return Expr::eval_node(e.get(), {});
        } catch (const EvalError& err) {
            throw ParseError(std::string("invalid constant exponent: ") + err.what(), caret_pos);
        }
    }

    NodePtr parse_atom() {
        if (current_.kind == Token::Kind::Number) {
            double v = current_.number;
            advance();
            return make_constant(v);
        }
        if (current_.kind == Token::Kind::Name) {
            std::string name = current_.name;
            std::size_t name_pos = current_.position;
            advance();
            if (current_.kind == Token::Kind::Op && current_.op == '(') {
                if (!functions().contains(name))
                    throw ParseError("unknown function '" + name + "'", name_pos);
                advance();
                NodePtr arg = parse_expr();
                if (!accept_op(')')) throw ParseError("expected ')'", current_.position);
                UnaryOp op = name == "sin"   ? UnaryOp::Sin
                             : name == "cos" ? UnaryOp::Cos
                             : name == "exp" ? UnaryOp::Exp
                             : name == "ln"  ? UnaryOp::Ln
                             : name == "abs" ? UnaryOp::Abs
                                             : UnaryOp::Sqrt;
                return make_unary(op, std::move(arg));
            }
            if (allowed_ && !allowed_->contains(name))
                throw UnknownVariableError(name, name_pos);
            return make_variable(std::move(name));
        }
        if (current_.kind == Token::Kind::Op && current_.op == '(') {
            advance();
            NodePtr e = parse_expr();
            if (!accept_op(')')) throw ParseError("expected ')'", current_.position);
            return e;
        }
        if (current_.kind == Token::Kind::End)
            throw ParseError("unexpected end of input", current_.position);
        throw ParseError(std::string("unexpected token '") + current_.op + "'", current_.position);
    }

    Tokenizer tokenizer_;
    Token current_;
    const std::set<std::string>* allowed_;
};

}  // namespace detail

/// Parses `text` into an expression tree. When `allowed_vars` is non-null,
/// every variable must come from that set.
inline Expr parse_expression(std::string_view text, const std::set<std::string>* allowed_vars) {
    if (text.empty()) throw ParseError("empty expression", 0);
    detail::Parser parser(text, allowed_vars);
    return Expr(parser.parse());
}

inline Expr parse_expression(std::string_view text) { return parse_expression(text, nullptr); }

inline Expr parse_expression(std::string_view text, const std::set<std::string>& allowed_vars) {
    return parse_expression(text, &allowed_vars);
}

inline Expr differentiate(const Expr& e, const std::string& var) { return e.derivative(var); }

// ---------------------------------------------------------------------------
// Compiled form
// ---------------------------------------------------------------------------

/// Postfix-compiled expression bound to a fixed variable order. Evaluation is
/// allocation-free and does not throw; domain violations surface as NaN/Inf,
/// which integration loops detect via std::isfinite.
class CompiledExpr {
public:
    CompiledExpr() = default;

    CompiledExpr(const Expr& e, std::span<const std::string> variable_order) {
        e.require_valid();
        std::map<std::string, int> slots;
        for (std::size_t i = 0; i < variable_order.size(); ++i)
            slots[variable_order[i]] = static_cast<int>(i);
        int depth = 0;
        compile(e.root_.get(), slots, depth);
    }

    double operator()(std::span<const double> values) const noexcept {
        double stack[kMaxStack];
        int top = -1;
        for (const Instr& in : program_) {
            switch (in.op) {
                case Op::Const: stack[++top] = in.value; break;
                case Op::Var: stack[++top] = values[static_cast<std::size_t>(in.slot)]; break;
                case Op::Neg: stack[top] = -stack[top]; break;
                case Op::Sin: stack[top] = std::sin(stack[top]); break;
                case Op::Cos: stack[top] = std::cos(stack[top]); break;
                case Op::Exp: stack[top] = std::exp(stack[top]); break;
                case Op::Ln: stack[top] = std::log(stack[top]); break;
                case Op::Abs: stack[top] = std::abs(stack[top]); break;
                case Op::Sqrt: stack[top] = std::sqrt(stack[top]); break;
                case Op::Add: --top; stack[top] += stack[top + 1]; break;
                case Op::Sub: --top; stack[top] -= stack[top + 1]; break;
                case Op::Mul: --top; stack[top] *= stack[top + 1]; break;
                case Op::Div: --top; stack[top] /= stack[top + 1]; break;
                case Op::Pow: stack[top] = std::pow(stack[top], in.value); break;
            }
        }
        return top >= 0 ? stack[top] : 0.0;
    }

    bool valid() const noexcept { return !program_.empty(); }

private:
    static constexpr int kMaxStack = 64;

    enum class Op : std::uint8_t {
        Const, Var, Neg, Sin, Cos, Exp, Ln, Abs, Sqrt, Add, Sub, Mul, Div, Pow
    };
    struct Instr {
        Op op;
        int slot = 0;
        double value = 0.0;
    };

    void compile(const detail::ExprNode* n, const std::map<std::string, int>& slots, int& depth) {
        using K = detail::ExprNode::Kind;
        switch (n->kind) {
            case K::Constant:
                program_.push_back({Op::Const, 0, n->value});
                bump(++depth);
                return;
            case K::Variable: {
                auto it = slots.find(n->name);
                if (it == slots.end())
                    throw EvalError("variable '" + n->name + "' not in compile order");
                program_.push_back({Op::Var, it->second, 0.0});
                bump(++depth);
                return;
            }
            case K::Unary: {
                compile(n->lhs.get(), slots, depth);
                Op op = n->uop == UnaryOp::Neg   ? Op::Neg
                        : n->uop == UnaryOp::Sin ? Op::Sin
                        : n->uop == UnaryOp::Cos ? Op::Cos
                        : n->uop == UnaryOp::Exp ? Op::Exp
                        : n->uop == UnaryOp::Ln  ? Op::Ln
                        : n->uop == UnaryOp::Abs ? Op::Abs
                                                 : Op::Sqrt;
                program_.push_back({op, 0, 0.0});
                return;
            }
            case K::Binary: {
                compile(n->lhs.get(), slots, depth);
                compile(n->rhs.get(), slots, depth);
                Op op = n->bop == BinaryOp::Add   ? Op::Add
                        : n->bop == BinaryOp::Sub ? Op::Sub
                        : n->bop == BinaryOp::Mul ? Op::Mul
                                                  : Op::Div;
                program_.push_back({op, 0, 0.0});
                --depth;
                return;
            }
            case K::Pow:
                compile(n->lhs.get(), slots, depth);
                program_.push_back({Op::Pow, 0, n->value});
                return;
        }
    }

    void bump(int depth) {
        if (depth > kMaxStack) throw EvalError("expression too deep to compile");
    }

    std::vector<Instr> program_;
};

}  // namespace swsys
