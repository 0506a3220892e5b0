#include "stokes/expression.hpp"

#include "stokes/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>

namespace stokes {

struct Expression::Node {
    Kind kind = Kind::constant;
    double value = 0.0; // constant value, or the exponent of pow
    Variable var = Variable::x;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Kind;

std::optional<double> constant_value(const NodePtr& n)
{
    if (n->kind == Kind::constant) return n->value;
    return std::nullopt;
}

bool is_value(const NodePtr& n, double v)
{
    const auto c = constant_value(n);
    return c && *c == v;
}

double eval(const Expression::Node& n, const Bindings& at)
{
    switch (n.kind) {
    case Kind::constant: return n.value;
    case Kind::variable: return at[static_cast<std::size_t>(n.var)];
    case Kind::add: return eval(*n.lhs, at) + eval(*n.rhs, at);
    case Kind::sub: return eval(*n.lhs, at) - eval(*n.rhs, at);
    case Kind::mul: return eval(*n.lhs, at) * eval(*n.rhs, at);
    case Kind::div: return eval(*n.lhs, at) / eval(*n.rhs, at);
    case Kind::pow: return std::pow(eval(*n.lhs, at), n.value);
    case Kind::neg: return -eval(*n.lhs, at);
    case Kind::sin: return std::sin(eval(*n.lhs, at));
    case Kind::cos: return std::cos(eval(*n.lhs, at));
    case Kind::exp: return std::exp(eval(*n.lhs, at));
    case Kind::log: return std::log(eval(*n.lhs, at));
    case Kind::abs: return std::abs(eval(*n.lhs, at));
    case Kind::sign: {
        const double a = eval(*n.lhs, at);
        return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    }
    }
    return 0.0;
}

bool smooth(const Expression::Node& n, const Bindings& at)
{
    if ((n.kind == Kind::abs || n.kind == Kind::sign) && eval(*n.lhs, at) == 0.0) return false;
    if (n.lhs && !smooth(*n.lhs, at)) return false;
    if (n.rhs && !smooth(*n.rhs, at)) return false;
    return true;
}

bool depends(const Expression::Node& n, Variable v)
{
    if (n.kind == Kind::variable) return n.var == v;
    return (n.lhs && depends(*n.lhs, v)) || (n.rhs && depends(*n.rhs, v));
}

bool has_variables(const Expression::Node& n)
{
    if (n.kind == Kind::variable) return true;
    return (n.lhs && has_variables(*n.lhs)) || (n.rhs && has_variables(*n.rhs));
}

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string_view function_name(Kind k)
{
    switch (k) {
    case Kind::sin: return "sin";
    case Kind::cos: return "cos";
    case Kind::exp: return "exp";
    case Kind::log: return "log";
    case Kind::abs: return "abs";
    case Kind::sign: return "sign";
    default: return "";
    }
}

std::string print(const Expression::Node& n)
{
    switch (n.kind) {
    case Kind::constant: return n.value < 0 ? "(" + format_number(n.value) + ")" : format_number(n.value);
    case Kind::variable: return std::string(variable_name(n.var));
    case Kind::add: return "(" + print(*n.lhs) + " + " + print(*n.rhs) + ")";
    case Kind::sub: return "(" + print(*n.lhs) + " - " + print(*n.rhs) + ")";
    case Kind::mul: return "(" + print(*n.lhs) + " * " + print(*n.rhs) + ")";
    case Kind::div: return "(" + print(*n.lhs) + " / " + print(*n.rhs) + ")";
    case Kind::pow: return "(" + print(*n.lhs) + ")^(" + format_number(n.value) + ")";
    case Kind::neg: return "(-" + print(*n.lhs) + ")";
    default: return std::string(function_name(n.kind)) + "(" + print(*n.lhs) + ")";
    }
}

} // namespace

std::string_view variable_name(Variable v)
{
    switch (v) {
    case Variable::x: return "x";
    case Variable::y: return "y";
    case Variable::z: return "z";
    case Variable::r: return "r";
    case Variable::theta: return "theta";
    }
    return "?";
}

Expression::Expression() : Expression(constant(0.0)) {}

Expression::Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expression Expression::constant(double value)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = value;
    return Expression(std::move(n));
}

Expression Expression::variable(Variable v)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::variable;
    n->var = v;
    return Expression(std::move(n));
}

double Expression::evaluate(const Bindings& at) const { return eval(*node_, at); }
bool Expression::smooth_at(const Bindings& at) const { return smooth(*node_, at); }
bool Expression::depends_on(Variable v) const { return depends(*node_, v); }
bool Expression::is_constant() const { return !has_variables(*node_); }
Expression::Kind Expression::kind() const { return node_->kind; }
std::string Expression::to_string() const { return print(*node_); }

// Constructors below fold constants and drop 0/1 identities so derivative
// trees stay small.

Expression operator+(const Expression& a, const Expression& b)
{
    if (is_value(a.node_, 0.0)) return b;
    if (is_value(b.node_, 0.0)) return a;
    if (a.is_constant() && b.is_constant() && a.kind() == Kind::constant && b.kind() == Kind::constant)
        return Expression::constant(a.node_->value + b.node_->value);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::add;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expression(std::move(n));
}

Expression operator-(const Expression& a, const Expression& b)
{
    if (is_value(b.node_, 0.0)) return a;
    if (is_value(a.node_, 0.0)) return -b;
    if (a.kind() == Kind::constant && b.kind() == Kind::constant)
        return Expression::constant(a.node_->value - b.node_->value);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::sub;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expression(std::move(n));
}

Expression operator*(const Expression& a, const Expression& b)
{
    if (is_value(a.node_, 0.0) || is_value(b.node_, 0.0)) return Expression::constant(0.0);
    if (is_value(a.node_, 1.0)) return b;
    if (is_value(b.node_, 1.0)) return a;
    if (a.kind() == Kind::constant && b.kind() == Kind::constant)
        return Expression::constant(a.node_->value * b.node_->value);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::mul;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expression(std::move(n));
}

Expression operator/(const Expression& a, const Expression& b)
{
    if (is_value(a.node_, 0.0)) return Expression::constant(0.0);
    if (is_value(b.node_, 1.0)) return a;
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::div;
    n->lhs = a.node_;
    n->rhs = b.node_;
    return Expression(std::move(n));
}

Expression operator-(const Expression& a)
{
    if (a.kind() == Kind::constant) return Expression::constant(-a.node_->value);
    if (a.kind() == Kind::neg) return Expression(a.node_->lhs);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::neg;
    n->lhs = a.node_;
    return Expression(std::move(n));
}

Expression pow(const Expression& base, double exponent)
{
    if (exponent == 0.0) return Expression::constant(1.0);
    if (exponent == 1.0) return base;
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::pow;
    n->value = exponent;
    n->lhs = base.node_;
    return Expression(std::move(n));
}

Expression apply(Kind unary, const Expression& argument)
{
    if (unary == Kind::neg) return -argument;
    auto n = std::make_shared<Expression::Node>();
    n->kind = unary;
    n->lhs = argument.node_;
    return Expression(std::move(n));
}

Expression Expression::derivative(Variable v) const
{
    const Node& n = *node_;
    const auto lhs = [&] { return Expression(n.lhs); };
    const auto rhs = [&] { return Expression(n.rhs); };
    switch (n.kind) {
    case Kind::constant: return constant(0.0);
    case Kind::variable: return constant(n.var == v ? 1.0 : 0.0);
    case Kind::add: return lhs().derivative(v) + rhs().derivative(v);
    case Kind::sub: return lhs().derivative(v) - rhs().derivative(v);
    case Kind::mul: return lhs().derivative(v) * rhs() + lhs() * rhs().derivative(v);
    case Kind::div: {
        const auto u = lhs();
        const auto w = rhs();
        return (u.derivative(v) * w - u * w.derivative(v)) / pow(w, 2.0);
    }
    case Kind::pow: return constant(n.value) * pow(lhs(), n.value - 1.0) * lhs().derivative(v);
    case Kind::neg: return -lhs().derivative(v);
    case Kind::sin: return apply(Kind::cos, lhs()) * lhs().derivative(v);
    case Kind::cos: return -(apply(Kind::sin, lhs()) * lhs().derivative(v));
    case Kind::exp: return *this * lhs().derivative(v);
    case Kind::log: return lhs().derivative(v) / lhs();
    case Kind::abs: return apply(Kind::sign, lhs()) * lhs().derivative(v);
    case Kind::sign: return constant(0.0);
    }
    return constant(0.0);
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expression parse()
    {
        skip();
        if (pos_ >= text_.size()) throw ParseError("empty expression", pos_);
        auto e = sum();
        skip();
        if (pos_ < text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expression sum()
    {
        auto e = product();
        for (;;) {
            if (accept('+')) e = e + product();
            else if (accept('-')) e = e - product();
            else return e;
        }
    }

    Expression product()
    {
        auto e = unary();
        for (;;) {
            if (accept('*')) e = e * unary();
            else if (accept('/')) e = e / unary();
            else return e;
        }
    }

    Expression unary()
    {
        if (accept('-')) return -unary();
        return power();
    }

    Expression power()
    {
        auto e = primary();
        while (accept('^')) {
            const std::size_t at = pos_;
            const auto exponent = exponent_term();
            if (!exponent.is_constant()) throw ParseError("exponent must be constant", at);
            e = pow(e, exponent.evaluate(Bindings{}));
        }
        return e;
    }

    Expression exponent_term()
    {
        if (accept('-')) return -exponent_term();
        return primary();
    }

    Expression primary()
    {
        skip();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expression number()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        const std::string token(text_.substr(start, pos_ - start));
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) throw ParseError("malformed number '" + token + "'", start);
        return Expression::constant(v);
    }

    Expression identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        static constexpr std::pair<std::string_view, Kind> functions[] = {
            {"sin", Kind::sin}, {"cos", Kind::cos}, {"exp", Kind::exp},
            {"log", Kind::log}, {"abs", Kind::abs}, {"neg", Kind::neg},
        };
        for (const auto& [fname, kind] : functions) {
            if (name != fname) continue;
            if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
            auto arg = sum();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return apply(kind, arg);
        }
        if (name == "pi") return Expression::constant(std::numbers::pi);
        if (name == "e") return Expression::constant(std::numbers::e);
        for (std::size_t v = 0; v < variable_count; ++v)
            if (name == variable_name(static_cast<Variable>(v))) return Expression::variable(static_cast<Variable>(v));
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

Expression parse_expression(std::string_view text) { return Parser(text).parse(); }

} // namespace stokes
