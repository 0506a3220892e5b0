#pragma once

// Arithmetic expressions over chart variables with exact symbolic
// differentiation. Trees are immutable and shared.

#include <array>
#include <memory>
#include <string>
#include <string_view>

namespace stokes {

enum class Variable { x, y, z, r, theta };
inline constexpr std::size_t variable_count = 5;

std::string_view variable_name(Variable v);

using Bindings = std::array<double, variable_count>;

class Expression {
public:
    enum class Kind { constant, variable, add, sub, mul, div, pow, neg, sin, cos, exp, log, abs, sign };

    struct Node;

    /// Zero constant.
    Expression();

    static Expression constant(double value);
    static Expression variable(Variable v);

    [[nodiscard]] double evaluate(const Bindings& at) const;
    [[nodiscard]] Expression derivative(Variable v) const;

    /// False when an abs/sign argument vanishes at the point (a kink).
    [[nodiscard]] bool smooth_at(const Bindings& at) const;
    [[nodiscard]] bool depends_on(Variable v) const;
    [[nodiscard]] bool is_constant() const;
    [[nodiscard]] Kind kind() const;
    [[nodiscard]] std::string to_string() const;

    friend Expression operator+(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a, const Expression& b);
    friend Expression operator*(const Expression& a, const Expression& b);
    friend Expression operator/(const Expression& a, const Expression& b);
    friend Expression operator-(const Expression& a);
    friend Expression pow(const Expression& base, double exponent);
    friend Expression apply(Kind unary, const Expression& argument);

private:
    explicit Expression(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

/// Precedence, tightest first: ^ (constant exponent), unary minus, * /, + -.
/// Binary operators associate to the left. Identifiers: x y z r theta pi e and
/// the functions sin cos exp log abs neg.
Expression parse_expression(std::string_view text);

inline Expression differentiate(const Expression& e, Variable v) { return e.derivative(v); }

} // namespace stokes
