#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ensheat {

/// Parse failure; `column()` is 1-based within the expression text.
class ExpressionError : public std::invalid_argument {
public:
    ExpressionError(const std::string& what, std::size_t column)
        : std::invalid_argument("column " + std::to_string(column) + ": " + what), column_(column)
    {
    }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// Arithmetic expression in x, y, t.
///
///   numbers, pi, + - * / ^ (right-associative), parentheses
///   exp log sin cos tan tanh sqrt sqr abs heaviside   (one argument)
///   min max                                          (two arguments)
///   gate(a, b)   1 for a <= t <= b, else 0
///
/// heaviside(s) is 1 for s > 0 and 0 otherwise.
class Expression {
public:
    Expression() = default;
    static Expression parse(std::string_view text);

    double operator()(double x, double y, double t) const;

    const std::string& text() const noexcept { return text_; }
    bool is_constant() const noexcept { return constant_; }

private:
    enum class Op : unsigned char {
        constant, var_x, var_y, var_t,
        add, sub, mul, div, pow, neg,
        exp, log, sin, cos, tan, tanh, sqrt, sqr, abs, heaviside,
        min, max, gate,
    };
    struct Instr {
        Op op;
        double value = 0.0;
    };

    friend class ExpressionParser;

    std::string text_;
    std::vector<Instr> code_;
    std::size_t max_depth_ = 0;
    bool constant_ = true;
};

} // namespace ensheat
