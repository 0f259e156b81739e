#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace phibvp {

/**
 * Arithmetic expression in t, x, y.
 *
 * Grammar: literals, t x y, pi e, + - * / ^ (right associative, binds
 * tighter than unary minus), parentheses and the functions sin cos tan exp
 * log atan tanh abs sqrt (one argument) and min max (two arguments).
 * Parsed once into an immutable tree; evaluation is thread-safe.
 */
class Expression {
public:
    Expression();

    /// Throws ParseError with the 1-based column of the offending token.
    static Expression parse(std::string_view text, int line = 1);

    double operator()(double t, double x = 0.0, double y = 0.0) const;
    const std::string& source() const noexcept { return source_; }
    /// Whether the variable ('t', 'x' or 'y') occurs.
    bool uses(char var) const noexcept;

    struct Node;

private:
    std::string source_;
    std::shared_ptr<const Node> root_;
    unsigned vars_ = 0;
};

} // namespace phibvp
