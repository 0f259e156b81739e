#include "phibvp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "phibvp/error.hpp"

namespace phibvp {

namespace {

enum class Op {
    constant, var_t, var_x, var_y,
    neg, add, sub, mul, div, pow,
    sin, cos, tan, exp, log, atan, tanh, abs, sqrt,
    min, max,
};

struct Fn {
    const char* name;
    Op op;
    int arity;
};

constexpr Fn kFunctions[] = {
    {"sin", Op::sin, 1},   {"cos", Op::cos, 1},   {"tan", Op::tan, 1},   {"exp", Op::exp, 1},
    {"log", Op::log, 1},   {"atan", Op::atan, 1}, {"tanh", Op::tanh, 1}, {"abs", Op::abs, 1},
    {"sqrt", Op::sqrt, 1}, {"min", Op::min, 2},   {"max", Op::max, 2},
};

} // namespace

struct Expression::Node {
    Op op = Op::constant;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr leaf(Op op, double v = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->value = v;
    return n;
}

NodePtr node(Op op, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    Parser(std::string_view s, int line) : s_(s), line_(line) {}

    NodePtr run() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

    unsigned vars = 0;

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, line_, static_cast<int>(pos_) + 1);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) {
                lhs = node(Op::add, lhs, term());
            } else if (eat('-')) {
                lhs = node(Op::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (eat('*')) {
                lhs = node(Op::mul, lhs, unary());
            } else if (eat('/')) {
                lhs = node(Op::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (eat('-')) return node(Op::neg, unary());
        if (eat('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return node(Op::pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const std::string tail(s_.substr(pos_));
        char* end = nullptr;
        const double v = std::strtod(tail.c_str(), &end);
        if (end == tail.c_str()) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - tail.c_str());
        return leaf(Op::constant, v);
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            ++pos_;
        }
        const std::string id(s_.substr(start, pos_ - start));
        if (id == "t") return vars |= 1u, leaf(Op::var_t);
        if (id == "x") return vars |= 2u, leaf(Op::var_x);
        if (id == "y") return vars |= 4u, leaf(Op::var_y);
        if (id == "pi") return leaf(Op::constant, std::numbers::pi);
        if (id == "e") return leaf(Op::constant, std::numbers::e);
        for (const Fn& f : kFunctions) {
            if (id != f.name) continue;
            if (!eat('(')) fail("expected '(' after " + id);
            NodePtr a = expr();
            NodePtr b;
            if (f.arity == 2) {
                if (!eat(',')) fail(id + " takes two arguments");
                b = expr();
            }
            if (!eat(')')) fail("expected ')'");
            return node(f.op, a, b);
        }
        pos_ = start;
        fail("unknown identifier '" + id + "'");
    }

    std::string_view s_;
    int line_;
    std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, double t, double x, double y) {
    auto A = [&] { return eval(*n.a, t, x, y); };
    auto B = [&] { return eval(*n.b, t, x, y); };
    switch (n.op) {
    case Op::constant: return n.value;
    case Op::var_t: return t;
    case Op::var_x: return x;
    case Op::var_y: return y;
    case Op::neg: return -A();
    case Op::add: return A() + B();
    case Op::sub: return A() - B();
    case Op::mul: return A() * B();
    case Op::div: return A() / B();
    case Op::pow: {
        const double base = A();
        const double ex = B();
        // integer powers keep the sign for negative bases
        if (ex == std::round(ex) && std::abs(ex) <= 64) {
            double r = 1.0;
            for (int k = 0; k < static_cast<int>(std::abs(ex)); ++k) r *= base;
            return ex < 0 ? 1.0 / r : r;
        }
        return std::pow(base, ex);
    }
    case Op::sin: return std::sin(A());
    case Op::cos: return std::cos(A());
    case Op::tan: return std::tan(A());
    case Op::exp: return std::exp(A());
    case Op::log: return std::log(A());
    case Op::atan: return std::atan(A());
    case Op::tanh: return std::tanh(A());
    case Op::abs: return std::abs(A());
    case Op::sqrt: return std::sqrt(A());
    case Op::min: return std::min(A(), B());
    case Op::max: return std::max(A(), B());
    }
    return NAN;
}

} // namespace

Expression::Expression() : source_("0"), root_(leaf(Op::constant, 0.0)) {}

Expression Expression::parse(std::string_view text, int line) {
    Parser p(text, line);
    Expression e;
    e.root_ = p.run();
    e.source_ = std::string(text);
    e.vars_ = p.vars;
    return e;
}

double Expression::operator()(double t, double x, double y) const { return eval(*root_, t, x, y); }

bool Expression::uses(char var) const noexcept {
    switch (var) {
    case 't': return vars_ & 1u;
    case 'x': return vars_ & 2u;
    case 'y': return vars_ & 4u;
    default: return false;
    }
}

} // namespace phibvp
