#include "ensheat/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>

namespace ensheat {

class ExpressionParser {
public:
    using Op = Expression::Op;

    explicit ExpressionParser(std::string_view text) : s_(text) {}

    Expression run()
    {
        Expression e;
        e.text_ = std::string(s_);
        skip();
        if (pos_ == s_.size())
            fail("empty expression");
        expr();
        skip();
        if (pos_ != s_.size())
            fail(std::string("unexpected '") + s_[pos_] + "'");
        e.code_ = std::move(code_);
        e.max_depth_ = max_depth_;
        e.constant_ = constant_;
        return e;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
    std::vector<Expression::Instr> code_;
    std::size_t depth_ = 0;
    std::size_t max_depth_ = 0;
    bool constant_ = true;

    [[noreturn]] void fail(const std::string& what) const { throw ExpressionError(what, pos_ + 1); }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c))
            fail(std::string("expected '") + c + "'");
    }

    // Stack-depth bookkeeping: operands push one, binary ops pop one.
    void emit(Op op, double value = 0.0)
    {
        code_.push_back({op, value});
        switch (op) {
        case Op::constant:
        case Op::var_x:
        case Op::var_y:
        case Op::var_t:
            max_depth_ = std::max(max_depth_, ++depth_);
            break;
        case Op::add:
        case Op::sub:
        case Op::mul:
        case Op::div:
        case Op::pow:
        case Op::min:
        case Op::max:
        case Op::gate:
            --depth_;
            break;
        default:
            break;
        }
    }

    void expr()
    {
        term();
        for (;;) {
            if (accept('+')) {
                term();
                emit(Op::add);
            } else if (accept('-')) {
                term();
                emit(Op::sub);
            } else {
                return;
            }
        }
    }

    void term()
    {
        unary();
        for (;;) {
            if (accept('*')) {
                unary();
                emit(Op::mul);
            } else if (accept('/')) {
                unary();
                emit(Op::div);
            } else {
                return;
            }
        }
    }

    void unary()
    {
        if (accept('-')) {
            unary();
            emit(Op::neg);
        } else if (accept('+')) {
            unary();
        } else {
            power();
        }
    }

    void power()
    {
        primary();
        if (accept('^')) {
            unary();
            emit(Op::pow);
        }
    }

    void primary()
    {
        skip();
        if (pos_ >= s_.size())
            fail("unexpected end of expression");
        const char c = s_[pos_];
        if (accept('(')) {
            expr();
            expect(')');
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            identifier();
            return;
        }
        fail(std::string("unexpected '") + c + "'");
    }

    void number()
    {
        double v = 0.0;
        const char* first = s_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
        if (ec != std::errc())
            fail("malformed number");
        pos_ += static_cast<std::size_t>(ptr - first);
        emit(Op::constant, v);
    }

    void identifier()
    {
        const auto start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string_view name = s_.substr(start, pos_ - start);

        if (name == "x" || name == "y" || name == "t") {
            constant_ = false;
            emit(name == "x" ? Op::var_x : name == "y" ? Op::var_y : Op::var_t);
            return;
        }
        if (name == "pi") {
            emit(Op::constant, std::numbers::pi);
            return;
        }

        static constexpr std::array<std::pair<std::string_view, Op>, 10> unary_fns{{
            {"exp", Op::exp},
            {"log", Op::log},
            {"sin", Op::sin},
            {"cos", Op::cos},
            {"tan", Op::tan},
            {"tanh", Op::tanh},
            {"sqrt", Op::sqrt},
            {"sqr", Op::sqr},
            {"abs", Op::abs},
            {"heaviside", Op::heaviside},
        }};
        static constexpr std::array<std::pair<std::string_view, Op>, 3> binary_fns{{
            {"min", Op::min},
            {"max", Op::max},
            {"gate", Op::gate},
        }};

        for (const auto& [n, op] : unary_fns)
            if (n == name) {
                expect('(');
                expr();
                expect(')');
                emit(op);
                return;
            }
        for (const auto& [n, op] : binary_fns)
            if (n == name) {
                expect('(');
                expr();
                expect(',');
                expr();
                expect(')');
                if (op == Op::gate)
                    constant_ = false;
                emit(op);
                return;
            }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }
};

Expression Expression::parse(std::string_view text) { return ExpressionParser(text).run(); }

double Expression::operator()(double x, double y, double t) const
{
    if (code_.empty())
        throw std::logic_error("evaluating an empty expression");
    constexpr std::size_t kInline = 32;
    std::array<double, kInline> small{};
    std::vector<double> big;
    double* st = small.data();
    if (max_depth_ > kInline) {
        big.resize(max_depth_);
        st = big.data();
    }
    std::size_t sp = 0;
    for (const auto& in : code_) {
        switch (in.op) {
        case Op::constant: st[sp++] = in.value; break;
        case Op::var_x: st[sp++] = x; break;
        case Op::var_y: st[sp++] = y; break;
        case Op::var_t: st[sp++] = t; break;
        case Op::add: --sp; st[sp - 1] += st[sp]; break;
        case Op::sub: --sp; st[sp - 1] -= st[sp]; break;
        case Op::mul: --sp; st[sp - 1] *= st[sp]; break;
        case Op::div: --sp; st[sp - 1] /= st[sp]; break;
        case Op::pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
        case Op::min: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
        case Op::max: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
        case Op::gate:
            --sp;
            st[sp - 1] = (st[sp - 1] <= t && t <= st[sp]) ? 1.0 : 0.0;
            break;
        case Op::neg: st[sp - 1] = -st[sp - 1]; break;
        case Op::exp: st[sp - 1] = std::exp(st[sp - 1]); break;
        case Op::log: st[sp - 1] = std::log(st[sp - 1]); break;
        case Op::sin: st[sp - 1] = std::sin(st[sp - 1]); break;
        case Op::cos: st[sp - 1] = std::cos(st[sp - 1]); break;
        case Op::tan: st[sp - 1] = std::tan(st[sp - 1]); break;
        case Op::tanh: st[sp - 1] = std::tanh(st[sp - 1]); break;
        case Op::sqrt: st[sp - 1] = std::sqrt(st[sp - 1]); break;
        case Op::sqr: st[sp - 1] *= st[sp - 1]; break;
        case Op::abs: st[sp - 1] = std::abs(st[sp - 1]); break;
        case Op::heaviside: st[sp - 1] = st[sp - 1] > 0.0 ? 1.0 : 0.0; break;
        }
    }
    return st[0];
}

} // namespace ensheat
