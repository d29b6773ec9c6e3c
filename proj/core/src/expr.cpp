#include "hardyscope/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

#include "hardyscope/errors.hpp"

namespace hardyscope {

namespace {

using Op = Expression::Op;
using Instruction = Expression::Instruction;

struct FunctionInfo {
    std::string_view name;
    Op op;
    int arity;
};

constexpr std::array kFunctions{
    FunctionInfo{"exp", Op::exp, 1},     FunctionInfo{"log", Op::log, 1},
    FunctionInfo{"sqrt", Op::sqrt, 1},   FunctionInfo{"sin", Op::sin, 1},
    FunctionInfo{"cos", Op::cos, 1},     FunctionInfo{"tan", Op::tan, 1},
    FunctionInfo{"sinh", Op::sinh, 1},   FunctionInfo{"cosh", Op::cosh, 1},
    FunctionInfo{"tanh", Op::tanh, 1},   FunctionInfo{"atanh", Op::atanh, 1},
    FunctionInfo{"asinh", Op::asinh, 1}, FunctionInfo{"acosh", Op::acosh, 1},
    FunctionInfo{"abs", Op::abs, 1},     FunctionInfo{"min", Op::min, 2},
    FunctionInfo{"max", Op::max, 2},     FunctionInfo{"pow", Op::pow, 2},
    FunctionInfo{"atan2", Op::atan2, 2},
};

// Recursive-descent parser emitting postfix code.
class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

    std::vector<Instruction> run() {
        expression();
        skip_space();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return std::move(code_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("expression '" + std::string(src_) + "': " + msg, pos_); }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    void expression() {
        term();
        for (;;) {
            if (accept('+')) { term(); emit(Op::add); }
            else if (accept('-')) { term(); emit(Op::sub); }
            else break;
        }
    }
    void term() {
        unary();
        for (;;) {
            if (accept('*')) { unary(); emit(Op::mul); }
            else if (accept('/')) { unary(); emit(Op::div); }
            else break;
        }
    }
    // Unary minus binds looser than ^ so that -x^2 == -(x^2).
    void unary() {
        if (accept('-')) { unary(); emit(Op::neg); return; }
        if (accept('+')) { unary(); return; }
        power();
    }
    void power() {
        primary();
        if (accept('^')) {
            unary();
            emit(Op::pow);
        }
    }
    void primary() {
        skip_space();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            expression();
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
    void number() {
        const char* begin = src_.data() + pos_;
        double value = 0.0;
        auto [end, ec] = std::from_chars(begin, src_.data() + src_.size(), value);
        if (ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        code_.push_back({Op::constant, value, 0});
    }
    void identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);

        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name) {
                code_.push_back({Op::variable, 0.0, static_cast<int>(i)});
                return;
            }
        }
        if (name == "pi") { code_.push_back({Op::constant, std::numbers::pi, 0}); return; }
        if (name == "e") { code_.push_back({Op::constant, std::numbers::e, 0}); return; }

        for (const auto& f : kFunctions) {
            if (f.name != name) continue;
            expect('(');
            expression();
            for (int k = 1; k < f.arity; ++k) {
                expect(',');
                expression();
            }
            expect(')');
            emit(f.op);
            return;
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }
    void emit(Op op) { code_.push_back({op, 0.0, 0}); }

    std::string_view src_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
    std::vector<Instruction> code_;
};

int stack_effect(Op op) {
    switch (op) {
        case Op::constant:
        case Op::variable: return 1;
        case Op::add: case Op::sub: case Op::mul: case Op::div: case Op::pow:
        case Op::min: case Op::max: case Op::atan2: return -1;
        default: return 0;
    }
}

}  // namespace

Expression Expression::parse(std::string_view source, std::vector<std::string> variables) {
    Expression e;
    e.source_ = std::string(source);
    e.variables_ = std::move(variables);
    e.program_ = Parser(e.source_, e.variables_).run();
    int depth = 0;
    for (const auto& ins : e.program_) {
        depth += stack_effect(ins.op);
        e.max_stack_ = std::max(e.max_stack_, depth);
    }
    return e;
}

double Expression::evaluate(std::span<const double> values) const {
    constexpr int kInline = 64;
    double inline_stack[kInline];
    std::vector<double> heap_stack;
    double* stack = inline_stack;
    if (max_stack_ > kInline) {
        heap_stack.resize(static_cast<std::size_t>(max_stack_));
        stack = heap_stack.data();
    }

    int top = -1;
    for (const auto& ins : program_) {
        switch (ins.op) {
            case Op::constant: stack[++top] = ins.value; break;
            case Op::variable: stack[++top] = values[static_cast<std::size_t>(ins.index)]; break;
            case Op::add: stack[top - 1] += stack[top]; --top; break;
            case Op::sub: stack[top - 1] -= stack[top]; --top; break;
            case Op::mul: stack[top - 1] *= stack[top]; --top; break;
            case Op::div: stack[top - 1] /= stack[top]; --top; break;
            case Op::pow: {
                const double ex = stack[top];
                const double base = stack[top - 1];
                // Small integer exponents are common in test functions.
                if (ex == 2.0) stack[top - 1] = base * base;
                else if (ex == 3.0) stack[top - 1] = base * base * base;
                else stack[top - 1] = std::pow(base, ex);
                --top;
                break;
            }
            case Op::min: stack[top - 1] = std::min(stack[top - 1], stack[top]); --top; break;
            case Op::max: stack[top - 1] = std::max(stack[top - 1], stack[top]); --top; break;
            case Op::atan2: stack[top - 1] = std::atan2(stack[top - 1], stack[top]); --top; break;
            case Op::neg: stack[top] = -stack[top]; break;
            case Op::exp: stack[top] = std::exp(stack[top]); break;
            case Op::log: stack[top] = std::log(stack[top]); break;
            case Op::sqrt: stack[top] = std::sqrt(stack[top]); break;
            case Op::sin: stack[top] = std::sin(stack[top]); break;
            case Op::cos: stack[top] = std::cos(stack[top]); break;
            case Op::tan: stack[top] = std::tan(stack[top]); break;
            case Op::sinh: stack[top] = std::sinh(stack[top]); break;
            case Op::cosh: stack[top] = std::cosh(stack[top]); break;
            case Op::tanh: stack[top] = std::tanh(stack[top]); break;
            case Op::atanh: stack[top] = std::atanh(stack[top]); break;
            case Op::asinh: stack[top] = std::asinh(stack[top]); break;
            case Op::acosh: stack[top] = std::acosh(stack[top]); break;
            case Op::abs: stack[top] = std::abs(stack[top]); break;
        }
    }
    return stack[top];
}

}  // namespace hardyscope
