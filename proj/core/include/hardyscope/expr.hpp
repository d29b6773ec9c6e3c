#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hardyscope {

// Closed-form scalar expression over a fixed list of named variables.
//
// Grammar: numbers, variables, + - * / ^ (right associative), unary minus,
// parentheses and calls to exp log sqrt sin cos tan sinh cosh tanh atanh
// asinh acosh abs min max pow atan2. The constants pi and e are predefined.
// Parsing compiles to a flat stack program, so evaluation allocates nothing
// and an Expression can be shared across threads.
class Expression {
public:
    static Expression parse(std::string_view source, std::vector<std::string> variables);

    // Values are bound positionally to the variable list given to parse().
    double evaluate(std::span<const double> values) const;

    double operator()(double a) const { return evaluate(std::span<const double>(&a, 1)); }
    double operator()(double a, double b) const {
        const double v[2] = {a, b};
        return evaluate(v);
    }

    const std::string& source() const { return source_; }
    const std::vector<std::string>& variables() const { return variables_; }

    enum class Op : unsigned char {
        constant, variable, add, sub, mul, div, pow, neg,
        exp, log, sqrt, sin, cos, tan, sinh, cosh, tanh, atanh, asinh, acosh, abs,
        min, max, atan2
    };
    struct Instruction {
        Op op;
        double value = 0.0;
        int index = 0;
    };

private:
    Expression() = default;

    std::string source_;
    std::vector<std::string> variables_;
    std::vector<Instruction> program_;
    int max_stack_ = 0;
};

}  // namespace hardyscope
