#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "swfront/errors.hpp"

// Arithmetic expressions in the single variable `r` (density), used to
// declare model fields in configuration files.
//
// Precedence, loosest to tightest: `+ -`, `* /`, unary `-`, `^`, atoms.
// `^` is right-associative, so "2^3^2" is 512 and "-2^2" is -4.

namespace swfront::expr {

enum class Func { Exp, Log, Sqrt, Abs };
enum class Constant { Pi, E };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Number, Var, Const, Neg, Call, Binary };

    Kind kind = Kind::Number;
    double number = 0.0;              // Kind::Number
    Constant constant = Constant::Pi; // Kind::Const
    Func func = Func::Exp;            // Kind::Call
    char op = '+';                    // Kind::Binary: one of + - * / ^
    NodePtr lhs;                      // operand of Neg/Call, left of Binary
    NodePtr rhs;                      // right of Binary
};

NodePtr make_number(double v);
NodePtr make_var();
NodePtr make_const(Constant c);
NodePtr make_neg(NodePtr child);
NodePtr make_call(Func f, NodePtr arg);
NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs);

bool equal(const Node& a, const Node& b);

class SyntaxError : public InputError {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& detail);
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownIdent : public InputError {
public:
    UnknownIdent(std::size_t offset, std::string name);
    std::size_t offset() const noexcept { return offset_; }
    const std::string& name() const noexcept { return name_; }

private:
    std::size_t offset_;
    std::string name_;
};

class EvalError : public InputError {
public:
    EvalError(double r, const std::string& detail);
    double r() const noexcept { return r_; }

private:
    double r_;
};

NodePtr parse(std::string_view src);

double eval(const Node& ast, double r);

/// Fully parenthesized rendering; numbers use 17 significant digits so that
/// parse(print(ast)) reproduces the tree exactly.
std::string print(const Node& ast);

/// Parsed expression bundled with its source text.
class Expression {
public:
    explicit Expression(std::string src);

    double operator()(double r) const { return eval(*ast_, r); }
    const std::string& source() const noexcept { return src_; }
    const NodePtr& ast() const noexcept { return ast_; }

private:
    std::string src_;
    NodePtr ast_;
};

}  // namespace swfront::expr
