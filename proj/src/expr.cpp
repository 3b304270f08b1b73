#include "swfront/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace swfront::expr {

namespace {

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr run() {
        skip_ws();
        if (pos_ >= src_.size()) {
            throw SyntaxError(pos_, {"expression"}, "empty input");
        }
        NodePtr e = expr();
        skip_ws();
        if (pos_ < src_.size()) {
            throw SyntaxError(pos_, {"operator", "end of input"},
                              std::string("unexpected '") + src_[pos_] + "'");
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make_binary('+', lhs, term());
            } else if (accept('-')) {
                lhs = make_binary('-', lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_binary('*', lhs, unary());
            } else if (accept('/')) {
                lhs = make_binary('/', lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make_neg(unary());
        return power();
    }

    // The exponent is parsed as `unary` so that "2^-1" is accepted while
    // "-2^2" still negates the power.
    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make_binary('^', base, unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) {
            throw SyntaxError(pos_, {"number", "r", "function", "("}, "unexpected end of input");
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            if (!accept(')')) throw SyntaxError(pos_, {")"}, "unbalanced parenthesis");
            return inner;
        }
        throw SyntaxError(pos_, {"number", "r", "function", "("},
                          std::string("unexpected '") + c + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) throw SyntaxError(start, {"digit"}, "malformed number");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
            if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
                pos_ = look;
                digits();
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        return make_number(std::strtod(text.c_str(), nullptr));
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name(src_.substr(start, pos_ - start));
        if (name == "r") return make_var();
        if (name == "pi") return make_const(Constant::Pi);
        if (name == "e") return make_const(Constant::E);

        Func f;
        if (name == "exp") {
            f = Func::Exp;
        } else if (name == "log") {
            f = Func::Log;
        } else if (name == "sqrt") {
            f = Func::Sqrt;
        } else if (name == "abs") {
            f = Func::Abs;
        } else {
            throw UnknownIdent(start, name);
        }
        if (!accept('(')) throw SyntaxError(pos_, {"("}, "function call needs an argument list");
        NodePtr arg = expr();
        if (!accept(')')) throw SyntaxError(pos_, {")"}, "unbalanced parenthesis");
        return make_call(f, arg);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

double checked(double v, double r, const char* what) {
    if (!std::isfinite(v)) throw EvalError(r, std::string(what) + " produced a non-finite value");
    return v;
}

const char* func_name(Func f) {
    switch (f) {
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Abs: return "abs";
    }
    return "?";
}

void print_into(const Node& n, std::string& out) {
    switch (n.kind) {
        case Node::Kind::Number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            out += buf;
            return;
        }
        case Node::Kind::Var: out += 'r'; return;
        case Node::Kind::Const: out += (n.constant == Constant::Pi ? "pi" : "e"); return;
        case Node::Kind::Neg:
            out += "(-";
            print_into(*n.lhs, out);
            out += ')';
            return;
        case Node::Kind::Call:
            out += func_name(n.func);
            out += '(';
            print_into(*n.lhs, out);
            out += ')';
            return;
        case Node::Kind::Binary:
            out += '(';
            print_into(*n.lhs, out);
            out += n.op;
            print_into(*n.rhs, out);
            out += ')';
            return;
    }
}

}  // namespace

NodePtr make_number(double v) {
    Node n;
    n.kind = Node::Kind::Number;
    n.number = v;
    return make(n);
}

NodePtr make_var() {
    Node n;
    n.kind = Node::Kind::Var;
    return make(n);
}

NodePtr make_const(Constant c) {
    Node n;
    n.kind = Node::Kind::Const;
    n.constant = c;
    return make(n);
}

NodePtr make_neg(NodePtr child) {
    Node n;
    n.kind = Node::Kind::Neg;
    n.lhs = std::move(child);
    return make(std::move(n));
}

NodePtr make_call(Func f, NodePtr arg) {
    Node n;
    n.kind = Node::Kind::Call;
    n.func = f;
    n.lhs = std::move(arg);
    return make(std::move(n));
}

NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
    Node n;
    n.kind = Node::Kind::Binary;
    n.op = op;
    n.lhs = std::move(lhs);
    n.rhs = std::move(rhs);
    return make(std::move(n));
}

bool equal(const Node& a, const Node& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Node::Kind::Number: return a.number == b.number;
        case Node::Kind::Var: return true;
        case Node::Kind::Const: return a.constant == b.constant;
        case Node::Kind::Neg: return equal(*a.lhs, *b.lhs);
        case Node::Kind::Call: return a.func == b.func && equal(*a.lhs, *b.lhs);
        case Node::Kind::Binary:
            return a.op == b.op && equal(*a.lhs, *b.lhs) && equal(*a.rhs, *b.rhs);
    }
    return false;
}

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& detail)
    : InputError("SyntaxError", "syntax error at offset " + std::to_string(offset) + ": " +
                                    detail + " (expected " + join(expected) + ")"),
      offset_(offset),
      expected_(std::move(expected)) {}

UnknownIdent::UnknownIdent(std::size_t offset, std::string name)
    : InputError("UnknownIdent",
                 "unknown identifier '" + name + "' at offset " + std::to_string(offset)),
      offset_(offset),
      name_(std::move(name)) {}

EvalError::EvalError(double r, const std::string& detail)
    : InputError("EvalError", [&] {
          std::ostringstream os;
          os.precision(17);
          os << "evaluation failed at r=" << r << ": " << detail;
          return os.str();
      }()),
      r_(r) {}

NodePtr parse(std::string_view src) { return Parser(src).run(); }

double eval(const Node& n, double r) {
    switch (n.kind) {
        case Node::Kind::Number: return n.number;
        case Node::Kind::Var: return r;
        case Node::Kind::Const:
            return n.constant == Constant::Pi ? std::numbers::pi : std::numbers::e;
        case Node::Kind::Neg: return -eval(*n.lhs, r);
        case Node::Kind::Call: {
            const double x = eval(*n.lhs, r);
            switch (n.func) {
                case Func::Exp: return checked(std::exp(x), r, "exp");
                case Func::Log:
                    if (!(x > 0.0)) throw EvalError(r, "log of a non-positive value");
                    return std::log(x);
                case Func::Sqrt:
                    if (x < 0.0) throw EvalError(r, "sqrt of a negative value");
                    return std::sqrt(x);
                case Func::Abs: return std::fabs(x);
            }
            return 0.0;
        }
        case Node::Kind::Binary: {
            const double a = eval(*n.lhs, r);
            const double b = eval(*n.rhs, r);
            switch (n.op) {
                case '+': return checked(a + b, r, "+");
                case '-': return checked(a - b, r, "-");
                case '*': return checked(a * b, r, "*");
                case '/':
                    if (b == 0.0) throw EvalError(r, "division by zero");
                    return checked(a / b, r, "/");
                case '^': return checked(std::pow(a, b), r, "^");
            }
            return 0.0;
        }
    }
    return 0.0;
}

std::string print(const Node& ast) {
    std::string out;
    print_into(ast, out);
    return out;
}

Expression::Expression(std::string src) : src_(std::move(src)), ast_(parse(src_)) {}

}  // namespace swfront::expr
