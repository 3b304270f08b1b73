#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "swfront/expr.hpp"

using namespace swfront::expr;

namespace {

double ev(const char* s, double r = 0.0) { return eval(*parse(s), r); }

NodePtr random_ast(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 5);
    switch (pick(rng)) {
        case 0: {
            std::uniform_real_distribution<double> u(0.0, 5.0);
            return make_number(u(rng));
        }
        case 1: return make_var();
        case 2: return make_const(rng() % 2 ? Constant::Pi : Constant::E);
        case 3: return make_neg(random_ast(rng, depth - 1));
        case 4: {
            static const Func fs[] = {Func::Exp, Func::Log, Func::Sqrt, Func::Abs};
            return make_call(fs[rng() % 4], random_ast(rng, depth - 1));
        }
        default: {
            static const char ops[] = {'+', '-', '*', '/', '^'};
            return make_binary(ops[rng() % 5], random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        }
    }
}

// NaN-aware bitwise comparison of an evaluation that may throw.
struct Outcome {
    bool threw = false;
    double value = 0.0;
};

Outcome try_eval(const Node& n, double r) {
    try {
        return {false, eval(n, r)};
    } catch (const EvalError&) {
        return {true, 0.0};
    }
}

}  // namespace

TEST_CASE("grammar examples") {
    auto ast = parse("1 - r");
    REQUIRE(ast->kind == Node::Kind::Binary);
    CHECK(ast->op == '-');
    CHECK(ast->lhs->kind == Node::Kind::Number);
    CHECK(ast->rhs->kind == Node::Kind::Var);

    CHECK(ev("1-r", 0.25) == 0.75);
    CHECK(ev("sqrt(r)", 0.0) == 0.0);
    CHECK(ev("2-3-4") == -5.0);
    CHECK(ev("2^3^2") == 512.0);
    CHECK(ev("-2^2") == -4.0);
    CHECK(ev("2^-1") == 0.5);
    CHECK(ev("1.5e2 + 2E-1") == doctest::Approx(150.2));
    CHECK(ev("2*e") == doctest::Approx(2.0 * std::exp(1.0)));
    CHECK(ev("abs(-pi)") == doctest::Approx(3.14159265358979));
}

TEST_CASE("crowd diffusivity parses to the hand-built tree") {
    auto got = parse("0.3*0.5*exp(-0.5*(1/r - 1))/r");
    auto inner = make_binary('-', make_binary('/', make_number(1), make_var()), make_number(1));
    // unary minus binds tighter than '*'
    auto expo = make_binary('*', make_neg(make_number(0.5)), inner);
    auto want = make_binary(
        '/',
        make_binary('*', make_binary('*', make_number(0.3), make_number(0.5)), make_call(Func::Exp, expo)),
        make_var());
    CHECK(equal(*got, *want));
    const double r = 0.4;
    CHECK(eval(*got, r) == doctest::Approx(0.15 * std::exp(-0.5 * (1 / r - 1)) / r));
}

TEST_CASE("syntax errors carry offsets") {
    try {
        parse("r ^");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.offset() == 3);
        CHECK_FALSE(e.expected().empty());
    }
    try {
        parse("(1 + r");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.offset() == 6);
    }
    try {
        parse("1 2");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.offset() == 2);
    }
    CHECK_THROWS_AS(parse(""), SyntaxError);
    CHECK_THROWS_AS(parse("   "), SyntaxError);
}

TEST_CASE("unknown identifiers") {
    try {
        parse("1 + sin(r)");
        FAIL("expected UnknownIdent");
    } catch (const UnknownIdent& e) {
        CHECK(e.name() == "sin");
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(parse("x"), UnknownIdent);
}

TEST_CASE("evaluation errors carry r") {
    try {
        ev("1/r", 0.0);
        FAIL("expected EvalError");
    } catch (const EvalError& e) {
        CHECK(e.r() == 0.0);
    }
    CHECK_THROWS_AS(ev("log(r)", 0.0), EvalError);
    CHECK_THROWS_AS(ev("log(-1)", 0.5), EvalError);
    CHECK_THROWS_AS(ev("sqrt(r - 1)", 0.5), EvalError);
}

TEST_CASE("print/parse round trip on random trees") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> pts(0.0, 1.0);
    for (int t = 0; t < 1000; ++t) {
        auto ast = random_ast(rng, 6);
        auto back = parse(print(*ast));
        REQUIRE(equal(*ast, *back));
        for (int k = 0; k < 10; ++k) {
            const double r = pts(rng);
            const Outcome a = try_eval(*ast, r);
            const Outcome b = try_eval(*back, r);
            REQUIRE(a.threw == b.threw);
            if (!a.threw) {
                REQUIRE(std::memcmp(&a.value, &b.value, sizeof(double)) == 0);
            }
        }
    }
}
