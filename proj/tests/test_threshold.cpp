#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "swfront/errors.hpp"
#include "swfront/oracle.hpp"
#include "swfront/threshold.hpp"
#include "test_models.hpp"

using namespace swfront;

TEST_CASE("analytic bracket") {
    double lo = 0, hi = 0;
    cstar_bounds(swtest::d1(), lo, hi);
    CHECK(lo == doctest::Approx(2.0));
    CHECK(hi == doctest::Approx(2.0));
    cstar_bounds(swtest::d2(), lo, hi);
    CHECK(lo == doctest::Approx(0.0));
    CHECK(hi == doctest::Approx(1.0));
    // crowd: lo = vmax, and hi = vmax + v* with v* = 2 sqrt(sup D g / s).
    const Model cr = swtest::crowd();
    cstar_bounds(cr, lo, hi);
    CHECK(lo == doctest::Approx(1.0));
    CHECK(hi == doctest::Approx(1.0 + 2.0 * std::sqrt(cr.bounds().sup_Dg_over_s)));
    CHECK(hi > lo);
    CHECK_THROWS_AS(cstar_bounds(swtest::toy(), lo, hi), PreconditionError);
}

TEST_CASE("forced critical speed") {
    const ThresholdReport r = estimate_cstar(swtest::d1());
    REQUIRE(r.finite);
    CHECK(std::fabs(r.c_star - 2.0) <= 1e-3);
    CHECK(std::fabs(r.bisection_estimate - 2.0) <= 1e-3);
    CHECK(r.resolution <= r.tolerance);
}

TEST_CASE("D0 has no finite threshold") {
    const ThresholdReport r = estimate_cstar(swtest::toy());
    CHECK_FALSE(r.finite);
    CHECK(std::isinf(r.c_star));
    CHECK(r.c_star > 0.0);
}

TEST_CASE("D2 threshold and brute-force sign flip") {
    const Model m = swtest::d2();
    const ThresholdReport r = estimate_cstar(m);
    REQUIRE(r.finite);
    CHECK(r.c_star >= 0.0);
    CHECK(r.c_star <= 1.0);
    CHECK(r.resolution <= 1e-3);

    const double below = r.c_star - 2.0 * r.tolerance;
    const double above = r.c_star + 2.0 * r.tolerance;
    const BruteForceResult b = brute_force_fvp(m, below, 100000);
    CHECK(b.values.front() < -1e-4);
    // Above c* the trajectory reaches zero; the RK4 run either stops on it
    // or lands within rounding of it.
    bool touched = false;
    try {
        touched = std::fabs(brute_force_fvp(m, above, 100000).values.front()) <= 1e-6;
    } catch (const OracleBlowup&) {
        touched = true;
    }
    CHECK(touched);
}

TEST_CASE("bracket containment and predicate monotonicity") {
    for (const Model& m : {swtest::d1(), swtest::d2(), swtest::crowd()}) {
        CAPTURE(m.name());
        const ThresholdReport r = estimate_cstar(m);
        REQUIRE(r.finite);
        CHECK(r.c_star >= r.bracket_lo - r.tolerance);
        CHECK(r.c_star <= r.bracket_hi + r.tolerance);
        auto probes = r.branch_evidence;
        std::sort(probes.begin(), probes.end(), [](const Probe& a, const Probe& b) { return a.c < b.c; });
        int flips = 0;
        for (std::size_t i = 1; i < probes.size(); ++i) flips += probes[i].is_zero != probes[i - 1].is_zero;
        CHECK(flips == 1);
        CHECK_FALSE(probes.front().is_zero);
        CHECK(probes.back().is_zero);
        for (const auto& p : probes) {
            if (!p.is_zero) CHECK(p.z_at_zero < 0.0);
        }
    }
}

TEST_CASE("bisection and multisection agree") {
    for (const Model& m : {swtest::d1(), swtest::d2()}) {
        const ThresholdReport a = estimate_cstar(m, SearchMode::Bisection);
        const ThresholdReport b = estimate_cstar(m, SearchMode::ParallelMultisection);
        CHECK(std::fabs(a.c_star - b.c_star) <= 2.0 * a.tolerance);
    }
}

TEST_CASE("r+- roots") {
    const Model m = swtest::d1();
    RootPair r = r_plus_minus(m, 2.0);
    CHECK(r.r_minus == doctest::Approx(-1.0));
    CHECK(r.r_plus == doctest::Approx(-1.0));
    r = r_plus_minus(m, 2.5);
    CHECK(r.r_minus == doctest::Approx(-2.0));
    CHECK(r.r_plus == doctest::Approx(-0.5));
    CHECK_THROWS_AS(r_plus_minus(m, 1.0), DomainError);

    const RootPair d2 = r_plus_minus(swtest::d2(), 0.7);
    CHECK(d2.r_minus == doctest::Approx(-0.7));
    CHECK(d2.r_plus == 0.0);

    CHECK_THROWS_AS(r_plus_minus(swtest::toy(), 1.0), PreconditionError);
}

TEST_CASE("root identities") {
    const Model m = swtest::d1();
    const double p = m.classification().slope0 * m.g()(0.0);
    for (double c : {2.0, 2.1, 3.0, 7.5, 40.0}) {
        const RootPair r = r_plus_minus(m, c);
        CHECK(r.r_minus * r.r_plus == doctest::Approx(p).epsilon(1e-12));
        CHECK(r.r_minus + r.r_plus == doctest::Approx(m.h(0.0) - c).epsilon(1e-12));
        CHECK(r.r_minus <= r.r_plus);
    }
}

TEST_CASE("reflection involution of the threshold") {
    for (const Model& m : {swtest::d1(), swtest::crowd()}) {
        const ThresholdReport a = estimate_cstar(m);
        const ThresholdReport b = estimate_cstar(m.reflected().reflected());
        CHECK(std::fabs(a.c_star - b.c_star) <= 2.0 * a.tolerance);
    }
}

TEST_CASE("pasting") {
    SUBCASE("symmetric D1") {
        const PastingReport p = pasting_feasibility(swtest::d1());
        CHECK(p.c1_star == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(p.c2_star == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(p.interval_empty);
        CHECK_FALSE(p.feasible);
        CHECK(std::fabs(p.sum_check - 4.0) <= 4e-3);
        CHECK(p.sum_check >= p.sum_bound - 1e-6);
        CHECK(p.sum_bound == doctest::Approx(4.0));
    }
    SUBCASE("crowd") {
        const PastingReport p = pasting_feasibility(swtest::crowd());
        CHECK_FALSE(p.feasible);
        CHECK(p.interval_empty);
        CHECK(p.sum_check >= 0.0);
        CHECK(p.sum_check >= p.sum_bound - 1e-6);
    }
    SUBCASE("D2 equality case is only reported") {
        const PastingReport p = pasting_feasibility(swtest::d2());
        CHECK(p.near_equality == (std::fabs(p.sum_check) < 2.0 * p.tolerance));
        CHECK(p.sum_check >= p.sum_bound - 1e-6);
    }
    SUBCASE("hat classes are refused") {
        CHECK_THROWS_AS(pasting_feasibility(swtest::sqrt_model(0.0)), PreconditionError);
    }
}
