#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "swfront/errors.hpp"
#include "swfront/oracle.hpp"
#include "swfront/reduced_ode.hpp"
#include "swfront/threshold.hpp"
#include "test_models.hpp"

using namespace swfront;

namespace {

ScalarField logistic_flux() {
    return ScalarField::analytic([](double r) { return r * (1.0 - r); }, [](double r) { return 1.0 - 2.0 * r; },
                                 "r(1-r)");
}

}  // namespace

TEST_CASE("explicit linear solution") {
    const auto z0 = linear_explicit_z(0.0);
    for (double x : {0.0, 0.25, 0.5, 1.0}) CHECK(z0(x) == doctest::Approx(x - 1.0).epsilon(1e-15));
    CHECK(-linear_explicit_z(3.0)(0.0) == doctest::Approx(0.302776).epsilon(1e-6));
    CHECK(lambda_plus(3.0) == doctest::Approx((-3.0 + std::sqrt(13.0)) / 2.0).epsilon(1e-15));

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 0.999);
    for (double c : {-2.0, 0.0, 3.0, 17.0}) {
        const auto z = linear_explicit_z(c);
        const double slope = lambda_plus(c);
        for (int i = 0; i < 50; ++i) {
            const double x = u(rng);
            CHECK(std::fabs(slope - (-c - (1.0 - x) / z(x))) <= 1e-12);
        }
    }
}

TEST_CASE("lambda_plus without cancellation") {
    for (double c : {1e3, 1e8, 1e12}) {
        const double l = lambda_plus(c);
        CHECK(l * (l + c) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("source-free first integral") {
    const ScalarField D = ScalarField::constant(1.0);
    SUBCASE("boundary speed c = h(rho_bar)") {
        const GZeroReport r = g_zero_first_integral(D, logistic_flux(), 1.0, -1.0);
        CHECK(r.admissible_from);
        for (double x : {0.0, 0.3, 0.9}) CHECK(r.z_closed_form(x) == doctest::Approx(-(1 - x) * (1 - x)));
        CHECK(r.contact_limit == doctest::Approx(-1.0));
        CHECK(r.end_slope == doctest::Approx(0.0));
    }
    SUBCASE("above h(rho_bar)") {
        const GZeroReport r = g_zero_first_integral(D, logistic_flux(), 1.0, 0.0);
        CHECK_FALSE(r.admissible_from);
        CHECK(r.admissible_to);
        CHECK(r.worst_from > 0.0);
    }
    SUBCASE("admissibility flips at h(rho_bar)") {
        double lo = -3.0, hi = 1.0;
        REQUIRE(g_zero_first_integral(D, logistic_flux(), 1.0, lo).admissible_from);
        REQUIRE_FALSE(g_zero_first_integral(D, logistic_flux(), 1.0, hi).admissible_from);
        while (hi - lo > 1e-7) {
            const double m = 0.5 * (lo + hi);
            (g_zero_first_integral(D, logistic_flux(), 1.0, m).admissible_from ? lo : hi) = m;
        }
        CHECK(std::fabs(0.5 * (lo + hi) - (-1.0)) <= 1e-6);
    }
}

TEST_CASE("wavefront speed") {
    CHECK(wavefront_speed(logistic_flux(), 0.0, 1.0) == 0.0);
    CHECK(wavefront_speed(logistic_flux(), 0.25, 0.5) == doctest::Approx(0.25));
    CHECK_THROWS_AS(wavefront_speed(logistic_flux(), 1.0, 0.0), PreconditionError);
}

TEST_CASE("first integral is a stationary point of the verifiers when g is switched off") {
    // The model still needs a valid source; the verifiers ignore it here.
    const Model m = Model::build(swtest::custom("logistic", ScalarField::constant(1.0), logistic_flux(),
                                                swtest::linear_source()));
    const double c = -2.0;
    const GZeroReport r = g_zero_first_integral(m.D(), m.f(), 1.0, c);
    const ScalarField z = ScalarField::analytic(r.z_closed_form, [&](double x) { return m.h(x) - c; }, "first integral");
    VerifyOptions opts;
    opts.force_g_zero = true;
    const auto lo = check_lower_solution(m, c, z, 0.0, 1.0, opts);
    const auto up = check_upper_solution(m, c, z, 0.0, 1.0, opts);
    CHECK(lo.points_checked > 500);
    CHECK(lo.max_abs_margin <= 1e-10);
    CHECK(up.max_abs_margin <= 1e-10);
}

TEST_CASE("brute-force final-value runs") {
    SUBCASE("toy against the closed form") {
        const BruteForceResult b = brute_force_fvp(swtest::toy(), 0.0, 1000000);
        CHECK(b.steps == 1000000);
        CHECK(b.grid.front() == 0.0);
        CHECK(b.grid.back() == 1.0);
        double gap = 0.0;
        for (std::size_t i = 0; i < b.grid.size(); ++i) gap = std::max(gap, std::fabs(b.values[i] - (b.grid[i] - 1.0)));
        CHECK(gap <= 1e-6);
    }
    SUBCASE("D = r at the critical speed against the solver") {
        const Model m = swtest::d1();
        const ZSolution s = solve_z(m, 2.0);
        // The trajectory grazes zero at 0; stop short of it and step finely
        // through the end layer.
        const double stop = 1.0 / 64.0;
        const BruteForceResult b = brute_force_fvp(m, 2.0, 1000000, 10000000, stop);
        double gap = 0.0;
        for (std::size_t i = 0; i < s.grid.size(); ++i) {
            if (s.grid[i] >= stop) gap = std::max(gap, std::fabs(sample(b, s.grid[i]) - s.values[i]));
        }
        CHECK(gap <= std::max(1e-5, 20.0 * s.regularization.richardson_error));
    }
    SUBCASE("infinite-slope diffusivity against shooting") {
        const Model m = swtest::sqrt_model(0.0);
        const ZSolution s = solve_z(m, 0.0);
        const BruteForceResult b = brute_force_fvp(m, 0.0, 10000);
        for (int k = 0; k < 8; ++k) {
            const double x = k / 8.0;
            const double zs = k == 0 ? s.z_at_zero : s.values[static_cast<std::size_t>(
                                                        std::lower_bound(s.grid.begin(), s.grid.end(), x) - s.grid.begin())];
            CHECK(std::fabs(sample(b, x) - zs) <= 1e-4);
        }
    }
    SUBCASE("contract") {
        CHECK_THROWS_AS(brute_force_fvp(swtest::toy(), 0.0, 10), PreconditionError);
        CHECK_THROWS_AS(brute_force_fvp(swtest::toy(), 0.0, 10000, 0), PreconditionError);
        CHECK_THROWS_AS(brute_force_fvp(swtest::toy(), 0.0, 10000, 1000, 1.0), PreconditionError);
    }
    SUBCASE("blowup is reported") {
        // Far above c*, a coarse run steps across zero near rho_bar.
        CHECK_THROWS_AS(brute_force_fvp(swtest::d1(), 3.0, 1000000, 1000), OracleBlowup);
    }
}

TEST_CASE("oracle agrees with the solver around c* on every preset with finite c*" * doctest::test_suite("slow")) {
    const Model models[] = {swtest::d1(), swtest::d2(), swtest::crowd(),
                            Model::build(preset_nelson(1.0, {}, "1-r", "1-r", Tolerances{}))};
    for (const Model& m : models) {
        const ThresholdReport t = estimate_cstar(m);
        REQUIRE(t.finite);
        for (double c : {t.c_star - 1.0, t.c_star, t.c_star + 1.0}) {
            CAPTURE(m.name());
            CAPTURE(c);
            const ZSolution s = solve_z(m, c);
            // Stop before z reaches zero, which for a flat D happens inside the interval.
            double stop = 0.0;
            if (zero_at_zero(m, s).is_zero) {
                stop = 1.0 / 64.0;
                const auto it = std::find_if(s.values.begin(), s.values.end(), [](double z) { return z <= -1e-3; });
                if (it != s.values.end()) stop = std::max(stop, s.grid[static_cast<std::size_t>(it - s.values.begin())]);
            }
            // A smaller 1/n start needs a finer step through the layer at rho_bar.
            BruteForceResult b;
            bool ran = false;
            for (const auto& [n, steps, stride] : {std::tuple<long long, long long, long long>{1000000, 10000000, 10},
                                                   {200000, 50000000, 50}}) {
                try {
                    b = brute_force_fvp(m, c, n, steps, stop, stride);
                    ran = true;
                    break;
                } catch (const OracleBlowup&) {
                }
            }
            REQUIRE(ran);
            double gap = 0.0;
            for (std::size_t i = 0; i < s.grid.size(); ++i) {
                if (s.grid[i] >= stop) gap = std::max(gap, std::fabs(sample(b, s.grid[i]) - s.values[i]));
            }
            CHECK(gap <= std::max(1e-5, 20.0 * s.regularization.richardson_error));
        }
    }
}

TEST_CASE("sparse recording keeps the uniform grid") {
    const BruteForceResult full = brute_force_fvp(swtest::toy(), 0.0, 100000, 1000);
    const BruteForceResult sparse = brute_force_fvp(swtest::toy(), 0.0, 100000, 1000, 0.0, 10);
    REQUIRE(sparse.grid.size() == 101);
    for (std::size_t i = 0; i < sparse.grid.size(); ++i) {
        CHECK(sparse.grid[i] == full.grid[10 * i]);
        CHECK(sparse.values[i] == full.values[10 * i]);
    }
    CHECK_THROWS_AS(brute_force_fvp(swtest::toy(), 0.0, 100000, 1000, 0.0, 7), PreconditionError);
}
