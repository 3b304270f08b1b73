// One PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "swfront/cli.hpp"
#include "swfront/config.hpp"
#include "swfront/errors.hpp"
#include "swfront/oracle.hpp"
#include "swfront/profile.hpp"
#include "swfront/reduced_ode.hpp"
#include "swfront/threshold.hpp"

using namespace swfront;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- models -------------------------------------------------------------

ScalarField field(std::function<double(double)> v, std::function<double(double)> d, const char* label) {
    return ScalarField::analytic(std::move(v), std::move(d), label);
}

ModelSpec spec_of(const char* name, ScalarField D, ScalarField f, ScalarField g) {
    ModelSpec s;
    s.name = name;
    s.D = std::move(D);
    s.f = std::move(f);
    s.g = std::move(g);
    return s;
}

ScalarField linear_g() {
    return field([](double r) { return 1.0 - r; }, [](double) { return -1.0; }, "1-r");
}

Model toy() { return Model::build(preset_linear_toy(1.0)); }
Model named(ModelSpec s, const char* name) {
    s.name = name;
    return Model::build(std::move(s));
}
Model d1() { return named(preset_polynomial(1.0, {0, 1}, {0}, {1, -1}), "D=r"); }
Model d2() { return named(preset_polynomial(1.0, {0, 0, 1}, {0}, {1, -1}), "D=r^2"); }
Model crowd() { return Model::build(preset_crowd_exponential(1.0, {{"vmax", 1}, {"gamma", 0.5}, {"delta", 0.3}})); }

Model sqrt_model(double shift) {
    return Model::build(spec_of("sqrt", field([shift](double r) { return shift + std::sqrt(r); },
                                              [](double r) { return r > 0 ? 0.5 / std::sqrt(r) : kInf; }, "sqrt"),
                                ScalarField::constant(0.0), linear_g()));
}

Model power_source(double alpha) {
    return Model::build(
        spec_of("power", field([](double r) { return r; }, [](double) { return 1.0; }, "r"), ScalarField::constant(0.0),
                field([alpha](double r) { return std::pow(1.0 - r, alpha); },
                      [alpha](double r) { return r < 1.0 ? -alpha * std::pow(1.0 - r, alpha - 1.0) : 0.0; },
                      "(1-r)^alpha")));
}

// ---- bookkeeping --------------------------------------------------------

struct Recorded {
    std::string what;
    const Model* model;
    Profile profile;
};

std::vector<ZSolution> g_solutions;      // every regularized solve, for criterion 6
std::vector<std::string> g_solution_tags;
std::vector<Recorded> g_profiles;        // profiles of criteria 1-4, for criterion 10

ZSolution solve(const Model& m, double c) {
    ZSolution s = solve_z(m, c);
    if (s.method == SolveMethod::Regularized) {
        g_solutions.push_back(s);
        g_solution_tags.push_back(m.name() + " c=" + fmt("%g", c));
    }
    return s;
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

int g_failed = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.passed = false;
        o.detail = std::string("exception: ") + e.what();
    }
    if (!o.passed) ++g_failed;
    std::printf("%s criterion %2d: %s | %s | %.2fs\n", o.passed ? "PASS" : "FAIL", id, title, o.detail.c_str(),
                seconds_since(t));
    std::fflush(stdout);
}

// ---- CLI helpers for criterion 11 --------------------------------------

int cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"swfront"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main() {
    const Model m_toy = toy();
    const Model m_d1 = d1();
    const Model m_d2 = d2();
    const Model m_crowd = crowd();
    double d1_cstar = 2.0;

    report(1, "closed form on the linear toy", [&] {
        const auto t = Clock::now();
        double worst = 0.0;
        for (double c : {-2.0, 0.0, 3.0}) {
            const ZSolution s = solve(m_toy, c);
            const double l = (-c + std::sqrt(c * c + 4.0)) / 2.0;
            worst = std::max(worst, std::fabs(s.z_at_zero + l));
            for (std::size_t i = 0; i < s.grid.size(); ++i) {
                worst = std::max(worst, std::fabs(s.values[i] + l * (1.0 - s.grid[i])));
            }
            g_profiles.push_back({"toy c=" + fmt("%g", c), &m_toy, reconstruct_profile(m_toy, s)});
        }
        const double dt = seconds_since(t);
        return Outcome{worst <= 1e-6 && dt < 5.0, "sup error " + fmt("%.2e", worst) + ", " + fmt("%.2f", dt) + "s"};
    });

    report(2, "forced critical speed c* = 2 for D = r", [&] {
        const auto t = Clock::now();
        const ThresholdReport r = estimate_cstar(m_d1);
        const double dt = seconds_since(t);
        d1_cstar = r.c_star;
        const bool ok = r.finite && std::fabs(r.c_star - 2.0) <= 1e-3 && std::fabs(r.bisection_estimate - 2.0) <= 1e-3 &&
                        dt < 60.0;
        const ZSolution s = solve(m_d1, r.c_star);
        g_profiles.push_back({"D=r at c*", &m_d1, reconstruct_profile(m_d1, s)});
        return Outcome{ok, "c* " + fmt("%.7f", r.c_star) + ", bisection midpoint " + fmt("%.7f", r.bisection_estimate) +
                               ", " + std::to_string(r.iterations) + " probes"};
    });

    report(3, "contact slope table", [&] {
        std::string detail;
        bool ok = true;
        auto rel = [](double a, double b) { return std::fabs(a - b) <= 1e-2 * std::fabs(b); };
        const double d2_cstar = estimate_cstar(m_d2).c_star;
        struct Row {
            const Model* m;
            double c;
            double want;
            double cstar;
        };
        const Row rows[] = {{&m_d1, 1.0, -kInf, d1_cstar},
                            {&m_d1, 2.0, -1.0, d1_cstar},
                            {&m_d1, 3.0, (-3.0 + std::sqrt(5.0)) / 2.0, d1_cstar},
                            {&m_d2, 2.0, -0.5, d2_cstar},
                            {&m_d2, 4.0, -0.25, d2_cstar}};
        for (const auto& row : rows) {
            const ZSolution s = solve(*row.m, row.c);
            const SlopeReport sr = slope_at_contact(*row.m, s, row.cstar);
            const bool hit = std::isinf(row.want) ? sr.measured == row.want : rel(sr.measured, row.want);
            ok = ok && hit && sr.agreement;
            detail += row.m->name() + "(c=" + fmt("%g", row.c) + ")=" + fmt("%.6f", sr.measured) + " ";
            g_profiles.push_back({"slope c=" + fmt("%g", row.c), row.m, reconstruct_profile(*row.m, s)});
        }
        return Outcome{ok, detail};
    });

    static std::vector<Model> plateau_models;
    for (double a : {0.25, 0.5, 0.75, 1.0}) plateau_models.push_back(power_source(a));
    report(4, "plateau dichotomy for g = (1-r)^alpha", [&] {
        std::string detail;
        bool ok = true;
        const double alphas[] = {0.25, 0.5, 0.75, 1.0};
        for (int i = 0; i < 4; ++i) {
            const Model& m = plateau_models[static_cast<std::size_t>(i)];
            const ZSolution s = solve(m, 3.0);
            const Profile p = reconstruct_profile(m, s);
            const PlateauKind want = alphas[i] < 1.0 ? PlateauKind::FiniteAttach : PlateauKind::AsymptoticOnly;
            ok = ok && p.attach.kind == want;
            if (alphas[i] == 1.0) ok = ok && p.attach.evidence.fit_r2 > 0.99;
            detail += fmt("a=%g:", alphas[i]) + to_string(p.attach.kind) +
                      (alphas[i] == 1.0 ? fmt(" R2=%.5f", p.attach.evidence.fit_r2) : "") + " ";
            g_profiles.push_back({"plateau alpha=" + fmt("%g", alphas[i]), &m, p});
        }
        return Outcome{ok, detail};
    });

    report(5, "ordering of from-profiles in c", [&] {
        std::mt19937_64 rng(20241015);
        std::uniform_real_distribution<double> u(0.25, 4.0);
        bool ok = true;
        double worst = kInf;
        int pairs = 0;
        for (const Model* m : {&m_d1, &m_crowd}) {
            for (int k = 0; k < 10; ++k) {
                double c1 = u(rng), c2 = u(rng);
                while (std::fabs(c1 - c2) < 0.05) c2 = u(rng);
                const Profile p1 = reconstruct_profile(*m, solve(*m, c1));
                const Profile p2 = reconstruct_profile(*m, solve(*m, c2));
                const OrderingReport r = ordering_check(p1, p2);
                ok = ok && r.passed && r.worst_margin > 0.0 && r.points_compared > 1000;
                worst = std::min(worst, r.worst_margin);
                ++pairs;
            }
        }
        return Outcome{ok, std::to_string(pairs) + " pairs on D=r and crowd, smallest margin " + fmt("%.3e", worst)};
    });

    report(6, "monotone regularization", [&] {
        int violations = 0, iterates = 0;
        std::string where;
        for (std::size_t i = 0; i < g_solutions.size(); ++i) {
            const auto& reg = g_solutions[i].regularization;
            violations += reg.monotone_violations;
            iterates += static_cast<int>(reg.iterates.size());
            if (reg.monotone_violations > 0) where += " " + g_solution_tags[i];
        }
        return Outcome{violations == 0 && !g_solutions.empty(),
                       std::to_string(g_solutions.size()) + " solves, " + std::to_string(iterates) + " iterates, " +
                           std::to_string(violations) + " violations" + where};
    });

    report(7, "pasting infeasibility", [&] {
        bool ok = true;
        std::string detail;
        for (const Model* m : {&m_d1, &m_d2, &m_crowd}) {
            const PastingReport p = pasting_feasibility(*m);
            ok = ok && p.interval_empty && !p.feasible && p.sum_check >= p.sum_bound - 1e-6;
            if (m == &m_d1) ok = ok && std::fabs(p.sum_check - 4.0) <= 4e-3;
            detail += m->name() + " sum=" + fmt("%.6f", p.sum_check) + " bound=" + fmt("%.3f", p.sum_bound) + " ";
        }
        return Outcome{ok, detail};
    });

    report(8, "source-free theory", [&] {
        const ScalarField D = ScalarField::constant(1.0);
        const ScalarField f = field([](double r) { return r * (1.0 - r); }, [](double r) { return 1.0 - 2.0 * r; },
                                    "r(1-r)");
        double lo = -3.0, hi = 1.0;
        bool ok = g_zero_first_integral(D, f, 1.0, lo).admissible_from && !g_zero_first_integral(D, f, 1.0, hi).admissible_from;
        while (hi - lo > 1e-7) {
            const double mid = 0.5 * (lo + hi);
            (g_zero_first_integral(D, f, 1.0, mid).admissible_from ? lo : hi) = mid;
        }
        const double flip = 0.5 * (lo + hi);
        const double h_end = f.derivative(1.0);
        const double w = wavefront_speed(f, 0.0, 1.0);
        ok = ok && std::fabs(flip - h_end) <= 1e-6 && w == 0.0;
        return Outcome{ok, "flip at " + fmt("%.8f", flip) + " vs h(rho_bar) " + fmt("%g", h_end) +
                               ", wavefront speed " + fmt("%g", w)};
    });

    report(9, "infinite-slope diffusivities against brute force", [&] {
        bool ok = true;
        double worst = 0.0, zmax = -kInf;
        for (double shift : {0.0, 1.0}) {
            const Model m = sqrt_model(shift);
            for (double c : {-1.0, 0.0, 2.0}) {
                const ZSolution s = shoot_infinite_slope(m, c);
                zmax = std::max(zmax, s.z_at_zero);
                ok = ok && s.z_at_zero < 0.0;
                const BruteForceResult b = brute_force_fvp(m, c, 10000);
                for (int k = 0; k < 8; ++k) {
                    const double x = k / 8.0;
                    double zs = s.z_at_zero;
                    if (k > 0) {
                        const auto it = std::lower_bound(s.grid.begin(), s.grid.end(), x);
                        zs = s.values[static_cast<std::size_t>(it - s.grid.begin())];
                        if (*it != x) ok = false;
                    }
                    worst = std::max(worst, std::fabs(sample(b, x) - zs));
                }
            }
        }
        ok = ok && worst <= 1e-4;
        return Outcome{ok, "largest z(0) " + fmt("%.4f", zmax) + ", largest gap " + fmt("%.2e", worst)};
    });

    report(10, "traveling-wave residual of profiles from criteria 1-4", [&] {
        double worst = 0.0;
        std::string at;
        for (const auto& r : g_profiles) {
            const ResidualReport rr = tws_residual(*r.model, r.profile);
            if (rr.max_residual > worst) {
                worst = rr.max_residual;
                at = r.what;
            }
        }
        return Outcome{worst <= 1e-3 && !g_profiles.empty(),
                       std::to_string(g_profiles.size()) + " profiles, max " + fmt("%.2e", worst) + " (" + at + ")"};
    });

    report(11, "byte-identical CLI output", [&] {
        const fs::path dir = fs::temp_directory_path() / ("swfront_accept_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        const fs::path toy_cfg = dir / "toy.json", d1_cfg = dir / "d1.json";
        std::ofstream(toy_cfg) << R"({"name": "linear_toy", "D": {"preset": "linear_toy"}})";
        std::ofstream(d1_cfg) << R"({"name": "d1", "D": "r", "f": "0", "g": "1 - r"})";
        struct Job {
            fs::path cfg;
            const char* cmd;
            double c;
        };
        std::vector<Job> jobs;
        for (double c : {-2.0, 0.0, 3.0}) {
            jobs.push_back({toy_cfg, "solve-z", c});
            jobs.push_back({toy_cfg, "profile", c});
        }
        for (double c : {1.0, 2.0, 3.0}) {
            jobs.push_back({d1_cfg, "solve-z", c});
            jobs.push_back({d1_cfg, "profile", c});
        }
        bool ok = true;
        int compared = 0;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            std::uint64_t h[2] = {0, 0};
            for (int rep = 0; rep < 2; ++rep) {
                const fs::path out = dir / ("out_" + std::to_string(i) + "_" + std::to_string(rep) + ".csv");
                const int code = cli({jobs[i].cmd, jobs[i].cfg.string(), "--c", fmt("%.17g", jobs[i].c), "--out",
                                      out.string()});
                if (code != 0) ok = false;
                h[rep] = fnv1a64(slurp(out));
            }
            ok = ok && h[0] == h[1];
            ++compared;
        }
        // sweep on the critical-speed config
        std::uint64_t hs[2] = {0, 0};
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path sd = dir / ("sweep_" + std::to_string(rep));
            fs::create_directories(sd);
            ok = ok && cli({"sweep", d1_cfg.string(), "--c-min", "1", "--c-max", "3", "--steps", "5", "--out-dir",
                            sd.string()}) == 0;
            std::string all;
            for (const char* name : {"summary.csv", "z_000.csv", "z_004.csv", "profile_002.csv"}) all += slurp(sd / name);
            hs[rep] = fnv1a64(all);
        }
        ok = ok && hs[0] == hs[1];
        std::error_code ec;
        fs::remove_all(dir, ec);
        return Outcome{ok, std::to_string(compared) + " CSV pairs plus one sweep compared by FNV-1a hash"};
    });

    std::printf("%d of 11 criteria failed\n", g_failed);
    return g_failed == 0 ? 0 : 1;
}
