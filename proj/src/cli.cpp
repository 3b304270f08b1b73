#include "swfront/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "swfront/config.hpp"
#include "swfront/errors.hpp"
#include "swfront/expr.hpp"
#include "swfront/oracle.hpp"
#include "swfront/profile.hpp"
#include "swfront/reduced_ode.hpp"
#include "swfront/sweep.hpp"
#include "swfront/threshold.hpp"

namespace swfront {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json num(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "infinity" : "-infinity";
    return x;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string hex64(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw ConfigError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string z_csv(const ZSolution& s) {
    // first row is the limit z(0+)
    std::string out = "phi,z\n0," + fmt17(s.z_at_zero) + "\n";
    for (std::size_t i = 0; i < s.grid.size(); ++i) out += fmt17(s.grid[i]) + "," + fmt17(s.values[i]) + "\n";
    return out;
}

std::string profile_csv(const Profile& p) {
    std::string out = "xi,phi\n";
    for (std::size_t i = 0; i < p.xi_grid.size(); ++i) {
        out += fmt17(p.xi_grid[i]) + "," + fmt17(p.phi_values[i]) + "\n";
    }
    return out;
}

const char* method_name(SolveMethod m) {
    switch (m) {
        case SolveMethod::Regularized: return "regularized";
        case SolveMethod::Shooting: return "shooting";
        case SolveMethod::FinalValue: return "final_value";
    }
    return "?";
}

json to_json(const ThresholdReport& r) {
    json ev = json::array();
    for (const auto& p : r.branch_evidence) {
        ev.push_back({{"c", num(p.c)}, {"z_at_zero", num(p.z_at_zero)}, {"dz_at_zero", num(p.dz_at_zero)},
                      {"is_zero", p.is_zero}});
    }
    return {{"bracket_lo", num(r.bracket_lo)}, {"bracket_hi", num(r.bracket_hi)}, {"c_star", num(r.c_star)},
            {"bisection_estimate", num(r.bisection_estimate)}, {"finite", r.finite},           {"iterations", r.iterations},     {"resolution", num(r.resolution)},
            {"tolerance", num(r.tolerance)}, {"branch_evidence", ev}};
}

json to_json(const ZSolution& s, const ZeroVerdict& v) {
    const auto& reg = s.regularization;
    return {{"c", num(s.c)},
            {"method", method_name(s.method)},
            {"points", s.grid.size()},
            {"z_at_zero", num(s.z_at_zero)},
            {"dz_at_zero", num(s.dz_at_zero)},
            {"truncated", s.truncated},
            {"shooting_join_gap", num(s.shooting_join_gap)},
            {"zero_at_zero",
             {{"is_zero", v.is_zero},
              {"magnitude_ok", v.magnitude_ok},
              {"discriminant_ok", v.discriminant_ok},
              {"matches_r_minus", v.matches_r_minus},
              {"matches_r_plus", v.matches_r_plus},
              {"both_roots_close", v.both_roots_close},
              {"threshold", num(v.threshold)}}},
            {"regularization",
             {{"n_final", reg.n_final},
              {"richardson_error", num(reg.richardson_error)},
              {"doublings", reg.doublings},
              {"order_estimate", num(reg.order_estimate)},
              {"monotone_violations", reg.monotone_violations},
              {"worst_monotone_drop", num(reg.worst_monotone_drop)}}}};
}

json to_json(const PlateauClass& p) {
    const auto& e = p.evidence;
    json vec = json::array();
    for (double x : e.increments) vec.push_back(num(x));
    return {{"kind", to_string(p.kind)},
            {"xi_bar", num(p.xi_bar)},
            {"evidence",
             {{"numeric", to_string(e.numeric)},
              {"analytic", to_string(e.analytic)},
              {"median_ratio", num(e.median_ratio)},
              {"fit_slope", num(e.fit_slope)},
              {"fit_r2", num(e.fit_r2)},
              {"linear_bound_L", num(e.linear_bound_L)},
              {"power_alpha", num(e.power_alpha)},
              {"increments", vec},
              {"note", e.note}}}};
}

json to_json(const SlopeReport& s) {
    return {{"measured", num(s.measured)},
            {"predicted", num(s.predicted)},
            {"rule_applied", to_string(s.rule_applied)},
            {"agreement", s.agreement}};
}

json to_json(const PastingReport& p) {
    return {{"c1_star", num(p.c1_star)},         {"c2_star", num(p.c2_star)},
            {"interval", {num(p.interval_lo), num(p.interval_hi)}},
            {"interval_empty", p.interval_empty}, {"feasible", p.feasible},
            {"sum_check", num(p.sum_check)},     {"sum_bound", num(p.sum_bound)},
            {"near_equality", p.near_equality},  {"tolerance", num(p.tolerance)}};
}

struct Context {
    std::string config_path;
    ModelConfig config;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

Context load(const std::string& path) {
    Context ctx;
    ctx.config_path = path;
    ctx.config = load_model_config(path);
    return ctx;
}

void write_manifest(const Context& ctx, const std::string& command, const fs::path& out, const json& args,
                    const std::vector<std::string>& outputs, const Model& model) {
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
    json m = {{"command", command},
              {"config_path", ctx.config_path},
              {"config_hash", "fnv1a64:" + hex64(fnv1a64(ctx.config.canonical))},
              {"tolerances", json::parse(tolerances_json(model.tol()))},
              {"tool_version", SWFRONT_VERSION},
              {"arguments", args},
              {"outputs", outputs},
              {"wall_time_s", wall},
              {"threads", sweep_threads()}};
    fs::path mp = out;
    mp += ".manifest.json";
    write_atomic(mp, m.dump(2) + "\n");
}

double critical_speed(const Model& model) {
    const auto cls = model.cls();
    if (cls != DiffusivityClass::D1 && cls != DiffusivityClass::D2) return std::numeric_limits<double>::infinity();
    return estimate_cstar(model).c_star;
}

int cmd_cstar(const std::string& path, double tol, const std::string& mode, std::ostream& out) {
    Context ctx = load(path);
    if (tol > 0.0) ctx.config.spec.tol.cstar_tol = tol;
    const Model model = Model::build(ctx.config.spec);
    const SearchMode m = mode == "multisection" ? SearchMode::ParallelMultisection : SearchMode::Bisection;
    json j = to_json(estimate_cstar(model, m));
    j["model"] = model.name();
    j["class"] = to_string(model.cls());
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_solve_z(const std::string& path, double c, const std::string& out_path, std::ostream& out) {
    const Context ctx = load(path);
    const Model model = Model::build(ctx.config.spec);
    const ZSolution s = solve_z(model, c);
    write_atomic(out_path, z_csv(s));
    write_manifest(ctx, "solve-z", out_path, {{"c", num(c)}}, {out_path}, model);
    json j = to_json(s, zero_at_zero(model, s));
    j["out"] = out_path;
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_profile(const std::string& path, double c, const std::string& direction, const std::string& out_path,
                std::ostream& out) {
    const Context ctx = load(path);
    const Model model = Model::build(ctx.config.spec);
    Profile p;
    SlopeReport slope;
    if (direction == "to") {
        // The to-profile is the mirror of the reflected model's from-profile.
        const Model refl = model.reflected();
        const ZSolution s = solve_z(refl, -c);
        slope = slope_at_contact(refl, s, critical_speed(refl));
        slope.measured = -slope.measured;
        slope.predicted = -slope.predicted;
        p = reflect_profile(model, c);
    } else {
        const ZSolution s = solve_z(model, c);
        slope = slope_at_contact(model, s, critical_speed(model));
        p = reconstruct_profile(model, s);
    }
    write_atomic(out_path, profile_csv(p));
    write_manifest(ctx, "profile", out_path, {{"c", num(c)}, {"direction", direction}}, {out_path}, model);
    const ResidualReport res = tws_residual(model, p);
    json j = {{"c", num(c)},
              {"direction", to_string(p.direction)},
              {"varpi", num(p.varpi)},
              {"xi_bar", num(p.xi_bar)},
              {"contact_slope", num(p.contact_slope)},
              {"attach", to_string(p.attach.kind)},
              {"points", p.xi_grid.size()},
              {"slope_report", to_json(slope)},
              {"residual", {{"max", num(res.max_residual)}, {"rms", num(res.rms_residual)}, {"points", res.points}}},
              {"out", out_path}};
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_classify(const std::string& path, double c, std::ostream& out) {
    const Context ctx = load(path);
    const Model model = Model::build(ctx.config.spec);
    json j = to_json(classify_plateau(model, solve_z(model, c)));
    j["c"] = num(c);
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_paste(const std::string& path, std::ostream& out) {
    const Context ctx = load(path);
    const Model model = Model::build(ctx.config.spec);
    out << to_json(pasting_feasibility(model)).dump(2) << "\n";
    return 0;
}

std::string indexed(const char* stem, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03zu.csv", stem, i);
    return buf;
}

int cmd_sweep(const std::string& path, double c_min, double c_max, int steps, const std::string& out_dir,
              std::ostream& out) {
    if (!(c_min <= c_max)) throw ParameterError("--c-min must not exceed --c-max");
    const Context ctx = load(path);
    const Model model = Model::build(ctx.config.spec);
    const auto speeds = sweep_speeds(c_min, c_max, steps);
    const int threads = sweep_threads();
    const auto pts = threads > 1 ? sweep_parallel(model, speeds, threads) : sweep_serial(model, speeds);

    const fs::path dir(out_dir);
    std::vector<std::string> outputs;
    const bool with_order = pts.size() > 1;
    std::string summary = with_order ? "c,z_at_zero,contact_slope,plateau,ordering_margin\n"
                                     : "c,z_at_zero,contact_slope,plateau\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        const fs::path zf = dir / indexed("z", i);
        const fs::path pf = dir / indexed("profile", i);
        write_atomic(zf, z_csv(p.zsol));
        write_atomic(pf, profile_csv(p.profile));
        outputs.push_back(zf.string());
        outputs.push_back(pf.string());
        summary += fmt17(p.c) + "," + fmt17(p.zsol.z_at_zero) + "," + fmt17(p.profile.contact_slope) + "," +
                   to_string(p.profile.attach.kind);
        if (with_order) summary += "," + (i == 0 ? std::string() : fmt17(p.ordering_margin));
        summary += "\n";
    }
    const fs::path sf = dir / "summary.csv";
    write_atomic(sf, summary);
    outputs.push_back(sf.string());
    write_manifest(ctx, "sweep", sf, {{"c_min", num(c_min)}, {"c_max", num(c_max)}, {"steps", steps}}, outputs,
                   model);
    json rows = json::array();
    for (const auto& p : pts) {
        rows.push_back({{"c", num(p.c)},
                        {"z_at_zero", num(p.zsol.z_at_zero)},
                        {"contact_slope", num(p.profile.contact_slope)},
                        {"plateau", to_string(p.profile.attach.kind)},
                        {"ordering_margin", num(p.ordering_margin)}});
    }
    out << json({{"summary", sf.string()}, {"rows", rows}}).dump(2) << "\n";
    return 0;
}

struct Check {
    std::string name;
    bool passed;
    json detail;
};

struct OracleRun {
    BruteForceResult result;
    long long n = 0;
    long long steps = 0;
    std::string failure;  // empty on success
};

// Largest regularization n that the fixed-step oracle survives. A small 1/n
// start needs a fine step to follow the transient next to rho_bar.
OracleRun brute_force_any(const Model& model, double c, double phi_stop) {
    struct Plan {
        long long n, steps, stride;
    };
    const Plan plan[] = {{1000000, 10000000, 10}, {200000, 50000000, 50}, {100000, 1000000, 1}, {10000, 1000000, 1}};
    OracleRun run;
    for (const auto& p : plan) {
        try {
            run.result = brute_force_fvp(model, c, p.n, p.steps, phi_stop, p.stride);
            run.n = p.n;
            run.steps = p.steps;
            run.failure.clear();
            return run;
        } catch (const OracleBlowup& e) {
            run.failure = e.what();
        }
    }
    return run;
}

int cmd_validate(const std::string& path, bool deep, std::ostream& out) {
    const Context ctx = load(path);
    const Model model = Model::build(ctx.config.spec);
    std::vector<Check> checks;
    checks.push_back({"model_valid", true, {{"class", to_string(model.cls())}}});

    const double cstar = critical_speed(model);
    const bool finite = std::isfinite(cstar);
    const std::vector<double> speeds = finite ? std::vector<double>{cstar - 1.0, cstar + 1.0}
                                              : std::vector<double>{-1.0, 0.0, 1.0};
    const auto pts = sweep_serial(model, speeds);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        const std::string at = "c=" + fmt17(p.c);
        const auto& reg = p.zsol.regularization;
        checks.push_back({"monotone_regularization " + at, reg.monotone_violations == 0,
                          {{"violations", reg.monotone_violations}}});
        bool negative = true;
        for (std::size_t k = 0; k + 1 < p.zsol.values.size(); ++k) negative = negative && p.zsol.values[k] < 0.0;
        checks.push_back({"z_negative " + at, negative, json::object()});
        bool mono = true;
        for (std::size_t k = 0; k + 1 < p.profile.phi_values.size(); ++k) {
            mono = mono && p.profile.phi_values[k + 1] < p.profile.phi_values[k] &&
                   p.profile.xi_grid[k + 1] > p.profile.xi_grid[k];
        }
        checks.push_back({"profile_monotone " + at, mono, json::object()});
        const ResidualReport res = tws_residual(model, p.profile);
        checks.push_back({"tws_residual " + at, res.max_residual <= 1e-3, {{"max", num(res.max_residual)}}});
        const SlopeReport sr = slope_at_contact(model, p.zsol, cstar);
        checks.push_back({"contact_slope " + at, sr.agreement, to_json(sr)});
        if (finite) {
            const bool expect_zero = p.c > cstar;
            checks.push_back({"zero_predicate " + at, zero_at_zero(model, p.zsol).is_zero == expect_zero,
                              {{"z_at_zero", num(p.zsol.z_at_zero)}}});
        }
        if (i > 0) {
            checks.push_back({"ordering " + at, p.ordering_passed, {{"worst_margin", num(p.ordering_margin)}}});
        }
    }

    if (deep) {
        std::vector<double> oracle_speeds = finite ? std::vector<double>{cstar - 1.0, cstar, cstar + 1.0} : speeds;
        for (double c : oracle_speeds) {
            const ZSolution s = solve_z(model, c);
            const bool touches = zero_at_zero(model, s).is_zero;
            // Stay clear of the point where z reaches zero; with a degenerate D
            // that point can sit well inside (0, rho_bar).
            double stop = 0.0;
            if (touches) {
                stop = model.rho_bar() / 64.0;
                for (std::size_t k = 0; k < s.grid.size(); ++k) {
                    if (s.values[k] <= -1e-3 * model.rho_bar()) {
                        stop = std::max(stop, s.grid[k]);
                        break;
                    }
                }
            }
            const OracleRun run = brute_force_any(model, c, stop);
            const double bound = std::max(1e-5, 20.0 * s.regularization.richardson_error);
            if (!run.failure.empty()) {
                checks.push_back({"oracle_agreement c=" + fmt17(c), false,
                                  {{"error", run.failure}, {"bound", num(bound)}, {"phi_stop", num(stop)}}});
                continue;
            }
            double gap = 0.0;
            for (std::size_t k = 0; k < s.grid.size(); ++k) {
                if (s.grid[k] < stop) continue;
                gap = std::max(gap, std::fabs(sample(run.result, s.grid[k]) - s.values[k]));
            }
            checks.push_back({"oracle_agreement c=" + fmt17(c), gap <= bound,
                              {{"gap", num(gap)},
                               {"bound", num(bound)},
                               {"n", run.n},
                               {"steps", run.steps},
                               {"phi_stop", num(stop)}}});
        }
    }

    bool all = true;
    json arr = json::array();
    for (const auto& c : checks) {
        all = all && c.passed;
        arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    out << json({{"passed", all}, {"c_star", num(cstar)}, {"checks", arr}}).dump(2) << "\n";
    return all ? 0 : 3;
}

void report(std::ostream& err, const std::string& kind, const std::string& message, int code, json extra = {}) {
    json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
    if (extra.is_object()) j.update(extra);
    err << j.dump() << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semi-wavefront analysis of rho_t + f(rho)_x = (D(rho) rho_x)_x + g(rho)", "swfront"};
    app.set_version_flag("--version", SWFRONT_VERSION);
    app.require_subcommand(1);

    std::string config;
    double c = kNaN, tol = 0.0, c_min = kNaN, c_max = kNaN;
    int steps = 0;
    std::string out_path, out_dir, direction = "from", mode = "bisection";
    bool deep = false;

    auto* cstar = app.add_subcommand("cstar", "critical speed c* as JSON");
    cstar->add_option("config", config, "model config (JSON)")->required();
    cstar->add_option("--tol", tol, "bracket width at which bisection stops");
    cstar->add_option("--mode", mode, "bisection or multisection")
        ->check(CLI::IsMember({"bisection", "multisection"}));

    auto* solve = app.add_subcommand("solve-z", "solve the reduced problem, write phi,z CSV");
    solve->add_option("config", config)->required();
    solve->add_option("--c", c, "wave speed")->required();
    solve->add_option("--out", out_path, "CSV output path")->required();

    auto* profile = app.add_subcommand("profile", "reconstruct the wave profile, write xi,phi CSV");
    profile->add_option("config", config)->required();
    profile->add_option("--c", c)->required();
    profile->add_option("--direction", direction)->check(CLI::IsMember({"from", "to"}));
    profile->add_option("--out", out_path)->required();

    auto* classify = app.add_subcommand("classify", "plateau classification at rho_bar");
    classify->add_option("config", config)->required();
    classify->add_option("--c", c)->required();

    auto* paste = app.add_subcommand("paste", "pasting feasibility of from/to profiles");
    paste->add_option("config", config)->required();

    auto* sweep = app.add_subcommand("sweep", "solve and reconstruct over a range of speeds");
    sweep->add_option("config", config)->required();
    sweep->add_option("--c-min", c_min)->required();
    sweep->add_option("--c-max", c_max)->required();
    sweep->add_option("--steps", steps)->required();
    sweep->add_option("--out-dir", out_dir)->required();

    auto* validate = app.add_subcommand("validate", "run the invariant suite on a model");
    validate->add_option("config", config)->required();
    validate->add_flag("--deep", deep, "include fixed-step oracle comparisons");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << SWFRONT_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        report(err, "UsageError", e.what(), 2);
        return 2;
    }

    try {
        if (*cstar) return cmd_cstar(config, tol, mode, out);
        if (*solve) return cmd_solve_z(config, c, out_path, out);
        if (*profile) return cmd_profile(config, c, direction, out_path, out);
        if (*classify) return cmd_classify(config, c, out);
        if (*paste) return cmd_paste(config, out);
        if (*sweep) return cmd_sweep(config, c_min, c_max, steps, out_dir, out);
        if (*validate) return cmd_validate(config, deep, out);
    } catch (const expr::SyntaxError& e) {
        report(err, e.kind(), e.what(), 2, {{"offset", e.offset()}, {"expected", e.expected()}});
        return 2;
    } catch (const expr::UnknownIdent& e) {
        report(err, e.kind(), e.what(), 2, {{"offset", e.offset()}, {"name", e.name()}});
        return 2;
    } catch (const JsonSyntaxError& e) {
        report(err, e.kind(), e.what(), 2, {{"byte", e.byte()}});
        return 2;
    } catch (const StepFloorError& e) {
        report(err, e.kind(), e.what(), 3, {{"phi", num(e.phi())}, {"stiffness", num(e.stiffness())}});
        return 3;
    } catch (const Error& e) {
        const int code = e.is_numerical() ? 3 : 2;
        report(err, e.kind(), e.what(), code);
        return code;
    } catch (const fs::filesystem_error& e) {
        report(err, "IOError", e.what(), 2);
        return 2;
    } catch (const std::exception& e) {
        report(err, "InternalError", e.what(), 3);
        return 3;
    }
    return 2;
}

}  // namespace swfront
