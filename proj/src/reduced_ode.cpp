#include "swfront/reduced_ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reduced_internal.hpp"
#include "swfront/errors.hpp"

namespace swfront {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTailZ = 1e-9;
constexpr double kTailStiffness = 1e3;

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

// Within ~1/n of rho_bar the regularized runs do not resolve the boundary
// layer. Beyond `cut` the limit is replaced by the power law z ~ -C u^e,
// u = rho_bar - phi, fitted through the last two converged nodes.
void close_tail(const std::vector<double>& nodes, std::vector<double>& R, double cut, double rb) {
    std::size_t i_cut = 0;
    while (i_cut < nodes.size() && nodes[i_cut] <= cut) ++i_cut;
    if (i_cut < 2 || i_cut >= nodes.size()) return;
    const double u1 = rb - nodes[i_cut - 1];
    const double u2 = rb - nodes[i_cut - 2];
    const double z1 = R[i_cut - 1];
    const double z2 = R[i_cut - 2];
    if (!(z1 < 0.0 && z2 < 0.0)) return;
    const double e = std::clamp(std::log(z2 / z1) / std::log(u2 / u1), 0.25, 4.0);
    for (std::size_t i = i_cut; i < nodes.size(); ++i) {
        const double u = rb - nodes[i];
        R[i] = u > 0.0 ? z1 * std::pow(u / u1, e) : 0.0;
    }
}

}  // namespace

std::vector<double> solver_grid(double rho_bar) {
    std::vector<double> g;
    g.reserve(2048 + 319 + 29);
    for (int i = 1; i <= 2048; ++i) g.push_back(rho_bar * i / 2048.0);
    for (int k = 12; k <= 330; ++k) g.push_back(std::ldexp(rho_bar, -k));
    for (int k = 12; k <= 40; ++k) g.push_back(rho_bar - std::ldexp(rho_bar, -k));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

bool quadratic_roots(double h0, double c, double dDg0, double& r_minus, double& r_plus) {
    const double a = h0 - c;
    double disc = a * a - 4.0 * dDg0;
    if (disc < 0.0) {
        if (disc < -1e-12 * (a * a + 4.0 * std::fabs(dDg0))) return false;
        disc = 0.0;
    }
    const double sq = std::sqrt(disc);
    if (a < 0.0) {
        r_minus = 0.5 * (a - sq);
        r_plus = r_minus != 0.0 ? dDg0 / r_minus : 0.0;
    } else if (a > 0.0) {
        r_plus = 0.5 * (a + sq);
        r_minus = r_plus != 0.0 ? dDg0 / r_plus : 0.0;
    } else {
        r_minus = -0.5 * sq;
        r_plus = 0.5 * sq;
    }
    return true;
}

namespace detail {

Sweep backward_sweep(const ReducedRhs& rhs, const std::vector<double>& nodes, int top, double z_top,
                     const Tolerances& tol, int floor_index) {
    Sweep s;
    s.values.assign(nodes.size(), kNaN);
    s.values[static_cast<std::size_t>(top)] = z_top;
    s.lowest = top;
    Stepper stepper(rhs, tol, rhs.model->rho_bar());
    double z = z_top;
    for (int i = top; i > floor_index; --i) {
        const auto r = stepper.advance(nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(i - 1)], z);
        z = r.z;
        s.values[static_cast<std::size_t>(i - 1)] = z;
        s.lowest = i - 1;
        const double phi = nodes[static_cast<std::size_t>(i - 1)];
        if (r.status == AdvanceStatus::HitZero) {
            s.truncated = true;
            break;
        }
        const double az = std::fabs(z);
        if (az < tol.underflow_z || (az < kTailZ && phi * rhs.jac(phi, z) > kTailStiffness)) {
            s.truncated = i - 1 > floor_index;
            break;
        }
    }
    return s;
}

void finalize_endpoint(const Model& model, ZSolution& sol) {
    ReducedRhs rhs{&model, sol.c, false};
    const std::size_t n = sol.grid.size();
    if (n == 0) return;
    sol.z_at_zero = sol.values[0];
    if (sol.truncated) {
        // Below the cut z lies on the slow manifold next to z = 0; use the
        // secant to the origin rather than the stiff right-hand side.
        sol.dz_at_zero = sol.values[0] / sol.grid[0];
        return;
    }
    double s[3] = {0.0, 0.0, 0.0};
    const std::size_t m = std::min<std::size_t>(3, n);
    for (std::size_t j = 0; j < m; ++j) s[j] = rhs(sol.grid[j], sol.values[j]);
    const double cap = model.tol().slope_cap;
    if (m == 3 && s[0] < 0.0 && std::fabs(s[2]) > cap && std::fabs(s[1]) > std::fabs(s[2]) &&
        std::fabs(s[0]) > std::fabs(s[1])) {
        sol.dz_at_zero = -kInf;
    } else {
        sol.dz_at_zero = s[0];
    }
}

ZSolution regularized_limit(const Model& model, double c, const std::vector<double>& nodes) {
    const Tolerances& tol = model.tol();
    const double rb = model.rho_bar();
    const int top = static_cast<int>(nodes.size()) - 1;
    ReducedRhs rhs{&model, c, false};

    std::vector<Sweep> runs;
    std::vector<long long> ns;
    std::vector<std::vector<double>> extrap;  // R_k on all nodes (NaN where undefined)
    std::vector<int> extrap_low;
    Regularization reg;
    std::vector<double> last_orders;

    auto common_low = [&](std::size_t from, std::size_t to) {
        int low = 0;
        for (std::size_t k = from; k <= to; ++k) low = std::max(low, runs[k].lowest);
        return low;
    };

    const double cut = rb - std::ldexp(rb, -20);
    for (int k = 0; k <= tol.bvp_max_doublings; ++k) {
        const long long n = static_cast<long long>(tol.bvp_n0) << k;
        ns.push_back(n);
        runs.push_back(backward_sweep(rhs, nodes, top, -1.0 / static_cast<double>(n), tol));

        if (k >= 1) {
            const auto& a = runs[runs.size() - 2].values;
            const auto& b = runs.back().values;
            const int low = common_low(runs.size() - 2, runs.size() - 1);
            for (int i = low; i <= top; ++i) {
                const double drop = b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)];
                if (drop < -tol.monotone_slack * (1.0 + std::fabs(a[static_cast<std::size_t>(i)]))) {
                    ++reg.monotone_violations;
                    reg.worst_monotone_drop = std::min(reg.worst_monotone_drop, drop);
                }
            }
        }
        if (k < 2) continue;

        const std::size_t K = runs.size() - 1;
        const int low = common_low(K - 2, K);
        std::vector<double> R(nodes.size(), kNaN);
        last_orders.clear();
        for (int i = low; i <= top; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            const double z0 = runs[K - 2].values[u];
            const double z1 = runs[K - 1].values[u];
            const double z2 = runs[K].values[u];
            const double d1 = z1 - z0;
            const double d2 = z2 - z1;
            double p = 1.0;
            if (std::fabs(d2) > 1e-14 * (1.0 + std::fabs(z2)) && d1 / d2 > 1.0) {
                p = std::clamp(std::log2(d1 / d2), 1.0, 8.0);
                if (nodes[u] < cut) last_orders.push_back(p);
            }
            R[u] = z2 + d2 / (std::exp2(p) - 1.0);
        }
        extrap.push_back(std::move(R));
        extrap_low.push_back(low);
        if (extrap.size() < 2) continue;

        auto& Rk = extrap.back();
        const auto& Rp = extrap[extrap.size() - 2];
        const int clow = std::max(extrap_low.back(), extrap_low[extrap_low.size() - 2]);
        double gap = 0.0;
        for (int i = clow; i <= top; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            if (nodes[u] > cut) continue;
            gap = std::max(gap, std::fabs(Rk[u] - Rp[u]));
        }
        if (gap < tol.bvp_seq_tol) {
            ZSolution sol;
            sol.c = c;
            sol.model_id = model.name();
            sol.method = SolveMethod::Regularized;
            const int flow = extrap_low.back();
            sol.truncated = runs.back().truncated || flow > 0;
            close_tail(nodes, Rk, cut, rb);
            for (int i = flow; i <= top; ++i) {
                sol.grid.push_back(nodes[static_cast<std::size_t>(i)]);
                sol.values.push_back(Rk[static_cast<std::size_t>(i)]);
            }
            reg.n_final = static_cast<int>(n);
            reg.richardson_error = gap;
            reg.doublings = k;
            reg.order_estimate = median(last_orders);
            reg.n_values = ns;
            for (const auto& r : runs) {
                std::vector<double> v;
                for (int i = flow; i <= top; ++i) v.push_back(r.values[static_cast<std::size_t>(i)]);
                reg.iterates.push_back(std::move(v));
            }
            sol.regularization = std::move(reg);
            return sol;
        }
    }
    throw NoConvergence("regularized sequence did not settle after " + std::to_string(tol.bvp_max_doublings) +
                        " doublings at c=" + std::to_string(c));
}

}  // namespace detail

ZSolution integrate_fvp(const Model& model, double c, double phi_end, double z_end) {
    if (!(z_end < 0.0)) throw PreconditionError("integrate_fvp needs z_end < 0");
    const double rb = model.rho_bar();
    if (!(phi_end > 0.0 && phi_end <= rb)) throw PreconditionError("phi_end must lie in (0, rho_bar]");
    std::vector<double> nodes;
    for (double x : solver_grid(rb)) {
        if (x < phi_end) nodes.push_back(x);
    }
    nodes.push_back(phi_end);
    detail::ReducedRhs rhs{&model, c, false};
    const int top = static_cast<int>(nodes.size()) - 1;
    const auto sw = detail::backward_sweep(rhs, nodes, top, z_end, model.tol());
    ZSolution sol;
    sol.c = c;
    sol.model_id = model.name();
    sol.method = SolveMethod::FinalValue;
    sol.truncated = sw.truncated;
    for (int i = sw.lowest; i <= top; ++i) {
        sol.grid.push_back(nodes[static_cast<std::size_t>(i)]);
        sol.values.push_back(sw.values[static_cast<std::size_t>(i)]);
    }
    detail::finalize_endpoint(model, sol);
    return sol;
}

IVPResult integrate_ivp(const Model& model, double c, double phi_start, double z0, double phi_right) {
    if (!(z0 < 0.0)) throw PreconditionError("integrate_ivp needs z0 < 0");
    const double rb = model.rho_bar();
    if (!(phi_start >= 0.0 && phi_start < phi_right && phi_right <= rb)) {
        throw PreconditionError("integrate_ivp needs 0 <= phi_start < phi_right <= rho_bar");
    }
    const double guard = phi_right >= rb ? std::ldexp(rb, -30) : 0.0;
    const double last = phi_right - guard;
    std::vector<double> nodes{phi_start};
    for (double x : solver_grid(rb)) {
        if (x > phi_start && x < last) nodes.push_back(x);
    }
    nodes.push_back(last);

    detail::ReducedRhs rhs{&model, c, false};
    detail::Stepper stepper(rhs, model.tol(), rb);
    IVPResult res;
    res.grid.push_back(phi_start);
    res.values.push_back(z0);
    double z = z0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const auto r = stepper.advance(nodes[i], nodes[i + 1], z);
        z = r.z;
        res.grid.push_back(r.x);
        res.values.push_back(z);
        if (r.status == detail::AdvanceStatus::HitZero) {
            res.beta = r.x;
            if (guard > 0.0 && phi_right - r.x <= 2.0 * guard) {
                res.terminated = Termination::ReachedRightEnd;
                res.z_right = 0.0;
                res.grid.push_back(phi_right);
                res.values.push_back(0.0);
            } else {
                res.terminated = Termination::HitZero;
            }
            return res;
        }
    }
    res.terminated = Termination::ReachedRightEnd;
    res.beta = phi_right;
    res.z_right = guard > 0.0 ? z + guard * rhs(last, z) : z;
    if (guard > 0.0) {
        res.grid.push_back(phi_right);
        res.values.push_back(std::min(res.z_right, 0.0));
    }
    return res;
}

ZSolution solve_singular_bvp(const Model& model, double c) {
    switch (model.cls()) {
        case DiffusivityClass::D0:
        case DiffusivityClass::D1:
        case DiffusivityClass::D2: break;
        default:
            throw PreconditionError(std::string("solve_singular_bvp does not handle class ") +
                                    to_string(model.cls()) + "; use shoot_infinite_slope");
    }
    ZSolution sol = detail::regularized_limit(model, c, solver_grid(model.rho_bar()));
    detail::finalize_endpoint(model, sol);
    return sol;
}

ZSolution solve_z(const Model& model, double c) {
    switch (model.cls()) {
        case DiffusivityClass::Dhat0:
        case DiffusivityClass::Dhat1: return shoot_infinite_slope(model, c);
        default: return solve_singular_bvp(model, c);
    }
}

ZeroVerdict zero_at_zero(const Model& model, const ZSolution& sol) {
    const Tolerances& tol = model.tol();
    ZeroVerdict v;
    v.threshold = std::max(tol.zero_detect_tol, 10.0 * sol.regularization.richardson_error);
    v.magnitude_ok = std::fabs(sol.z_at_zero) < v.threshold;
    const auto cls = model.cls();
    if (cls != DiffusivityClass::D1 && cls != DiffusivityClass::D2) {
        v.discriminant_ok = true;
        v.is_zero = v.magnitude_ok;
        return v;
    }
    const double dDg0 = cls == DiffusivityClass::D1 ? model.classification().slope0 * model.g()(0.0) : 0.0;
    double rm = 0.0, rp = 0.0;
    v.discriminant_ok = quadratic_roots(model.h(0.0), sol.c, dDg0, rm, rp);
    if (v.discriminant_ok && std::isfinite(sol.dz_at_zero)) {
        auto match = [&](double r) {
            return std::fabs(sol.dz_at_zero - r) <= tol.slope_check_tol * std::max(1.0, std::fabs(r));
        };
        v.matches_r_minus = match(rm);
        v.matches_r_plus = match(rp);
        v.both_roots_close = std::fabs(rp - rm) <= 2.0 * tol.slope_check_tol * std::max(1.0, std::fabs(rm));
    }
    v.is_zero = v.magnitude_ok && v.discriminant_ok && (v.matches_r_minus || v.matches_r_plus);
    return v;
}

}  // namespace swfront
