#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "reduced_internal.hpp"
#include "swfront/errors.hpp"
#include "swfront/reduced_ode.hpp"

namespace swfront {

namespace {

enum class Outcome { Low, High, Accept };

const char* name(Outcome o) {
    switch (o) {
        case Outcome::Low: return "too low (z(rho_bar) < -shoot_tol)";
        case Outcome::High: return "too high (hits zero early)";
        case Outcome::Accept: return "accepted";
    }
    return "?";
}

Outcome classify(const IVPResult& r, double shoot_tol) {
    if (r.terminated == Termination::HitZero) return Outcome::High;
    if (r.z_right < -shoot_tol) return Outcome::Low;
    if (r.z_right > shoot_tol) return Outcome::High;
    return Outcome::Accept;
}

// Upper end of the bracket: value at 0 of the lower solution built from a
// damped oscillation on [0, eps], where eps is the largest solver node below
// rho_bar/2 such that D g (s) > N^2 s / 4 for every node s <= eps.
double high_bracket(const Model& model, double c, const std::vector<double>& nodes) {
    const double Mc = std::max(c - model.bounds().min_h, 0.0) + 1.0;
    const double N = 2.0 * Mc;
    const double a = std::sqrt(N * N - Mc * Mc) / 2.0;
    const double tbar = (std::atan(-2.0 * a / Mc) + std::numbers::pi) / a;
    double eps = 0.0;
    for (double s : nodes) {
        if (s > model.rho_bar() / 2) break;
        if (model.D()(s) * model.g()(s) > N * N * s / 4.0) {
            eps = s;
        } else {
            break;
        }
    }
    if (eps == 0.0) {
        throw BracketError("no interval near 0 where D g exceeds the comparison parabola; cannot bracket z(0)");
    }
    return -eps * std::exp(-Mc * tbar / 2.0) * (Mc * Mc / (4.0 * a) + a) * std::sin(a * tbar);
}

}  // namespace

ZSolution shoot_infinite_slope(const Model& model, double c) {
    const auto cls = model.cls();
    if (cls != DiffusivityClass::Dhat0 && cls != DiffusivityClass::Dhat1) {
        throw PreconditionError(std::string("shoot_infinite_slope needs class Dhat0 or Dhat1, got ") +
                                to_string(cls) + "; use solve_singular_bvp");
    }
    const Tolerances& tol = model.tol();
    const double rb = model.rho_bar();
    const auto nodes = solver_grid(rb);

    double lo = -1.0 - rb * (model.bounds().H(c) + model.bounds().M) - 1.0;
    double hi = high_bracket(model, c, nodes);
    auto run = [&](double alpha) { return integrate_ivp(model, c, 0.0, alpha, rb); };

    const Outcome o_lo = classify(run(lo), tol.shoot_tol);
    const Outcome o_hi = classify(run(hi), tol.shoot_tol);
    double alpha = 0.0;
    if (o_lo == Outcome::Accept) {
        alpha = lo;
    } else if (o_hi == Outcome::Accept) {
        alpha = hi;
    } else if (o_lo != Outcome::Low || o_hi != Outcome::High || !(lo < hi)) {
        std::ostringstream os;
        os.precision(17);
        os << "analytic bracket does not straddle z(0): alpha_lo=" << lo << " is " << name(o_lo)
           << ", alpha_hi=" << hi << " is " << name(o_hi);
        throw BracketError(os.str());
    } else {
        alpha = 0.5 * (lo + hi);
        for (int it = 0; it < tol.shoot_max_iter; ++it) {
            alpha = 0.5 * (lo + hi);
            if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(lo), std::fabs(hi))) {
                break;
            }
            const Outcome o = classify(run(alpha), tol.shoot_tol);
            if (o == Outcome::Accept) break;
            (o == Outcome::High ? hi : lo) = alpha;
        }
    }

    // The forward run is reliable away from the saddle at rho_bar; the upper
    // half comes from the backward regularized limit, which is stable there.
    const double join = rb / 2;
    const IVPResult fwd = integrate_ivp(model, c, 0.0, alpha, join);
    if (fwd.terminated != Termination::ReachedRightEnd) {
        throw NoConvergence("accepted shooting value hits zero before rho_bar/2");
    }
    std::vector<double> upper;
    for (double x : nodes) {
        if (x >= join) upper.push_back(x);
    }
    ZSolution back = detail::regularized_limit(model, c, upper);

    ZSolution sol;
    sol.c = c;
    sol.model_id = model.name();
    sol.method = SolveMethod::Shooting;
    for (std::size_t i = 0; i + 1 < fwd.grid.size(); ++i) {
        sol.grid.push_back(fwd.grid[i]);
        sol.values.push_back(fwd.values[i]);
    }
    sol.shooting_join_gap = std::fabs(fwd.values.back() - back.values.front());
    sol.grid.insert(sol.grid.end(), back.grid.begin(), back.grid.end());
    sol.values.insert(sol.values.end(), back.values.begin(), back.values.end());
    sol.regularization = std::move(back.regularization);
    sol.z_at_zero = alpha;
    detail::ReducedRhs rhs{&model, c, false};
    sol.dz_at_zero = rhs(0.0, alpha);
    return sol;
}

}  // namespace swfront
