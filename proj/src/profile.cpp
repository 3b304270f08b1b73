#include "swfront/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "interp.hpp"
#include "swfront/errors.hpp"
#include "swfront/threshold.hpp"

namespace swfront {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// X(phi) = integral over (0, phi) of D/|z|, so that xi - varpi = -X.
class ContactIntegral {
public:
    ContactIntegral(const Model& model, const ZSolution& zsol) : model_(model) {
        const double rb = model.rho_bar();
        for (std::size_t i = 0; i < zsol.grid.size(); ++i) {
            const double x = zsol.grid[i], z = zsol.values[i];
            if (x >= rb) break;
            if (!(z < 0.0) || !std::isfinite(z)) {
                std::ostringstream os;
                os.precision(17);
                os << "solution value " << z << " at phi=" << x << " is not negative; cannot integrate D/z";
                throw QuadratureError(os.str());
            }
            x_.push_back(x);
            z_.push_back(z);
        }
        if (x_.size() < 3) throw QuadratureError("solution has fewer than three interior nodes");
        interp_ = std::make_unique<detail::Pchip>(x_, z_);
        cum_.assign(x_.size(), 0.0);
        cum_[0] = x_[0] * model.D()(x_[0]) / -z_[0];
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) cum_[i + 1] = cum_[i] + cell(x_[i], x_[i + 1]);
    }

    const std::vector<double>& nodes() const noexcept { return x_; }
    const std::vector<double>& values() const noexcept { return z_; }
    const std::vector<double>& cumulative() const noexcept { return cum_; }

    double operator()(double phi) const {
        if (phi <= x_.front()) return cum_[0] * (phi / x_.front());
        if (phi >= x_.back()) return cum_.back() + cell(x_.back(), phi);
        const auto it = std::lower_bound(x_.begin(), x_.end(), phi);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (*it == phi) return cum_[i];
        return cum_[i - 1] + cell(x_[i - 1], phi);
    }

private:
    double cell(double a, double b) const {
        if (b <= a) return 0.0;
        const auto& D = model_.D();
        const auto f = [&](double s) {
            const double z = (*interp_)(s);
            return D(s) / -z;
        };
        double out = 0.0;
        const Tolerances& tol = model_.tol();
        if (!detail::adaptive_simpson(f, a, b, tol.quad_rtol, tol.quad_max_depth, out) || !std::isfinite(out)) {
            std::ostringstream os;
            os.precision(17);
            os << "quadrature of D/z did not converge on [" << a << ", " << b << "]";
            throw QuadratureError(os.str());
        }
        return out;
    }

    const Model& model_;
    std::vector<double> x_, z_, cum_;
    std::unique_ptr<detail::Pchip> interp_;
};

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& r2) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    slope = sxy / sxx;
    r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 0.0;
}

// Verdict from g alone on [7 rho_bar / 8, rho_bar): a linear bound
// g <= L (rho_bar - rho) or a power bound g >= L (rho_bar - rho)^alpha, alpha < 1.
PlateauKind analytic_verdict(const Model& model, PlateauEvidence& ev) {
    const double rb = model.rho_bar();
    std::vector<double> ratio, gval;
    for (int k = 3; k <= 40; ++k) {
        const double u = std::ldexp(rb, -k);
        const double g = model.g()(rb - u);
        gval.push_back(g);
        ratio.push_back(g / u);
    }
    const std::size_t half = ratio.size() / 2;
    const double head = *std::max_element(ratio.begin(), ratio.begin() + static_cast<long>(half));
    const double tail = *std::max_element(ratio.begin() + static_cast<long>(half), ratio.end());
    ev.linear_bound_L = std::max(head, tail);
    double alpha = -kInf;
    for (std::size_t i = 7; i + 1 < gval.size(); ++i) {
        if (gval[i] <= 0.0 || gval[i + 1] <= 0.0) return PlateauKind::Undetermined;
        alpha = std::max(alpha, std::log2(gval[i] / gval[i + 1]));
    }
    ev.power_alpha = alpha;
    if (tail <= 1.25 * head) return PlateauKind::AsymptoticOnly;
    if (alpha <= 0.95) return PlateauKind::FiniteAttach;
    return PlateauKind::Undetermined;
}

PlateauClass classify_with(const Model& model, const ContactIntegral& X) {
    const Tolerances& tol = model.tol();
    const double rb = model.rho_bar();
    PlateauClass out;
    PlateauEvidence& ev = out.evidence;
    const double x_half = X(rb / 2);
    for (int k = 3; k <= tol.tail_k_max; ++k) {
        ev.k_values.push_back(k);
        ev.xi_tail.push_back(-(X(rb - std::ldexp(rb, -k)) - x_half));
    }
    for (std::size_t i = 0; i + 1 < ev.xi_tail.size(); ++i) ev.increments.push_back(ev.xi_tail[i + 1] - ev.xi_tail[i]);
    for (std::size_t i = 0; i + 1 < ev.increments.size(); ++i) {
        ev.ratios.push_back(ev.increments[i + 1] / ev.increments[i]);
    }

    const std::size_t nr = ev.ratios.size();
    const std::size_t take = std::min<std::size_t>(8, nr);
    std::vector<double> last(ev.ratios.end() - static_cast<long>(take), ev.ratios.end());
    ev.median_ratio = median_of(last);

    const std::size_t nfit = std::min<std::size_t>(10, ev.xi_tail.size());
    std::vector<double> kx, ky;
    for (std::size_t i = ev.xi_tail.size() - nfit; i < ev.xi_tail.size(); ++i) {
        kx.push_back(ev.k_values[i] * std::log(2.0));
        ky.push_back(ev.xi_tail[i]);
    }
    if (nfit >= 5) linear_fit(kx, ky, ev.fit_slope, ev.fit_r2);

    const double band = tol.plateau_ratio_band;
    const bool all_contracting =
        take > 0 && std::all_of(last.begin(), last.end(), [&](double r) { return r > 0.0 && r < 1.0 - band; });
    if (nfit >= 5 && std::fabs(ev.median_ratio - 1.0) <= band && ev.fit_r2 > tol.plateau_r2) {
        ev.numeric = PlateauKind::AsymptoticOnly;
    } else if (all_contracting) {
        ev.numeric = PlateauKind::FiniteAttach;
    }

    ev.analytic = analytic_verdict(model, ev);
    if (ev.numeric == ev.analytic) {
        out.kind = ev.numeric;
    } else {
        out.kind = PlateauKind::Undetermined;
        ev.note = std::string("numeric verdict ") + to_string(ev.numeric) + " and verdict from g " +
                  to_string(ev.analytic) + " disagree";
    }
    if (out.kind == PlateauKind::FiniteAttach) {
        // Sum the tail from the deepest geometric node the solution carries;
        // the ratio drifts slowly with k, so extrapolating from tail_k_max
        // alone misses part of it.
        std::vector<double> deep;
        for (int k = tol.tail_k_max; k <= 60; ++k) {
            const double x = rb - std::ldexp(rb, -k);
            if (x > X.nodes().back() || x >= rb) break;
            deep.push_back(-(X(x) - x_half));
        }
        double q = ev.median_ratio;
        double last = ev.xi_tail.back(), inc = ev.increments.back();
        if (deep.size() >= 4) {
            std::vector<double> r;
            for (std::size_t i = deep.size() - 3; i + 1 < deep.size(); ++i) {
                r.push_back((deep[i + 1] - deep[i]) / (deep[i] - deep[i - 1]));
            }
            const double qd = median_of(r);
            if (qd > 0.0 && qd < 1.0) {
                q = qd;
                last = deep.back();
                inc = deep.back() - deep[deep.size() - 2];
            }
        }
        out.xi_bar = last + inc * q / (1.0 - q);
    } else {
        out.xi_bar = -kInf;
    }
    return out;
}

}  // namespace

const char* to_string(PlateauKind k) {
    switch (k) {
        case PlateauKind::FiniteAttach: return "FiniteAttach";
        case PlateauKind::AsymptoticOnly: return "AsymptoticOnly";
        case PlateauKind::Undetermined: return "Undetermined";
    }
    return "?";
}

const char* to_string(Direction d) { return d == Direction::FromRhoBar ? "from_rho_bar" : "to_rho_bar"; }

const char* to_string(SlopeRule r) {
    switch (r) {
        case SlopeRule::D0Finite: return "D0-finite";
        case SlopeRule::D1Subcrit: return "D1-subcrit";
        case SlopeRule::D1Crit: return "D1-crit";
        case SlopeRule::D1Supercrit: return "D1-supercrit";
        case SlopeRule::D2SubcritOrCrit: return "D2-subcrit-or-crit";
        case SlopeRule::D2Supercrit: return "D2-supercrit";
        case SlopeRule::Dhat0Finite: return "Dhat0-finite";
        case SlopeRule::Dhat1Infinite: return "Dhat1-infinite";
    }
    return "?";
}

double measured_contact_slope(const Model& model, const ZSolution& zsol) {
    if (zsol.grid.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double x = zsol.grid.front();
    const double z = zsol.values.front();
    const double d = model.D()(x);
    double s = z / d;
    if (!std::isfinite(s) || std::fabs(s) > model.tol().slope_cap) return z < 0.0 ? -kInf : kInf;
    // A truncated solution starts well inside (0, rho_bar); carry z/D linearly
    // down to 0 using a node about twice as far out.
    if (zsol.truncated && x > 0.0) {
        const auto it = std::lower_bound(zsol.grid.begin(), zsol.grid.end(), 2.0 * x);
        if (it != zsol.grid.end()) {
            const auto j = static_cast<std::size_t>(it - zsol.grid.begin());
            const double sj = zsol.values[j] / model.D()(zsol.grid[j]);
            if (std::isfinite(sj)) s -= x * (sj - s) / (zsol.grid[j] - x);
        }
    }
    return s;
}

Profile reconstruct_profile(const Model& model, const ZSolution& zsol) {
    const ContactIntegral X(model, zsol);
    const double rb = model.rho_bar();
    Profile p;
    p.direction = Direction::FromRhoBar;
    p.c = zsol.c;
    p.varpi = X(rb / 2);
    p.attach = classify_with(model, X);
    p.contact_slope = measured_contact_slope(model, zsol);

    // Walk up from the contact point; nodes whose xi rounds onto the
    // previous one are dropped so xi stays strictly monotone.
    std::vector<double> xs{p.varpi}, phis{0.0}, rels{0.0};
    const auto& nodes = X.nodes();
    const auto& cum = X.cumulative();
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        const double xi = p.varpi - cum[j];
        if (!(xi < xs.back())) continue;
        xs.push_back(xi);
        phis.push_back(nodes[j]);
        rels.push_back(-cum[j]);
    }
    if (p.attach.kind == PlateauKind::FiniteAttach) {
        p.xi_bar = p.attach.xi_bar;
        if (p.xi_bar < xs.back()) {
            xs.push_back(p.xi_bar);
            phis.push_back(rb);
            rels.push_back(p.xi_bar - p.varpi);
        }
    } else {
        p.xi_bar = -kInf;
    }
    std::reverse(xs.begin(), xs.end());
    std::reverse(phis.begin(), phis.end());
    std::reverse(rels.begin(), rels.end());
    p.xi_grid = std::move(xs);
    p.phi_values = std::move(phis);
    p.xi_rel = std::move(rels);
    return p;
}

PlateauClass classify_plateau(const Model& model, const ZSolution& zsol) {
    const ContactIntegral X(model, zsol);
    return classify_with(model, X);
}

SlopeReport slope_at_contact(const Model& model, const ZSolution& zsol, double c_star) {
    SlopeReport rep;
    rep.measured = measured_contact_slope(model, zsol);
    const double c = zsol.c;
    const double h0 = model.h(0.0);
    const double g0 = model.g()(0.0);
    switch (model.cls()) {
        case DiffusivityClass::D0:
            rep.rule_applied = SlopeRule::D0Finite;
            rep.predicted = zsol.z_at_zero / model.D()(0.0);
            break;
        case DiffusivityClass::Dhat0:
            rep.rule_applied = SlopeRule::Dhat0Finite;
            rep.predicted = zsol.z_at_zero / model.D()(0.0);
            break;
        case DiffusivityClass::Dhat1:
            rep.rule_applied = SlopeRule::Dhat1Infinite;
            rep.predicted = -kInf;
            break;
        case DiffusivityClass::D1: {
            const double tol = cstar_tolerance(model, c_star);
            const double slope0 = model.classification().slope0;
            if (c < c_star - tol) {
                rep.rule_applied = SlopeRule::D1Subcrit;
                rep.predicted = -kInf;
            } else if (c <= c_star + tol) {
                // c* never lies below the lower analytic bound; clamp bisection noise.
                double lo = 0.0, hi = 0.0;
                cstar_bounds(model, lo, hi);
                rep.rule_applied = SlopeRule::D1Crit;
                rep.predicted = r_plus_minus(model, std::max(c_star, lo)).r_minus / slope0;
            } else {
                rep.rule_applied = SlopeRule::D1Supercrit;
                rep.predicted = r_plus_minus(model, c).r_plus / slope0;
            }
            break;
        }
        case DiffusivityClass::D2: {
            const double tol = cstar_tolerance(model, c_star);
            if (c <= c_star + tol) {
                rep.rule_applied = SlopeRule::D2SubcritOrCrit;
                rep.predicted = -kInf;
            } else {
                rep.rule_applied = SlopeRule::D2Supercrit;
                rep.predicted = -g0 / (c - h0);
            }
            break;
        }
    }
    const bool mi = std::isinf(rep.measured), pi = std::isinf(rep.predicted);
    if (mi || pi) {
        rep.agreement = mi && pi && (rep.measured > 0) == (rep.predicted > 0);
    } else {
        const double scale = rep.predicted != 0.0 ? std::fabs(rep.predicted) : 1.0;
        rep.agreement = std::fabs(rep.measured - rep.predicted) <= model.tol().slope_check_tol * scale;
    }
    return rep;
}

Profile reflect_profile(const Model& model, double c) {
    const Model refl = model.reflected();
    const Profile from = reconstruct_profile(refl, solve_z(refl, -c));
    Profile p;
    p.direction = Direction::ToRhoBar;
    p.c = c;
    p.varpi = -from.varpi;
    p.xi_bar = -from.xi_bar;
    p.contact_slope = -from.contact_slope;
    p.attach = from.attach;
    p.attach.xi_bar = -from.attach.xi_bar;
    const std::size_t n = from.xi_grid.size();
    for (std::size_t j = n; j-- > 0;) {
        p.xi_grid.push_back(-from.xi_grid[j]);
        p.phi_values.push_back(from.phi_values[j]);
        p.xi_rel.push_back(-from.xi_rel[j]);
    }
    return p;
}

OrderingReport ordering_check(const Profile& p1, const Profile& p2) {
    OrderingReport rep;
    const Profile* a = &p1;
    const Profile* b = &p2;
    if (p1.direction != p2.direction) {
        rep.note = "profiles have different directions; no ordering claim";
        rep.degenerate = true;
        return rep;
    }
    if (p1.c == p2.c) {
        rep.c1 = rep.c2 = p1.c;
        rep.degenerate = true;
        rep.note = "equal speeds; no ordering claim";
        return rep;
    }
    if (p1.c > p2.c) {
        std::swap(a, b);
        rep.swapped = true;
        rep.note = "inputs swapped so that c1 < c2";
    }
    rep.c1 = a->c;
    rep.c2 = b->c;

    // Both profiles sit on the same solver nodes, so equal phi levels match
    // exactly. With both contact points moved to 0, phi_2 < phi_1 for
    // decreasing profiles and phi_1 < phi_2 for increasing ones. Either way
    // xi_rel_1 > xi_rel_2 at every shared level.
    std::map<double, double> level2;
    double top = 0.0;
    for (std::size_t i = 0; i < b->phi_values.size(); ++i) {
        level2.emplace(b->phi_values[i], b->xi_rel[i]);
        top = std::max(top, b->phi_values[i]);
    }
    for (double v : a->phi_values) top = std::max(top, v);
    rep.worst_margin = kInf;
    for (std::size_t i = 0; i < a->phi_values.size(); ++i) {
        const double phi = a->phi_values[i];
        if (phi <= 0.0 || phi >= top) continue;
        const auto it = level2.find(phi);
        if (it == level2.end()) continue;
        const double margin = a->xi_rel[i] - it->second;
        ++rep.points_compared;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_phi = phi;
        }
    }
    if (rep.points_compared == 0) {
        rep.worst_margin = 0.0;
        rep.note += rep.note.empty() ? "no shared levels" : "; no shared levels";
        return rep;
    }
    rep.passed = rep.worst_margin > 0.0;
    return rep;
}

ResidualReport tws_residual(const Model& model, const Profile& profile) {
    const auto& xi = profile.xi_rel;
    const auto& phi = profile.phi_values;
    const double rb = model.rho_bar();
    int interior = 0;
    for (double v : phi) interior += (v > 0.0 && v < rb) ? 1 : 0;
    if (interior < 5 || xi.size() < 5) {
        throw PreconditionError("tws_residual needs at least 5 interior points with 0 < phi < rho_bar, got " +
                                std::to_string(interior));
    }
    const double lo = *std::min_element(xi.begin(), xi.end());
    const double hi = *std::max_element(xi.begin(), xi.end());
    const double cut = 0.05 * (hi - lo);
    const double c = profile.c;
    const double gmax = model.bounds().max_g;
    const auto& D = model.D();
    ResidualReport rep;
    double sum2 = 0.0;
    // Differences are taken in xi - varpi, which keeps full precision next to
    // the contact point; a common shift of xi_grid drops out.
    for (std::size_t i = 1; i + 1 < xi.size(); ++i) {
        if (std::min(xi[i] - lo, hi - xi[i]) < cut) continue;
        const double hl = xi[i] - xi[i - 1];
        const double hr = xi[i + 1] - xi[i];
        const double pl = phi[i - 1], p0 = phi[i], pr = phi[i + 1];
        const double dphi = (hl * hl * pr - hr * hr * pl + (hr * hr - hl * hl) * p0) / (hl * hr * (hl + hr));
        const double flux_r = D(0.5 * (p0 + pr)) * (pr - p0) / hr;
        const double flux_l = D(0.5 * (pl + p0)) * (p0 - pl) / hl;
        const double diff = (flux_r - flux_l) / (0.5 * (hl + hr));
        const double r = std::fabs(diff + (c - model.h(p0)) * dphi + model.g()(p0)) / gmax;
        ++rep.points;
        sum2 += r * r;
        if (r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst_xi = profile.varpi + xi[i];
        }
    }
    if (rep.points > 0) rep.rms_residual = std::sqrt(sum2 / rep.points);
    return rep;
}

}  // namespace swfront
