#include "swfront/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include <omp.h>

#include "swfront/errors.hpp"
#include "swfront/reduced_ode.hpp"

namespace swfront {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool finite_threshold_class(DiffusivityClass c) {
    return c == DiffusivityClass::D1 || c == DiffusivityClass::D2;
}

double dDg0(const Model& model) {
    return model.cls() == DiffusivityClass::D1 ? model.classification().slope0 * model.g()(0.0) : 0.0;
}

Probe probe(const Model& model, double c) {
    const ZSolution sol = solve_z(model, c);
    const ZeroVerdict v = zero_at_zero(model, sol);
    return {c, sol.z_at_zero, sol.dz_at_zero, v.is_zero};
}

std::string describe(const std::vector<Probe>& probes) {
    std::ostringstream os;
    os.precision(10);
    for (const auto& p : probes) os << " [c=" << p.c << " z0=" << p.z_at_zero << " zero=" << p.is_zero << "]";
    return os.str();
}

void check_monotone(std::vector<Probe> probes) {
    std::sort(probes.begin(), probes.end(), [](const Probe& a, const Probe& b) { return a.c < b.c; });
    int flips = 0;
    for (std::size_t i = 1; i < probes.size(); ++i) {
        if (probes[i].is_zero != probes[i - 1].is_zero) ++flips;
    }
    if (flips != 1 || probes.front().is_zero) {
        throw InconsistentPredicate("z(0+)=0 predicate is not monotone in c across probes:" + describe(probes));
    }
}

}  // namespace

void cstar_bounds(const Model& model, double& lo, double& hi) {
    if (!finite_threshold_class(model.cls())) {
        throw PreconditionError(std::string("c* bounds need class D1 or D2, got ") + to_string(model.cls()));
    }
    lo = 2.0 * std::sqrt(dDg0(model)) + model.h(0.0);
    hi = 2.0 * std::sqrt(model.bounds().sup_Dg_over_s) + model.bounds().max_h;
}

double cstar_tolerance(const Model& model, double hi) {
    const double t = model.tol().cstar_tol;
    return t > 0.0 ? t : 2.5e-4 * (1.0 + std::fabs(hi));
}

ThresholdReport estimate_cstar(const Model& model, SearchMode mode) {
    ThresholdReport rep;
    if (!finite_threshold_class(model.cls())) {
        rep.bracket_lo = kNaN;
        rep.bracket_hi = kNaN;
        rep.c_star = kInf;
        rep.bisection_estimate = kInf;
        rep.finite = false;
        return rep;
    }
    cstar_bounds(model, rep.bracket_lo, rep.bracket_hi);
    const double pad = 0.1 * (1.0 + rep.bracket_hi - rep.bracket_lo);
    double a = rep.bracket_lo - pad;
    double b = rep.bracket_hi + pad;
    rep.tolerance = cstar_tolerance(model, rep.bracket_hi);

    auto& log = rep.branch_evidence;
    log.push_back(probe(model, a));
    log.push_back(probe(model, b));
    if (log[0].is_zero || !log[1].is_zero) {
        throw InconsistentPredicate("bracket endpoints do not straddle c*:" + describe(log));
    }

    if (mode == SearchMode::Bisection) {
        while (b - a >= rep.tolerance) {
            const double m = 0.5 * (a + b);
            log.push_back(probe(model, m));
            (log.back().is_zero ? b : a) = m;
            ++rep.iterations;
        }
    } else {
        const int k = std::max(3, omp_get_max_threads());
        std::vector<Probe> round(static_cast<std::size_t>(k));
        while (b - a >= rep.tolerance) {
            const double width = b - a;
            std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k));
#pragma omp parallel for schedule(dynamic, 1)
            for (int i = 0; i < k; ++i) {
                const auto u = static_cast<std::size_t>(i);
                try {
                    round[u] = probe(model, a + width * (i + 1) / (k + 1));
                } catch (...) {
                    errors[u] = std::current_exception();
                }
            }
            for (const auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
            double na = a, nb = b;
            for (const auto& p : round) {
                log.push_back(p);
                if (p.is_zero) {
                    nb = std::min(nb, p.c);
                } else {
                    na = std::max(na, p.c);
                }
            }
            a = na;
            b = nb;
            ++rep.iterations;
        }
    }
    check_monotone(log);
    rep.bisection_estimate = 0.5 * (a + b);
    // c* lies in [lo, hi] by the analytic bounds, so narrow the bracket to it
    // when they overlap.
    const double na = std::max(a, rep.bracket_lo);
    const double nb = std::min(b, rep.bracket_hi);
    if (na <= nb) {
        a = na;
        b = nb;
    }
    rep.c_star = 0.5 * (a + b);
    rep.resolution = b - a;
    rep.finite = true;
    return rep;
}

RootPair r_plus_minus(const Model& model, double c) {
    if (!finite_threshold_class(model.cls())) {
        throw PreconditionError(std::string("r+- needs class D1 or D2, got ") + to_string(model.cls()));
    }
    RootPair r;
    if (!quadratic_roots(model.h(0.0), c, dDg0(model), r.r_minus, r.r_plus)) {
        std::ostringstream os;
        os.precision(17);
        os << "negative discriminant at c=" << c << " (c lies below 2 sqrt(D'(0) g(0)) + h(0))";
        throw DomainError(os.str());
    }
    return r;
}

PastingReport pasting_feasibility(const Model& model) {
    if (!finite_threshold_class(model.cls())) {
        throw PreconditionError(std::string("pasting analysis needs class D1 or D2, got ") +
                                to_string(model.cls()));
    }
    PastingReport rep;
    const ThresholdReport t1 = estimate_cstar(model);
    const ThresholdReport t2 = estimate_cstar(model.reflected());
    rep.c1_star = t1.c_star;
    rep.c2_star = t2.c_star;
    rep.interval_lo = rep.c1_star;
    rep.interval_hi = -rep.c2_star;
    rep.interval_empty = rep.interval_lo > rep.interval_hi;
    rep.sum_check = rep.c1_star + rep.c2_star;
    rep.sum_bound = 4.0 * std::sqrt(dDg0(model));
    rep.tolerance = std::max(t1.tolerance, t2.tolerance);
    rep.near_equality = model.cls() == DiffusivityClass::D2 && std::fabs(rep.sum_check) < 2.0 * rep.tolerance;
    rep.feasible = !rep.interval_empty && !rep.near_equality;
    return rep;
}

}  // namespace swfront
