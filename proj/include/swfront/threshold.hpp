#pragma once

#include <vector>

#include "swfront/model.hpp"

namespace swfront {

struct Probe {
    double c = 0.0;
    double z_at_zero = 0.0;
    double dz_at_zero = 0.0;
    bool is_zero = false;
};

struct ThresholdReport {
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double c_star = 0.0;        // +infinity when z(0+) < 0 for every c
    double bisection_estimate = 0.0;  // bracket midpoint before clipping to [lo, hi]
    bool finite = false;
    int iterations = 0;
    double resolution = 0.0;    // final bracket width
    double tolerance = 0.0;
    std::vector<Probe> branch_evidence;
};

/// Analytic bracket for c*: 2 sqrt(D'(0) g(0)) + h(0) and
/// 2 sqrt(sup D g / s) + max h. Classes D1 and D2 only.
void cstar_bounds(const Model& model, double& lo, double& hi);

enum class SearchMode { Bisection, ParallelMultisection };

/// Bisection on the predicate z(0+) = 0 over [lo - pad, hi + pad]; the final
/// bracket is clipped to the analytic bounds [lo, hi] when they overlap. The
/// multisection mode probes several interior points per round concurrently
/// and is kept for large sweeps; bisection is the reference.
ThresholdReport estimate_cstar(const Model& model, SearchMode mode = SearchMode::Bisection);

/// Effective critical-speed tolerance for a bracket upper end `hi`.
double cstar_tolerance(const Model& model, double hi);

struct RootPair {
    double r_minus = 0.0;
    double r_plus = 0.0;
};

/// Roots of y^2 - (h(0) - c) y + D'(0) g(0) = 0. Throws DomainError when the
/// discriminant is negative.
RootPair r_plus_minus(const Model& model, double c);

struct PastingReport {
    double c1_star = 0.0;
    double c2_star = 0.0;
    double interval_lo = 0.0;   // c1_star
    double interval_hi = 0.0;   // -c2_star
    bool interval_empty = true;
    bool feasible = false;
    double sum_check = 0.0;     // c1_star + c2_star
    double sum_bound = 0.0;     // 4 sqrt(D'(0) g(0))
    bool near_equality = false; // D2 only: |c1 + c2| < 2 tol
    double tolerance = 0.0;
};

PastingReport pasting_feasibility(const Model& model);

}  // namespace swfront
