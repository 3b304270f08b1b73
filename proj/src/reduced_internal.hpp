#pragma once

#include <vector>

#include "integrator.hpp"
#include "swfront/reduced_ode.hpp"

namespace swfront::detail {

struct Sweep {
    std::vector<double> values;  // NaN below `lowest`
    int lowest = 0;
    bool truncated = false;
};

/// Backward run from nodes[top] with value z_top down to nodes[floor_index].
/// Stops early once z underflows or enters the stiff tail |z| < tail_z with
/// phi * Dg / z^2 > tail_stiffness.
Sweep backward_sweep(const ReducedRhs& rhs, const std::vector<double>& nodes, int top, double z_top,
                     const Tolerances& tol, int floor_index = 0);

/// Limit of z(rho_bar) = -1/n runs on `nodes` (ascending, last node rho_bar).
ZSolution regularized_limit(const Model& model, double c, const std::vector<double>& nodes);

/// Fills z_at_zero and dz_at_zero from the smallest nodes.
void finalize_endpoint(const Model& model, ZSolution& sol);

}  // namespace swfront::detail
