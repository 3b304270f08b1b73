#pragma once

#include <vector>

#include "swfront/model.hpp"
#include "swfront/profile.hpp"
#include "swfront/reduced_ode.hpp"

namespace swfront {

struct SweepPoint {
    double c = 0.0;
    ZSolution zsol;
    Profile profile;
    double ordering_margin = 0.0;   // against the previous speed; NaN for the first point
    bool ordering_passed = false;
};

/// Evenly spaced speeds; steps = 1 gives {c_min}.
std::vector<double> sweep_speeds(double c_min, double c_max, int steps);

/// Reference implementation: one speed after the other.
std::vector<SweepPoint> sweep_serial(const Model& model, const std::vector<double>& speeds);

/// Same results as sweep_serial, bit for bit, with the speeds spread over
/// `threads` OpenMP threads.
std::vector<SweepPoint> sweep_parallel(const Model& model, const std::vector<double>& speeds, int threads);

/// Thread count for sweeps: the OpenMP default, capped by SWFRONT_THREADS.
int sweep_threads();

}  // namespace swfront
