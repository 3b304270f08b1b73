#pragma once

#include <functional>
#include <vector>

#include "swfront/model.hpp"

// Reference values computed without the solver stack: closed forms, the
// source-free first integral and a fixed-step Runge-Kutta run.

namespace swfront {

struct GZeroReport {
    double c = 0.0;
    bool admissible_from = false;   // z < 0 on (0, rho_bar)
    bool admissible_to = false;     // the reflected first integral is negative
    std::function<double(double)> z_closed_form;  // f(phi) - f(rho_bar) + c (rho_bar - phi)
    double contact_limit = 0.0;     // value of z at 0: c rho_bar + f(0) - f(rho_bar)
    double end_slope = 0.0;         // dz/dphi at rho_bar, h(rho_bar) - c
    double worst_from = 0.0;        // largest z on the check grid
    double worst_to = 0.0;          // smallest z on the check grid
};

/// First integral of the source-free reduced equation. D only enters
/// through the profile, not through z.
GZeroReport g_zero_first_integral(const ScalarField& D, const ScalarField& f, double rho_bar, double c);

/// (f(rho_plus) - f(rho_minus)) / (rho_plus - rho_minus); needs rho_minus < rho_plus.
double wavefront_speed(const ScalarField& f, double rho_minus, double rho_plus);

/// (sqrt(c^2 + 4) - c) / 2.
double lambda_plus(double c);

/// z = -lambda_plus(c) (1 - phi) for D = 1, h = 0, g = 1 - rho, rho_bar = 1.
std::function<double(double)> linear_explicit_z(double c);

struct BruteForceResult {
    std::vector<double> grid;       // increasing, uniform, ends at rho_bar
    std::vector<double> values;
    long long steps = 0;
};

/// Classical RK4 with a fixed step, backward from z(rho_bar) = -1/n down to
/// phi_stop. Throws OracleBlowup as soon as a stage has z >= 0.
/// Only every record_every-th node is stored; steps must be a multiple of it.
BruteForceResult brute_force_fvp(const Model& model, double c, long long n, long long steps = 1000000,
                                 double phi_stop = 0.0, long long record_every = 1);

/// Linear interpolation in a brute-force result.
double sample(const BruteForceResult& r, double phi);

}  // namespace swfront
