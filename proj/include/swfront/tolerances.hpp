#pragma once

namespace swfront {

/// Numerical knobs shared by all solver stages. Defaults are tuned for
/// double precision; every field can be overridden from a model config.
struct Tolerances {
    // model
    double fd_step = 1e-6;         // finite-difference step, relative to rho_bar
    double g_end_tol = 1e-9;       // |g(rho_bar)| <= g_end_tol * max g
    double f_zero_tol = 1e-12;     // |f(0)| <= f_zero_tol * (1 + max |f|)
    double d0_zero_tol = 1e-12;    // D(0) <= d0_zero_tol * max D counts as zero
    double slope_cap = 1e6;        // slopes beyond this are treated as infinite
    double zero_slope_tol = 1e-8;  // slopes below this are treated as zero

    // integrator
    double rk_rtol = 1e-10;
    double rk_atol = 1e-300;
    double min_step = 1e-15;       // relative to rho_bar
    double underflow_z = 1e-280;   // backward runs stop once |z| drops below this

    // regularized boundary-value problem
    int bvp_n0 = 64;
    int bvp_max_doublings = 20;
    double bvp_seq_tol = 1e-9;
    double bvp_end_tol = 1e-6;
    double monotone_slack = 1e-12; // allowed decrease, relative to 1 + |z|

    // z(0+) = 0 detection and slope matching
    double zero_detect_tol = 1e-6;
    double slope_check_tol = 1e-2;

    // initial-value runs and shooting
    double ivp_end_tol = 1e-6;
    double shoot_tol = 1e-6;
    int shoot_max_iter = 200;

    // critical speed; a non-positive value selects 2.5e-4 * (1 + |hi|)
    double cstar_tol = 0.0;

    // profile
    double quad_rtol = 1e-12;
    int quad_max_depth = 40;
    int tail_k_max = 20;
    double plateau_ratio_band = 0.03;
    double plateau_r2 = 0.99;
};

}  // namespace swfront
