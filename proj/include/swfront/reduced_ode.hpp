#pragma once

#include <string>
#include <vector>

#include "swfront/model.hpp"

// The reduced problem: z = D(phi) phi' as a function of the density phi,
//
//     dz/dphi = h(phi) - c - D(phi) g(phi) / z,   z < 0 on (0, rho_bar),
//     z(rho_bar) = 0.

namespace swfront {

struct Regularization {
    int n_final = 0;
    double richardson_error = 0.0;
    int doublings = 0;
    double order_estimate = 0.0;          // median pointwise order of z_n -> z in 1/n
    std::vector<long long> n_values;      // regularization parameters used
    std::vector<std::vector<double>> iterates;  // z_n on the shared grid
    int monotone_violations = 0;
    double worst_monotone_drop = 0.0;     // largest decrease z_{n'} - z_n < 0 seen (0 if none)
};

enum class SolveMethod { Regularized, Shooting, FinalValue };

struct ZSolution {
    double c = 0.0;
    std::vector<double> grid;    // increasing, ends at rho_bar for full solutions
    std::vector<double> values;
    double z_at_zero = 0.0;
    double dz_at_zero = 0.0;     // may be -infinity
    Regularization regularization;
    std::string model_id;
    SolveMethod method = SolveMethod::Regularized;
    bool truncated = false;      // integration stopped above the smallest solver node
    double shooting_join_gap = 0.0;
};

enum class Termination { ReachedRightEnd, HitZero };

struct IVPResult {
    std::vector<double> grid;
    std::vector<double> values;
    Termination terminated = Termination::ReachedRightEnd;
    double beta = 0.0;           // abscissa where the run ended
    double z_right = 0.0;        // value at phi_right (extrapolated) when reached
};

struct ZeroVerdict {
    bool is_zero = false;
    bool magnitude_ok = false;
    bool discriminant_ok = false;
    bool matches_r_minus = false;
    bool matches_r_plus = false;
    bool both_roots_close = false; // roots within 2*slope_check_tol of each other
    double threshold = 0.0;
};

/// Uniform 2049 points, rho_bar*2^-k for k = 12..330 and rho_bar*(1-2^-k)
/// for k = 12..40. Does not contain 0.
std::vector<double> solver_grid(double rho_bar);

ZSolution integrate_fvp(const Model& model, double c, double phi_end, double z_end);

IVPResult integrate_ivp(const Model& model, double c, double phi_start, double z0, double phi_right);

/// Classes D0, D1, D2: limit of the final-value problems z(rho_bar) = -1/n.
ZSolution solve_singular_bvp(const Model& model, double c);

/// Classes Dhat0, Dhat1: bisection on z(0) between analytic bounds.
ZSolution shoot_infinite_slope(const Model& model, double c);

/// Dispatches on the diffusivity class.
ZSolution solve_z(const Model& model, double c);

/// Decides z(0+) = 0 from magnitude and, for D1/D2, from the slope at 0
/// matching one of the roots r-, r+.
ZeroVerdict zero_at_zero(const Model& model, const ZSolution& sol);

struct VerificationReport {
    bool passed = false;
    double worst_margin = 0.0;
    double worst_phi = 0.0;
    double max_abs_margin = 0.0;
    int points_checked = 0;
    int points_skipped = 0;
};

struct VerifyOptions {
    bool force_g_zero = false;
    int uniform_points = 513;
};

/// Strict lower solution: omega' < h - c - D g / omega on [a, b].
VerificationReport check_lower_solution(const Model& model, double c, const ScalarField& omega, double a,
                                        double b, const VerifyOptions& opts = {});
/// Strict upper solution: eta' > h - c - D g / eta on [a, b].
VerificationReport check_upper_solution(const Model& model, double c, const ScalarField& eta, double a,
                                        double b, const VerifyOptions& opts = {});

/// Roots of y^2 - (h0 - c) y + dD0 g0 = 0, ordered (r-, r+). The
/// discriminant is clamped to 0 when it is negative by rounding only.
/// Returns false when it is genuinely negative.
bool quadratic_roots(double h0, double c, double dDg0, double& r_minus, double& r_plus);

}  // namespace swfront
