#pragma once

#include <string>
#include <vector>

#include "swfront/model.hpp"
#include "swfront/reduced_ode.hpp"

namespace swfront {

enum class PlateauKind { FiniteAttach, AsymptoticOnly, Undetermined };

const char* to_string(PlateauKind k);

struct PlateauEvidence {
    std::vector<int> k_values;          // tail abscissas rho_bar - rho_bar 2^-k
    std::vector<double> xi_tail;        // xi at those abscissas, relative to xi(rho_bar/2)
    std::vector<double> increments;     // xi_tail[k+1] - xi_tail[k]
    std::vector<double> ratios;         // consecutive increment ratios
    double median_ratio = 0.0;          // over the last cells
    double fit_slope = 0.0;             // least squares of xi_tail against k
    double fit_r2 = 0.0;
    PlateauKind numeric = PlateauKind::Undetermined;
    PlateauKind analytic = PlateauKind::Undetermined;
    double linear_bound_L = 0.0;        // sup g / (rho_bar - rho) on the side-check grid
    double power_alpha = 0.0;           // largest local exponent of g near rho_bar
    std::string note;
};

struct PlateauClass {
    PlateauKind kind = PlateauKind::Undetermined;
    double xi_bar = 0.0;                // FiniteAttach only, in the xi(rho_bar/2) = 0 frame
    PlateauEvidence evidence;
};

enum class Direction { FromRhoBar, ToRhoBar };

const char* to_string(Direction d);

struct Profile {
    Direction direction = Direction::FromRhoBar;
    double c = 0.0;
    std::vector<double> xi_grid;        // strictly increasing
    std::vector<double> phi_values;
    std::vector<double> xi_rel;         // xi - varpi, accurate next to the contact point
    double varpi = 0.0;                 // phi(varpi) = 0, phi(0) = rho_bar/2
    PlateauClass attach;
    double xi_bar = 0.0;                // where phi reaches rho_bar; infinite if never
    double contact_slope = 0.0;         // phi'(varpi), possibly infinite
};

enum class SlopeRule {
    D0Finite,
    D1Subcrit,
    D1Crit,
    D1Supercrit,
    D2SubcritOrCrit,
    D2Supercrit,
    Dhat0Finite,
    Dhat1Infinite,
};

const char* to_string(SlopeRule r);

struct SlopeReport {
    double measured = 0.0;
    double predicted = 0.0;
    SlopeRule rule_applied = SlopeRule::D0Finite;
    bool agreement = false;
};

/// phi' at the contact point from the smallest cells of a solution:
/// z/D at the lowest node, or -infinity once |z/D| runs past slope_cap
/// while growing towards 0.
double measured_contact_slope(const Model& model, const ZSolution& zsol);

/// xi(phi) = integral of D/z from rho_bar/2 to phi, on the solution grid.
Profile reconstruct_profile(const Model& model, const ZSolution& zsol);

SlopeReport slope_at_contact(const Model& model, const ZSolution& zsol, double c_star);

PlateauClass classify_plateau(const Model& model, const ZSolution& zsol);

/// Profile increasing to rho_bar at speed c, from the reflected model at -c.
Profile reflect_profile(const Model& model, double c);

struct OrderingReport {
    bool passed = false;
    bool degenerate = false;            // equal speeds, no claim made
    bool swapped = false;               // inputs were given with c1 > c2
    double c1 = 0.0;
    double c2 = 0.0;
    double worst_margin = 0.0;          // min over shared levels of xi_rel1 - xi_rel2
    double worst_phi = 0.0;
    int points_compared = 0;
    std::string note;
};

/// For c1 < c2 with both contact points at 0: phi_2 < phi_1 for profiles
/// from rho_bar, phi_1 < phi_2 for profiles to rho_bar. Compared level by
/// level on the shared phi nodes.
OrderingReport ordering_check(const Profile& p1, const Profile& p2);

struct ResidualReport {
    double max_residual = 0.0;          // normalized by max g
    double rms_residual = 0.0;
    double worst_xi = 0.0;
    int points = 0;
};

/// (D(phi) phi')' + (c - h(phi)) phi' + g(phi) by centered differences at
/// interior nodes, skipping 5% of the xi span at each end.
ResidualReport tws_residual(const Model& model, const Profile& profile);

}  // namespace swfront
