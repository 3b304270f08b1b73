#include "integrator.hpp"

#include <algorithm>
#include <cmath>

#include "swfront/errors.hpp"

namespace swfront::detail {

namespace {

// Dormand-Prince 5(4)
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

// Radau IIA, three stages
const double s6 = std::sqrt(6.0);
const double rc[3] = {(4.0 - s6) / 10.0, (4.0 + s6) / 10.0, 1.0};
const double rA[3][3] = {
    {(88.0 - 7.0 * s6) / 360.0, (296.0 - 169.0 * s6) / 1800.0, (-2.0 + 3.0 * s6) / 225.0},
    {(296.0 + 169.0 * s6) / 1800.0, (88.0 + 7.0 * s6) / 360.0, (-2.0 - 3.0 * s6) / 225.0},
    {(16.0 - s6) / 36.0, (16.0 + s6) / 36.0, 1.0 / 9.0},
};

bool solve3(double m[3][3], double b[3]) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        }
        if (m[piv][col] == 0.0 || !std::isfinite(m[piv][col])) return false;
        if (piv != col) {
            for (int k = 0; k < 3; ++k) std::swap(m[col][k], m[piv][k]);
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int k = col; k < 3; ++k) m[r][k] -= f * m[col][k];
            b[r] -= f * b[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < 3; ++k) s -= m[r][k] * b[k];
        b[r] = s / m[r][r];
    }
    return true;
}

bool usable(double z) { return z < 0.0 && std::isfinite(z); }

}  // namespace

Stepper::Stepper(const ReducedRhs& rhs, const Tolerances& tol, double rho_bar)
    : rhs_(rhs), tol_(tol), rho_bar_(rho_bar) {}

bool Stepper::dp45(double x, double h, double z, double& z_new, double& err) const {
    const auto& F = rhs_;
    const double k1 = F(x, z);
    double y = z + h * a21 * k1;
    if (!usable(y)) return false;
    const double k2 = F(x + c2 * h, y);
    y = z + h * (a31 * k1 + a32 * k2);
    if (!usable(y)) return false;
    const double k3 = F(x + c3 * h, y);
    y = z + h * (a41 * k1 + a42 * k2 + a43 * k3);
    if (!usable(y)) return false;
    const double k4 = F(x + c4 * h, y);
    y = z + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    if (!usable(y)) return false;
    const double k5 = F(x + c5 * h, y);
    y = z + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    if (!usable(y)) return false;
    const double k6 = F(x + h, y);
    y = z + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    if (!usable(y)) return false;
    const double k7 = F(x + h, y);
    const double e = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    if (!std::isfinite(e)) return false;
    z_new = y;
    err = std::fabs(e) / (tol_.rk_atol + tol_.rk_rtol * std::max(std::fabs(z), std::fabs(y)));
    return true;
}

bool Stepper::radau(double x, double h, double z, double& z_new) const {
    double Z[3] = {0.0, 0.0, 0.0};
    for (int it = 0; it < 40; ++it) {
        double Fv[3], J[3];
        for (int j = 0; j < 3; ++j) {
            const double y = z + Z[j];
            if (!usable(y)) return false;
            const double xj = x + rc[j] * h;
            Fv[j] = rhs_(xj, y);
            J[j] = rhs_.jac(xj, y);
        }
        double m[3][3];
        double rhs[3];
        for (int i = 0; i < 3; ++i) {
            double s = 0.0;
            for (int j = 0; j < 3; ++j) {
                s += rA[i][j] * Fv[j];
                m[i][j] = (i == j ? 1.0 : 0.0) - h * rA[i][j] * J[j];
            }
            rhs[i] = -(Z[i] - h * s);
        }
        if (!solve3(m, rhs)) return false;
        // Damp updates that would carry a stage across z = 0.
        double lambda = 1.0;
        for (int i = 0; i < 3; ++i) {
            const double y = z + Z[i];
            if (y + rhs[i] >= 0.0) lambda = std::min(lambda, 0.9 * (-y) / rhs[i]);
        }
        double dmax = 0.0, zmax = 0.0;
        for (int i = 0; i < 3; ++i) {
            rhs[i] *= lambda;
            Z[i] += rhs[i];
            dmax = std::max(dmax, std::fabs(rhs[i]));
            zmax = std::max(zmax, std::fabs(Z[i]));
        }
        const double scale = tol_.rk_atol + tol_.rk_rtol * (std::fabs(z) + zmax);
        if (lambda == 1.0 && dmax <= 1e-2 * scale) {
            z_new = z + Z[2];
            return usable(z_new);
        }
    }
    return false;
}

bool Stepper::radau_doubled(double x, double h, double z, double& z_new, double& err) const {
    double full = 0.0, half = 0.0, two = 0.0;
    if (!radau(x, h, z, full)) return false;
    if (!radau(x, 0.5 * h, z, half)) return false;
    if (!radau(x + 0.5 * h, 0.5 * h, half, two)) return false;
    z_new = two;
    const double e = std::fabs(two - full) / 31.0;
    err = e / (tol_.rk_atol + tol_.rk_rtol * std::max(std::fabs(z), std::fabs(two)));
    return true;
}

AdvanceResult Stepper::advance(double x0, double x1, double z0) {
    AdvanceResult res{AdvanceStatus::Reached, x0, z0};
    const double seg = std::fabs(x1 - x0);
    if (seg == 0.0) return res;
    const double dir = x1 > x0 ? 1.0 : -1.0;
    double x = x0;
    double z = z0;
    double h = h_guess_ > 0.0 ? std::min(h_guess_, seg) : seg / 8.0;
    bool sign_trouble = false;

    for (;;) {
        const double remaining = dir * (x1 - x);
        if (remaining <= 0.0) break;
        const double cap = std::max(rho_bar_ - x, seg) / 8.0;
        h = std::min({h, cap, remaining});
        const double floor = tol_.min_step * std::max(std::fabs(x), seg);
        if (h < floor) {
            // Forward runs stall only where z meets the singular line z = 0.
            if (dir > 0.0 && (sign_trouble || z > -tol_.ivp_end_tol ||
                              std::fabs(rhs_(x, z)) > tol_.slope_cap)) {
                return {AdvanceStatus::HitZero, x, z};
            }
            // Backward, the drift h - c can pin z against z = 0 when D g is
            // negligible; the slow manifold then lies below |z|.
            if (dir < 0.0 && z > -tol_.ivp_end_tol && rhs_(x, z) < 0.0) {
                return {AdvanceStatus::HitZero, x, z};
            }
            throw StepFloorError("step size fell below the floor at phi=" + std::to_string(x), x,
                                 std::fabs(rhs_.jac(x, z)));
        }
        const bool last = h >= remaining;
        const bool stiff = dir < 0.0 && h * std::fabs(rhs_.jac(x, z)) > 3.0;
        double zn = 0.0, err = 0.0;
        const bool ok = stiff ? radau_doubled(x, dir * h, z, zn, err) : dp45(x, dir * h, z, zn, err);
        if (!ok) {
            sign_trouble = true;
            h *= 0.25;
            continue;
        }
        const double order = stiff ? 6.0 : 5.0;
        if (err <= 1.0) {
            x = last ? x1 : x + dir * h;
            z = zn;
            ++steps_;
            sign_trouble = false;
            const double grow = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -1.0 / order);
            const double hn = h * std::clamp(grow, 0.2, 5.0);
            if (!last) h = hn;
            h_guess_ = hn;
            if (dir > 0.0 && z >= -tol_.ivp_end_tol && rhs_.Dg(x) / std::fabs(z) > tol_.slope_cap) {
                return {AdvanceStatus::HitZero, x, z};
            }
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / order));
        }
    }
    res.x = x1;
    res.z = z;
    return res;
}

}  // namespace swfront::detail
