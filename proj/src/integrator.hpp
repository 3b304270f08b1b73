#pragma once

// Scalar integrator for dz/dphi = h(phi) - c - D(phi) g(phi) / z on z < 0.
// Explicit Dormand-Prince 5(4) by default; in the backward direction a
// three-stage Radau IIA step takes over once the step is stability limited
// (the equation is stiff along the slow manifold z ~ -Dg/(c-h)).

#include "swfront/model.hpp"

namespace swfront::detail {

struct ReducedRhs {
    const Model* model = nullptr;
    double c = 0.0;
    bool zero_g = false;

    double Dg(double phi) const { return zero_g ? 0.0 : model->D()(phi) * model->g()(phi); }
    double operator()(double phi, double z) const { return model->h(phi) - c - Dg(phi) / z; }
    /// d/dz of the right-hand side.
    double jac(double phi, double z) const { return Dg(phi) / (z * z); }
};

enum class AdvanceStatus { Reached, HitZero };

struct AdvanceResult {
    AdvanceStatus status = AdvanceStatus::Reached;
    double x = 0.0;
    double z = 0.0;
};

class Stepper {
public:
    Stepper(const ReducedRhs& rhs, const Tolerances& tol, double rho_bar);

    /// Integrates from (x0, z0) to x1 (either direction). Forward runs stop
    /// early with HitZero when z reaches the singular line z = 0.
    /// Throws StepFloorError when the controller stalls.
    AdvanceResult advance(double x0, double x1, double z0);

    long steps() const noexcept { return steps_; }

private:
    bool dp45(double x, double h, double z, double& z_new, double& err) const;
    bool radau(double x, double h, double z, double& z_new) const;
    bool radau_doubled(double x, double h, double z, double& z_new, double& err) const;

    const ReducedRhs& rhs_;
    const Tolerances& tol_;
    double rho_bar_;
    double h_guess_ = 0.0;
    long steps_ = 0;
};

}  // namespace swfront::detail
