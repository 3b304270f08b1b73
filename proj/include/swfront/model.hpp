#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swfront/tolerances.hpp"

namespace swfront {

enum class DerivativeMode { Analytic, FiniteDifference };

/// A real function on [0, rho_bar] together with its derivative.
class ScalarField {
public:
    using Fn = std::function<double(double)>;

    ScalarField() = default;

    static ScalarField analytic(Fn value, Fn derivative, std::string label);
    /// Central differences with step fd_step * rho_bar in the interior and
    /// second-order one-sided differences where the stencil would leave
    /// [0, rho_bar].
    static ScalarField finite_difference(Fn value, double rho_bar, double fd_step, std::string label);
    static ScalarField constant(double v);

    double operator()(double x) const { return value_(x); }
    double derivative(double x) const;

    DerivativeMode mode() const noexcept { return mode_; }
    const std::string& label() const noexcept { return label_; }
    explicit operator bool() const noexcept { return static_cast<bool>(value_); }

    ScalarField negated() const;

private:
    Fn value_;
    Fn derivative_;
    DerivativeMode mode_ = DerivativeMode::Analytic;
    double rho_bar_ = 1.0;
    double fd_step_ = 1e-6;
    std::string label_;
};

enum class DiffusivityClass { D0, D1, D2, Dhat0, Dhat1 };

const char* to_string(DiffusivityClass c);
std::optional<DiffusivityClass> diffusivity_class_from_string(const std::string& s);

struct ClassInfo {
    DiffusivityClass cls = DiffusivityClass::D0;
    double D0 = 0.0;       // D(0)
    double slope0 = 0.0;   // one-sided slope at 0; +-infinity for the hat classes
    bool declared = false; // true when taken from declared_class
};

struct ModelBounds {
    double max_h = 0.0;
    double min_h = 0.0;
    double M = 0.0;          // max D*g
    double K = 0.0;          // max D
    double delta_min = 0.0;  // min D over [rho_bar/2, rho_bar]
    double sup_Dg_over_s = 0.0;
    double max_g = 0.0;

    /// max over [0, rho_bar] of h - c
    double H(double c) const { return max_h - c; }
};

/// Raw ingredients of a model before validation.
struct ModelSpec {
    std::string name = "custom";
    double rho_bar = 1.0;
    ScalarField D;
    ScalarField f;
    ScalarField g;
    std::optional<DiffusivityClass> declared_class;
    /// Set when D is known to be positive on (0, rho_bar] but may underflow
    /// to zero in floating point near 0.
    bool D_positive_certified = false;
    Tolerances tol;
};

/// A validated (D, f, g, rho_bar) quadruple with classification and bounds.
/// Immutable after construction.
class Model {
public:
    /// Validates the sign hypotheses, classifies D and computes the bounds.
    /// Throws ValidationError or AmbiguousClass.
    static Model build(ModelSpec spec);

    const std::string& name() const noexcept { return spec_.name; }
    double rho_bar() const noexcept { return spec_.rho_bar; }
    const ScalarField& D() const noexcept { return spec_.D; }
    const ScalarField& f() const noexcept { return spec_.f; }
    const ScalarField& g() const noexcept { return spec_.g; }
    double h(double x) const { return spec_.f.derivative(x); }
    const Tolerances& tol() const noexcept { return spec_.tol; }
    const ClassInfo& classification() const noexcept { return class_; }
    DiffusivityClass cls() const noexcept { return class_.cls; }
    const ModelBounds& bounds() const noexcept { return bounds_; }
    const std::vector<double>& grid() const noexcept { return grid_; }
    const ModelSpec& spec() const noexcept { return spec_; }

    /// Same D, g, rho_bar with flux -f. Used for profiles towards rho_bar.
    Model reflected() const;
    Model with_tolerances(const Tolerances& tol) const;

private:
    ModelSpec spec_;
    ClassInfo class_;
    ModelBounds bounds_;
    std::vector<double> grid_;
};

/// 2049 uniform points plus rho_bar*2^-k and rho_bar*(1-2^-k), k = 12..40.
std::vector<double> validation_grid(double rho_bar);

/// Detects the class of D from D(0) and the one-sided slopes on
/// rho_bar*2^-k, k = 4..60. Throws AmbiguousClass when no band matches.
ClassInfo classify_diffusivity(const ScalarField& D, double rho_bar, const Tolerances& tol);

// Presets. Parameter maps use the same names as the config file.
using Params = std::map<std::string, double>;

ModelSpec preset_linear_toy(double rho_bar);
/// v = vmax (1 - exp(-gamma (1/r - 1/rho_bar))), D = -delta r v', f = r v,
/// g = L (rho_bar - r).
ModelSpec preset_crowd_exponential(double rho_bar, const Params& p);
/// D = -r (L_ant v' + tau r v'^2), f = r v, with v and g given as expressions.
ModelSpec preset_nelson(double rho_bar, const Params& p, const std::string& v_expr,
                        const std::string& g_expr, const Tolerances& tol);
/// D = m r^(m-1), f = 0, g = L (rho_bar - r).
ModelSpec preset_porous_medium(double rho_bar, const Params& p);
/// Ascending coefficient lists.
ModelSpec preset_polynomial(double rho_bar, const std::vector<double>& D,
                            const std::vector<double>& f, const std::vector<double>& g);

/// Field from an expression in r; derivative by finite differences.
ScalarField expression_field(const std::string& src, double rho_bar, double fd_step);

}  // namespace swfront
