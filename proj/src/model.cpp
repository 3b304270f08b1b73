#include "swfront/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "swfront/errors.hpp"
#include "swfront/expr.hpp"

namespace swfront {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

double param(const Params& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

double horner(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(static_cast<double>(i) * c[i]);
    return d;
}

std::string poly_label(const std::vector<double>& c) {
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) s += " + ";
        s += fmt(c[i]);
        if (i >= 1) s += "*r";
        if (i >= 2) s += "^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
}

}  // namespace

// ---------------------------------------------------------------- ScalarField

ScalarField ScalarField::analytic(Fn value, Fn derivative, std::string label) {
    ScalarField s;
    s.value_ = std::move(value);
    s.derivative_ = std::move(derivative);
    s.mode_ = DerivativeMode::Analytic;
    s.label_ = std::move(label);
    return s;
}

ScalarField ScalarField::finite_difference(Fn value, double rho_bar, double fd_step, std::string label) {
    ScalarField s;
    s.value_ = std::move(value);
    s.mode_ = DerivativeMode::FiniteDifference;
    s.rho_bar_ = rho_bar;
    s.fd_step_ = fd_step;
    s.label_ = std::move(label);
    return s;
}

ScalarField ScalarField::constant(double v) {
    return analytic([v](double) { return v; }, [](double) { return 0.0; }, fmt(v));
}

double ScalarField::derivative(double x) const {
    if (mode_ == DerivativeMode::Analytic) return derivative_(x);
    const double d = fd_step_ * rho_bar_;
    if (x - d < 0.0) {
        return (-3.0 * value_(x) + 4.0 * value_(x + d) - value_(x + 2.0 * d)) / (2.0 * d);
    }
    if (x + d > rho_bar_) {
        return (3.0 * value_(x) - 4.0 * value_(x - d) + value_(x - 2.0 * d)) / (2.0 * d);
    }
    return (value_(x + d) - value_(x - d)) / (2.0 * d);
}

ScalarField ScalarField::negated() const {
    ScalarField s = *this;
    auto v = value_;
    s.value_ = [v](double x) { return -v(x); };
    if (derivative_) {
        auto dv = derivative_;
        s.derivative_ = [dv](double x) { return -dv(x); };
    }
    s.label_ = "-(" + label_ + ")";
    return s;
}

ScalarField expression_field(const std::string& src, double rho_bar, double fd_step) {
    auto e = std::make_shared<const expr::Expression>(src);
    return ScalarField::finite_difference([e](double r) { return (*e)(r); }, rho_bar, fd_step, src);
}

// ---------------------------------------------------------------- classes

const char* to_string(DiffusivityClass c) {
    switch (c) {
        case DiffusivityClass::D0: return "D0";
        case DiffusivityClass::D1: return "D1";
        case DiffusivityClass::D2: return "D2";
        case DiffusivityClass::Dhat0: return "Dhat0";
        case DiffusivityClass::Dhat1: return "Dhat1";
    }
    return "?";
}

std::optional<DiffusivityClass> diffusivity_class_from_string(const std::string& s) {
    if (s == "D0") return DiffusivityClass::D0;
    if (s == "D1") return DiffusivityClass::D1;
    if (s == "D2") return DiffusivityClass::D2;
    if (s == "Dhat0") return DiffusivityClass::Dhat0;
    if (s == "Dhat1") return DiffusivityClass::Dhat1;
    return std::nullopt;
}

std::vector<double> validation_grid(double rho_bar) {
    std::vector<double> g;
    g.reserve(2049 + 2 * 29);
    for (int i = 0; i <= 2048; ++i) g.push_back(rho_bar * i / 2048.0);
    for (int k = 12; k <= 40; ++k) {
        const double u = std::ldexp(rho_bar, -k);
        g.push_back(u);
        g.push_back(rho_bar - u);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

namespace {

enum class SlopeKind { Zero, Finite, Infinite };

struct SlopeScan {
    SlopeKind kind;
    double last;  // signed last slope
};

SlopeScan scan_slopes(const ScalarField& D, double base, double rho_bar, const Tolerances& tol,
                      bool allow_ambiguous) {
    std::vector<double> s;
    double last_signed = 0.0;
    for (int k = 4; k <= 60; ++k) {
        const double x = std::ldexp(rho_bar, -k);
        last_signed = (D(x) - base) / x;
        s.push_back(std::fabs(last_signed));
    }
    const std::size_t n = s.size();
    const bool cap3 = s[n - 3] > tol.slope_cap && s[n - 2] > tol.slope_cap && s[n - 1] > tol.slope_cap;
    if (cap3 && s[n - 3] < s[n - 2] && s[n - 2] < s[n - 1]) return {SlopeKind::Infinite, last_signed};
    if (s[n - 3] < tol.zero_slope_tol && s[n - 2] < tol.zero_slope_tol && s[n - 1] < tol.zero_slope_tol) {
        return {SlopeKind::Zero, last_signed};
    }
    double e = 0.0;
    for (std::size_t i = n - 11; i + 1 < n; ++i) {
        if (s[i] == 0.0 || s[i + 1] == 0.0) return {SlopeKind::Zero, last_signed};
        e += std::log2(s[i + 1] / s[i]);
    }
    e /= 10.0;
    if (e > 0.05) return {SlopeKind::Infinite, last_signed};
    if (e < -0.05) return {SlopeKind::Zero, last_signed};
    if (std::fabs(e) < 0.01 || allow_ambiguous) return {SlopeKind::Finite, last_signed};
    throw AmbiguousClass("slope sequence of D at 0 has mean log2 ratio " + fmt(e) +
                         ", between the finite and the zero/infinite bands; set declared_class");
}

}  // namespace

ClassInfo classify_diffusivity(const ScalarField& D, double rho_bar, const Tolerances& tol) {
    const double d0 = D(0.0);
    if (!std::isfinite(d0)) throw ValidationError("D(0) is not finite");
    if (d0 < 0.0) throw ValidationError("D(0) = " + fmt(d0) + " is negative");
    double maxD = 0.0;
    for (double x : validation_grid(rho_bar)) maxD = std::max(maxD, D(x));
    const bool zero_at_0 = d0 <= tol.d0_zero_tol * maxD;

    const SlopeScan scan = scan_slopes(D, zero_at_0 ? 0.0 : d0, rho_bar, tol, false);
    ClassInfo info;
    info.D0 = zero_at_0 ? 0.0 : d0;
    if (scan.kind == SlopeKind::Infinite) {
        info.cls = zero_at_0 ? DiffusivityClass::Dhat1 : DiffusivityClass::Dhat0;
        info.slope0 = scan.last < 0.0 ? -kInf : kInf;
    } else if (zero_at_0) {
        info.cls = scan.kind == SlopeKind::Zero ? DiffusivityClass::D2 : DiffusivityClass::D1;
        info.slope0 = scan.kind == SlopeKind::Zero ? 0.0 : scan.last;
    } else {
        info.cls = DiffusivityClass::D0;
        info.slope0 = scan.kind == SlopeKind::Zero ? 0.0 : scan.last;
    }
    return info;
}

namespace {

ClassInfo declared_info(const ScalarField& D, double rho_bar, const Tolerances& tol, DiffusivityClass cls) {
    ClassInfo info;
    info.cls = cls;
    info.declared = true;
    const bool zero_at_0 = cls == DiffusivityClass::D1 || cls == DiffusivityClass::D2 ||
                           cls == DiffusivityClass::Dhat1;
    info.D0 = zero_at_0 ? 0.0 : D(0.0);
    const SlopeScan scan = scan_slopes(D, info.D0, rho_bar, tol, true);
    switch (cls) {
        case DiffusivityClass::D2: info.slope0 = 0.0; break;
        case DiffusivityClass::Dhat0:
        case DiffusivityClass::Dhat1: info.slope0 = scan.last < 0.0 ? -kInf : kInf; break;
        default: info.slope0 = scan.last; break;
    }
    return info;
}

}  // namespace

// ---------------------------------------------------------------- Model

Model Model::build(ModelSpec spec) {
    if (!(spec.rho_bar > 0.0) || !std::isfinite(spec.rho_bar)) {
        throw ValidationError("rho_bar must be a positive finite number");
    }
    if (!spec.D || !spec.f || !spec.g) throw ValidationError("D, f and g must all be defined");

    Model m;
    m.spec_ = std::move(spec);
    m.grid_ = validation_grid(m.spec_.rho_bar);
    const double rb = m.spec_.rho_bar;
    const auto& D = m.spec_.D;
    const auto& f = m.spec_.f;
    const auto& g = m.spec_.g;
    const auto& tol = m.spec_.tol;

    auto where = [](const char* what, double x, double v) {
        return std::string(what) + " at rho=" + fmt(x) + " (value " + fmt(v) + ")";
    };

    double max_g = 0.0;
    double max_abs_f = 0.0;
    for (double x : m.grid_) {
        const double dv = D(x);
        const double fv = f(x);
        const double gv = g(x);
        if (!std::isfinite(dv)) throw ValidationError(where("D is not finite", x, dv));
        if (!std::isfinite(fv)) throw ValidationError(where("f is not finite", x, fv));
        if (!std::isfinite(gv)) throw ValidationError(where("g is not finite", x, gv));
        if (x > 0.0) {
            const bool ok = m.spec_.D_positive_certified ? dv >= 0.0 : dv > 0.0;
            if (!ok) throw ValidationError(where("D must be positive on (0, rho_bar]", x, dv));
        }
        if (x < rb && !(gv > 0.0)) throw ValidationError(where("g must be positive on [0, rho_bar)", x, gv));
        max_g = std::max(max_g, gv);
        max_abs_f = std::max(max_abs_f, std::fabs(fv));
    }
    const double g_end = g(rb);
    if (std::fabs(g_end) > tol.g_end_tol * max_g) {
        throw ValidationError(where("g must vanish at rho_bar", rb, g_end));
    }
    const double f0 = f(0.0);
    if (std::fabs(f0) > tol.f_zero_tol * (1.0 + max_abs_f)) {
        throw ValidationError(where("f must vanish at 0", 0.0, f0));
    }

    m.class_ = m.spec_.declared_class ? declared_info(D, rb, tol, *m.spec_.declared_class)
                                      : classify_diffusivity(D, rb, tol);

    ModelBounds b;
    b.max_h = -kInf;
    b.min_h = kInf;
    b.delta_min = kInf;
    b.max_g = max_g;
    for (double x : m.grid_) {
        const double hv = m.h(x);
        const double dv = D(x);
        const double gv = g(x);
        b.max_h = std::max(b.max_h, hv);
        b.min_h = std::min(b.min_h, hv);
        b.M = std::max(b.M, dv * gv);
        b.K = std::max(b.K, dv);
        if (x >= rb / 2) b.delta_min = std::min(b.delta_min, dv);
        if (x > 0.0) b.sup_Dg_over_s = std::max(b.sup_Dg_over_s, dv * gv / x);
    }
    switch (m.class_.cls) {
        case DiffusivityClass::D1:
            b.sup_Dg_over_s = std::max(b.sup_Dg_over_s, m.class_.slope0 * g(0.0));
            break;
        case DiffusivityClass::D2: break;
        default: b.sup_Dg_over_s = kInf; break;
    }
    if (!(b.delta_min > 0.0)) throw ValidationError("D must be positive on [rho_bar/2, rho_bar]");
    m.bounds_ = b;
    return m;
}

Model Model::reflected() const {
    ModelSpec s = spec_;
    s.f = spec_.f.negated();
    s.name = spec_.name + "/reflected";
    if (!s.declared_class) s.declared_class = class_.cls;
    return build(std::move(s));
}

Model Model::with_tolerances(const Tolerances& tol) const {
    ModelSpec s = spec_;
    s.tol = tol;
    return build(std::move(s));
}

// ---------------------------------------------------------------- presets

ModelSpec preset_linear_toy(double rho_bar) {
    ModelSpec s;
    s.name = "linear_toy";
    s.rho_bar = rho_bar;
    s.D = ScalarField::constant(1.0);
    s.f = ScalarField::constant(0.0);
    s.g = ScalarField::analytic([rho_bar](double r) { return rho_bar - r; }, [](double) { return -1.0; },
                                fmt(rho_bar) + " - r");
    return s;
}

ModelSpec preset_crowd_exponential(double rho_bar, const Params& p) {
    const double vmax = param(p, "vmax", 1.0);
    const double gamma = param(p, "gamma", 0.5);
    const double delta = param(p, "delta", 0.3);
    const double L = param(p, "L", 1.0);
    if (!(vmax > 0.0)) throw ParameterError("crowd_exponential: vmax must be positive");
    if (!(gamma > 0.0 && gamma < rho_bar)) {
        throw ParameterError("crowd_exponential: gamma must lie in (0, rho_bar)");
    }
    if (!(delta > 0.0)) throw ParameterError("crowd_exponential: delta must be positive");
    if (!(L > 0.0)) throw ParameterError("crowd_exponential: L must be positive");

    // E(r) = exp(-gamma (1/r - 1/rho_bar)), extended by 0 at r = 0.
    auto E = [gamma, rho_bar](double r) {
        return r > 0.0 ? std::exp(-gamma / r + gamma / rho_bar) : 0.0;
    };
    auto v = [=](double r) { return vmax * (1.0 - E(r)); };
    auto dv = [=](double r) {
        const double e = E(r);
        return e == 0.0 ? 0.0 : -vmax * gamma / (r * r) * e;
    };

    ModelSpec s;
    s.name = "crowd_exponential";
    s.rho_bar = rho_bar;
    s.D_positive_certified = true;
    s.D = ScalarField::analytic(
        [=](double r) {
            const double e = E(r);
            return e == 0.0 ? 0.0 : delta * vmax * gamma / r * e;
        },
        [=](double r) {
            const double e = E(r);
            return e == 0.0 ? 0.0 : delta * vmax * gamma * e * (gamma / (r * r * r) - 1.0 / (r * r));
        },
        "crowd D");
    s.f = ScalarField::analytic([=](double r) { return r * v(r); }, [=](double r) { return v(r) + r * dv(r); },
                                "crowd f");
    s.g = ScalarField::analytic([=](double r) { return L * (rho_bar - r); }, [=](double) { return -L; },
                                "crowd g");
    return s;
}

ModelSpec preset_nelson(double rho_bar, const Params& p, const std::string& v_expr, const std::string& g_expr,
                        const Tolerances& tol) {
    const double L_ant = param(p, "L_ant", 1.0);
    const double tau = param(p, "tau", 0.5);
    if (!(L_ant > 0.0)) throw ParameterError("nelson: L_ant must be positive");
    if (!(tau > 0.0)) throw ParameterError("nelson: tau must be positive");

    const ScalarField v = expression_field(v_expr, rho_bar, tol.fd_step);
    double min_rdv = kInf;
    for (double x : validation_grid(rho_bar)) min_rdv = std::min(min_rdv, x * v.derivative(x));
    if (!(min_rdv > -L_ant / tau)) {
        throw ParameterError("nelson: min r v'(r) = " + fmt(min_rdv) + " violates > -L_ant/tau = " +
                             fmt(-L_ant / tau));
    }

    ModelSpec s;
    s.name = "nelson";
    s.rho_bar = rho_bar;
    s.D = ScalarField::finite_difference(
        [=](double r) {
            const double dv = v.derivative(r);
            return -r * (L_ant * dv + tau * r * dv * dv);
        },
        rho_bar, tol.fd_step, "nelson D");
    s.f = ScalarField::analytic([=](double r) { return r * v(r); },
                                [=](double r) { return v(r) + r * v.derivative(r); }, "nelson f");
    s.g = expression_field(g_expr, rho_bar, tol.fd_step);
    s.tol = tol;
    return s;
}

ModelSpec preset_porous_medium(double rho_bar, const Params& p) {
    const double m = param(p, "m", 1.5);
    const double L = param(p, "L", 1.0);
    if (!(m > 1.0)) throw ParameterError("porous_medium: m must exceed 1");
    if (!(L > 0.0)) throw ParameterError("porous_medium: L must be positive");
    ModelSpec s;
    s.name = "porous_medium";
    s.rho_bar = rho_bar;
    s.D = ScalarField::analytic([m](double r) { return m * std::pow(r, m - 1.0); },
                                [m](double r) { return m * (m - 1.0) * std::pow(r, m - 2.0); },
                                fmt(m) + "*r^" + fmt(m - 1.0));
    s.f = ScalarField::constant(0.0);
    s.g = ScalarField::analytic([=](double r) { return L * (rho_bar - r); }, [=](double) { return -L; },
                                "porous g");
    return s;
}

ModelSpec preset_polynomial(double rho_bar, const std::vector<double>& D, const std::vector<double>& f,
                            const std::vector<double>& g) {
    auto field = [](const std::vector<double>& c) {
        const std::vector<double> dc = poly_derivative(c);
        return ScalarField::analytic([c](double x) { return horner(c, x); },
                                     [dc](double x) { return horner(dc, x); }, poly_label(c));
    };
    ModelSpec s;
    s.name = "polynomial";
    s.rho_bar = rho_bar;
    s.D = field(D);
    s.f = field(f);
    s.g = field(g);
    return s;
}

}  // namespace swfront
