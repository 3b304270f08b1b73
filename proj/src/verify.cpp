#include <algorithm>
#include <cmath>
#include <limits>

#include "integrator.hpp"
#include "swfront/reduced_ode.hpp"

namespace swfront {

namespace {

std::vector<double> check_points(double a, double b, int uniform) {
    std::vector<double> pts;
    for (int i = 0; i < uniform; ++i) pts.push_back(a + (b - a) * i / (uniform - 1));
    for (int k = 10; k <= 40; ++k) {
        const double d = std::ldexp(b - a, -k);
        pts.push_back(a + d);
        pts.push_back(b - d);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// sign = +1: margin = rhs - w' (lower); sign = -1: margin = w' - rhs (upper).
VerificationReport check(const Model& model, double c, const ScalarField& w, double a, double b,
                         const VerifyOptions& opts, double sign) {
    detail::ReducedRhs rhs{&model, c, opts.force_g_zero};
    VerificationReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (double x : check_points(a, b, opts.uniform_points)) {
        const double wv = w(x);
        if (!(wv < 0.0)) {
            ++rep.points_skipped;
            continue;
        }
        const double margin = sign * (rhs(x, wv) - w.derivative(x));
        ++rep.points_checked;
        rep.max_abs_margin = std::max(rep.max_abs_margin, std::fabs(margin));
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_phi = x;
        }
    }
    rep.passed = rep.points_checked > 0 && rep.worst_margin > 0.0;
    return rep;
}

}  // namespace

VerificationReport check_lower_solution(const Model& model, double c, const ScalarField& omega, double a,
                                        double b, const VerifyOptions& opts) {
    return check(model, c, omega, a, b, opts, 1.0);
}

VerificationReport check_upper_solution(const Model& model, double c, const ScalarField& eta, double a,
                                        double b, const VerifyOptions& opts) {
    return check(model, c, eta, a, b, opts, -1.0);
}

}  // namespace swfront
