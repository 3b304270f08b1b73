#include "interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swfront::detail {

namespace {

double end_slope(double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (d * m0 <= 0.0) {
        d = 0.0;
    } else if (m0 * m1 <= 0.0 && std::fabs(d) > std::fabs(3.0 * m0)) {
        d = 3.0 * m0;
    }
    return d;
}

}  // namespace

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("Pchip needs at least two matching nodes");
    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), m(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        if (!(h[i] > 0.0)) throw std::invalid_argument("Pchip nodes must increase strictly");
        m[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
        d_[0] = d_[1] = m[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (m[i - 1] * m[i] > 0.0) {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
        }
    }
    d_[0] = end_slope(h[0], h[1], m[0], m[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
}

double Pchip::operator()(double t) const {
    const std::size_t n = x_.size();
    std::size_t i;
    if (t <= x_.front()) {
        i = 0;
    } else if (t >= x_.back()) {
        i = n - 2;
    } else {
        i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
    }
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * d_[i] + (-2 * s3 + 3 * s2) * y_[i + 1] +
           (s3 - s2) * h * d_[i + 1];
}

namespace {

bool simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                 double whole, double tol, int depth, double& out) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) {
        out = left + right + delta / 15.0;
        return true;
    }
    if (depth <= 0 || m <= a || m >= b) {
        out = left + right + delta / 15.0;
        return false;
    }
    double l = 0.0, r = 0.0;
    const bool okl = simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, l);
    const bool okr = simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, r);
    out = l + r;
    return okl && okr;
}

}  // namespace

bool adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rtol, int max_depth,
                      double& result) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double tol = std::max(rtol * std::fabs(whole), 1e-300);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth, result);
}

}  // namespace swfront::detail
