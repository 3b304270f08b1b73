#pragma once

#include <functional>
#include <vector>

namespace swfront::detail {

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Between nodes of one sign it never crosses zero.
class Pchip {
public:
    Pchip(std::vector<double> x, std::vector<double> y);
    double operator()(double t) const;
    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<double>& y() const noexcept { return y_; }

private:
    std::vector<double> x_, y_, d_;
};

/// Adaptive Simpson on [a, b]. Returns false when the depth limit is hit
/// before the local error test passes.
bool adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rtol, int max_depth,
                      double& result);

}  // namespace swfront::detail
