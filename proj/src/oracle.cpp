#include "swfront/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "swfront/errors.hpp"

namespace swfront {

GZeroReport g_zero_first_integral(const ScalarField& D, const ScalarField& f, double rho_bar, double c) {
    if (!D || !f) throw PreconditionError("g_zero_first_integral needs D and f");
    if (!(rho_bar > 0.0)) throw ParameterError("rho_bar must be positive");
    GZeroReport rep;
    rep.c = c;
    const double f_bar = f(rho_bar);
    rep.z_closed_form = [f, f_bar, rho_bar, c](double phi) { return f(phi) - f_bar + c * (rho_bar - phi); };
    rep.contact_limit = c * rho_bar + f(0.0) - f_bar;
    rep.end_slope = f.derivative(rho_bar) - c;

    // Uniform points plus geometric clusters at both ends.
    std::vector<double> pts;
    for (int i = 1; i < 2048; ++i) pts.push_back(rho_bar * i / 2048.0);
    for (int k = 12; k <= 40; ++k) {
        pts.push_back(std::ldexp(rho_bar, -k));
        pts.push_back(rho_bar - std::ldexp(rho_bar, -k));
    }
    rep.worst_from = -std::numeric_limits<double>::infinity();
    rep.worst_to = std::numeric_limits<double>::infinity();
    for (double x : pts) {
        const double z = rep.z_closed_form(x);
        rep.worst_from = std::max(rep.worst_from, z);
        rep.worst_to = std::min(rep.worst_to, z);
    }
    rep.admissible_from = rep.worst_from < 0.0;
    rep.admissible_to = rep.worst_to > 0.0;
    return rep;
}

double wavefront_speed(const ScalarField& f, double rho_minus, double rho_plus) {
    if (!(rho_minus < rho_plus)) {
        std::ostringstream os;
        os.precision(17);
        os << "wavefronts need rho_minus < rho_plus, got " << rho_minus << " and " << rho_plus;
        throw PreconditionError(os.str());
    }
    return (f(rho_plus) - f(rho_minus)) / (rho_plus - rho_minus);
}

double lambda_plus(double c) {
    // Written to avoid cancellation for large positive c.
    const double s = std::sqrt(c * c + 4.0);
    return c > 0.0 ? 2.0 / (s + c) : (s - c) / 2.0;
}

std::function<double(double)> linear_explicit_z(double c) {
    const double lam = lambda_plus(c);
    return [lam](double phi) { return -lam * (1.0 - phi); };
}

BruteForceResult brute_force_fvp(const Model& model, double c, long long n, long long steps, double phi_stop,
                                 long long record_every) {
    if (n < 10000) throw PreconditionError("brute_force_fvp needs n >= 1e4, got " + std::to_string(n));
    if (steps < 1) throw PreconditionError("brute_force_fvp needs at least one step");
    if (record_every < 1 || steps % record_every != 0) {
        throw PreconditionError("record_every must be positive and divide the step count");
    }
    const double rb = model.rho_bar();
    if (!(phi_stop >= 0.0 && phi_stop < rb)) throw PreconditionError("phi_stop must lie in [0, rho_bar)");
    const auto& D = model.D();
    const auto& g = model.g();
    const auto& f = model.f();
    const auto F = [&](double x, double z) { return f.derivative(x) - c - D(x) * g(x) / z; };
    const auto check = [&](double x, double z) {
        if (!(z < 0.0) || !std::isfinite(z)) {
            std::ostringstream os;
            os.precision(17);
            os << "RK4 stage reached z=" << z << " at phi=" << x << "; refine n or the step count";
            throw OracleBlowup(os.str());
        }
    };

    BruteForceResult r;
    r.steps = steps;
    const auto slots = static_cast<std::size_t>(steps / record_every) + 1;
    r.grid.resize(slots);
    r.values.resize(slots);
    const double span = rb - phi_stop;
    const double h = -span / static_cast<double>(steps);
    double z = -1.0 / static_cast<double>(n);
    r.grid.back() = rb;
    r.values.back() = z;
    for (long long i = steps; i > 0; --i) {
        const double x = phi_stop + span * static_cast<double>(i) / static_cast<double>(steps);
        const double k1 = F(x, z);
        const double y2 = z + 0.5 * h * k1;
        check(x + 0.5 * h, y2);
        const double k2 = F(x + 0.5 * h, y2);
        const double y3 = z + 0.5 * h * k2;
        check(x + 0.5 * h, y3);
        const double k3 = F(x + 0.5 * h, y3);
        const double y4 = z + h * k3;
        check(x + h, y4);
        const double k4 = F(x + h, y4);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double xn = phi_stop + span * static_cast<double>(i - 1) / static_cast<double>(steps);
        check(xn, z);
        if ((i - 1) % record_every == 0) {
            const auto slot = static_cast<std::size_t>((i - 1) / record_every);
            r.grid[slot] = xn;
            r.values[slot] = z;
        }
    }
    return r;
}

double sample(const BruteForceResult& r, double phi) {
    const auto& x = r.grid;
    if (phi <= x.front()) return r.values.front();
    if (phi >= x.back()) return r.values.back();
    const auto it = std::upper_bound(x.begin(), x.end(), phi);
    const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    const double t = (phi - x[i]) / (x[i + 1] - x[i]);
    return r.values[i] + t * (r.values[i + 1] - r.values[i]);
}

}  // namespace swfront
