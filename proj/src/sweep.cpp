#include "swfront/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>

#include <omp.h>

#include "swfront/errors.hpp"

namespace swfront {

namespace {

SweepPoint evaluate(const Model& model, double c) {
    SweepPoint p;
    p.c = c;
    p.zsol = solve_z(model, c);
    p.profile = reconstruct_profile(model, p.zsol);
    return p;
}

void link_ordering(std::vector<SweepPoint>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == 0) {
            pts[i].ordering_margin = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const OrderingReport r = ordering_check(pts[i - 1].profile, pts[i].profile);
        pts[i].ordering_margin = r.worst_margin;
        pts[i].ordering_passed = r.passed;
    }
}

}  // namespace

std::vector<double> sweep_speeds(double c_min, double c_max, int steps) {
    if (steps < 1) throw ParameterError("sweep needs at least one step");
    if (!(c_min <= c_max)) throw ParameterError("sweep needs c_min <= c_max");
    if (steps == 1) return {c_min};
    std::vector<double> cs(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        cs[static_cast<std::size_t>(i)] = c_min + (c_max - c_min) * i / (steps - 1);
    }
    cs.back() = c_max;
    return cs;
}

std::vector<SweepPoint> sweep_serial(const Model& model, const std::vector<double>& speeds) {
    std::vector<SweepPoint> pts;
    pts.reserve(speeds.size());
    for (double c : speeds) pts.push_back(evaluate(model, c));
    link_ordering(pts);
    return pts;
}

std::vector<SweepPoint> sweep_parallel(const Model& model, const std::vector<double>& speeds, int threads) {
    const long n = static_cast<long>(speeds.size());
    std::vector<SweepPoint> pts(speeds.size());
    std::vector<std::exception_ptr> errors(speeds.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, threads))
    for (long i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        try {
            pts[u] = evaluate(model, speeds[u]);
        } catch (...) {
            errors[u] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    link_ordering(pts);
    return pts;
}

int sweep_threads() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("SWFRONT_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap > 0) n = std::min<long>(n, cap);
    }
    return std::max(1, n);
}

}  // namespace swfront
