#pragma once

#include <cmath>
#include <string>

#include "swfront/model.hpp"

// Models shared by the test files.
namespace swtest {

using swfront::Model;
using swfront::ModelSpec;
using swfront::ScalarField;

inline Model toy() { return Model::build(swfront::preset_linear_toy(1.0)); }

/// D = r, f = 0, g = 1 - r.
inline Model d1() { return Model::build(swfront::preset_polynomial(1.0, {0, 1}, {0}, {1, -1})); }

/// D = r^2, f = 0, g = 1 - r.
inline Model d2() { return Model::build(swfront::preset_polynomial(1.0, {0, 0, 1}, {0}, {1, -1})); }

inline Model crowd() { return Model::build(swfront::preset_crowd_exponential(1.0, {})); }

inline ModelSpec custom(std::string name, ScalarField D, ScalarField f, ScalarField g) {
    ModelSpec s;
    s.name = std::move(name);
    s.D = std::move(D);
    s.f = std::move(f);
    s.g = std::move(g);
    return s;
}

inline ScalarField sqrt_field(double shift) {
    return ScalarField::analytic([shift](double r) { return shift + std::sqrt(r); },
                                 [](double r) { return r > 0.0 ? 0.5 / std::sqrt(r) : HUGE_VAL; },
                                 "shift+sqrt(r)");
}

inline ScalarField linear_source() {
    return ScalarField::analytic([](double r) { return 1.0 - r; }, [](double) { return -1.0; }, "1-r");
}

/// D = shift + sqrt(r), f = 0, g = 1 - r.
inline Model sqrt_model(double shift) {
    return Model::build(custom("sqrt", sqrt_field(shift), ScalarField::constant(0.0), linear_source()));
}

/// D = r, f = 0, g = (1 - r)^alpha.
inline Model power_source(double alpha) {
    return Model::build(custom(
        "power_source", ScalarField::analytic([](double r) { return r; }, [](double) { return 1.0; }, "r"),
        ScalarField::constant(0.0),
        ScalarField::analytic([alpha](double r) { return std::pow(1.0 - r, alpha); },
                              [alpha](double r) { return r < 1.0 ? -alpha * std::pow(1.0 - r, alpha - 1.0) : 0.0; },
                              "(1-r)^alpha")));
}

}  // namespace swtest
