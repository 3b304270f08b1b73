#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "swfront/model.hpp"

// Model files are JSON:
//
//   { "name": "...", "rho_bar": 1,
//     "D": "r" | {"preset": "crowd_exponential", "vmax": 1, ...},
//     "f": "r*(1-r)", "g": "1-r",
//     "declared_class": "D1",
//     "tolerances": {"rk_rtol": 1e-10, ...} }
//
// A preset object for D defines the whole model, so "f" and "g" must then
// be absent. Unknown keys anywhere are rejected.

namespace swfront {

struct ModelConfig {
    ModelSpec spec;
    std::string canonical;   // normalized JSON text, used for hashing
};

ModelConfig parse_model_config(std::string_view json_text);
ModelConfig load_model_config(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Names of the overridable tolerance fields, in declaration order, with
/// their current values rendered as JSON numbers.
std::string tolerances_json(const Tolerances& tol);

}  // namespace swfront
