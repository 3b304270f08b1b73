#include "swfront/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "json.hpp"

#include "swfront/errors.hpp"

namespace swfront {

namespace {

using json = nlohmann::json;
using Field = std::variant<double Tolerances::*, int Tolerances::*>;

const std::vector<std::pair<const char*, Field>>& tolerance_fields() {
    static const std::vector<std::pair<const char*, Field>> fields = {
        {"fd_step", &Tolerances::fd_step},
        {"g_end_tol", &Tolerances::g_end_tol},
        {"f_zero_tol", &Tolerances::f_zero_tol},
        {"d0_zero_tol", &Tolerances::d0_zero_tol},
        {"slope_cap", &Tolerances::slope_cap},
        {"zero_slope_tol", &Tolerances::zero_slope_tol},
        {"rk_rtol", &Tolerances::rk_rtol},
        {"rk_atol", &Tolerances::rk_atol},
        {"min_step", &Tolerances::min_step},
        {"underflow_z", &Tolerances::underflow_z},
        {"bvp_n0", &Tolerances::bvp_n0},
        {"bvp_max_doublings", &Tolerances::bvp_max_doublings},
        {"bvp_seq_tol", &Tolerances::bvp_seq_tol},
        {"bvp_end_tol", &Tolerances::bvp_end_tol},
        {"monotone_slack", &Tolerances::monotone_slack},
        {"zero_detect_tol", &Tolerances::zero_detect_tol},
        {"slope_check_tol", &Tolerances::slope_check_tol},
        {"ivp_end_tol", &Tolerances::ivp_end_tol},
        {"shoot_tol", &Tolerances::shoot_tol},
        {"shoot_max_iter", &Tolerances::shoot_max_iter},
        {"cstar_tol", &Tolerances::cstar_tol},
        {"quad_rtol", &Tolerances::quad_rtol},
        {"quad_max_depth", &Tolerances::quad_max_depth},
        {"tail_k_max", &Tolerances::tail_k_max},
        {"plateau_ratio_band", &Tolerances::plateau_ratio_band},
        {"plateau_r2", &Tolerances::plateau_r2},
    };
    return fields;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ConfigError(what + " must be a number");
    return v.get<double>();
}

std::string text(const json& v, const std::string& what) {
    if (!v.is_string()) throw ConfigError(what + " must be an expression string");
    return v.get<std::string>();
}

std::vector<double> coefficients(const json& obj, const char* key) {
    if (!obj.contains(key)) throw ConfigError(std::string("polynomial preset needs \"") + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_array() || v.empty()) throw ConfigError(std::string("\"") + key + "\" must be a non-empty array");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, std::string("coefficient in \"") + key + "\""));
    return out;
}

Params numeric_params(const json& obj, const std::set<std::string>& names, const std::string& preset) {
    Params p;
    for (const auto& n : names) {
        if (obj.contains(n)) p[n] = number(obj.at(n), preset + "." + n);
    }
    return p;
}

Tolerances read_tolerances(const json& obj) {
    Tolerances tol;
    if (!obj.is_object()) throw ConfigError("\"tolerances\" must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool found = false;
        for (const auto& [name, field] : tolerance_fields()) {
            if (key != name) continue;
            found = true;
            if (std::holds_alternative<int Tolerances::*>(field)) {
                if (!value.is_number_integer()) throw ConfigError("tolerance \"" + key + "\" must be an integer");
                tol.*std::get<int Tolerances::*>(field) = value.get<int>();
            } else {
                tol.*std::get<double Tolerances::*>(field) = number(value, "tolerance \"" + key + "\"");
            }
        }
        if (!found) throw ConfigError("unknown tolerance \"" + key + "\"");
    }
    return tol;
}

ModelSpec preset_spec(const json& obj, double rho_bar, const Tolerances& tol) {
    const json& name_v = obj.at("preset");
    if (!name_v.is_string()) throw ConfigError("\"preset\" must be a string");
    const std::string name = name_v.get<std::string>();
    if (name == "linear_toy") {
        reject_unknown(obj, {"preset"}, "preset linear_toy");
        return preset_linear_toy(rho_bar);
    }
    if (name == "crowd_exponential") {
        const std::set<std::string> keys{"vmax", "gamma", "delta", "L"};
        reject_unknown(obj, {"preset", "vmax", "gamma", "delta", "L"}, "preset crowd_exponential");
        return preset_crowd_exponential(rho_bar, numeric_params(obj, keys, name));
    }
    if (name == "nelson") {
        reject_unknown(obj, {"preset", "L_ant", "tau", "v", "g"}, "preset nelson");
        if (!obj.contains("v") || !obj.contains("g")) throw ConfigError("preset nelson needs \"v\" and \"g\"");
        return preset_nelson(rho_bar, numeric_params(obj, {"L_ant", "tau"}, name), text(obj.at("v"), "nelson.v"),
                             text(obj.at("g"), "nelson.g"), tol);
    }
    if (name == "porous_medium") {
        reject_unknown(obj, {"preset", "m", "L"}, "preset porous_medium");
        return preset_porous_medium(rho_bar, numeric_params(obj, {"m", "L"}, name));
    }
    if (name == "polynomial") {
        reject_unknown(obj, {"preset", "D", "f", "g"}, "preset polynomial");
        return preset_polynomial(rho_bar, coefficients(obj, "D"), coefficients(obj, "f"), coefficients(obj, "g"));
    }
    throw ConfigError("unknown preset \"" + name + "\"");
}

}  // namespace

ModelConfig parse_model_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw JsonSyntaxError(e.what(), e.byte);
    }
    if (!doc.is_object()) throw ConfigError("model config must be a JSON object");
    reject_unknown(doc, {"name", "rho_bar", "D", "f", "g", "declared_class", "tolerances"}, "model config");

    const double rho_bar = doc.contains("rho_bar") ? number(doc.at("rho_bar"), "rho_bar") : 1.0;
    if (!(rho_bar > 0.0) || !std::isfinite(rho_bar)) throw ParameterError("rho_bar must be positive and finite");
    const Tolerances tol = doc.contains("tolerances") ? read_tolerances(doc.at("tolerances")) : Tolerances{};
    if (!doc.contains("D")) throw ConfigError("model config needs \"D\"");

    ModelSpec spec;
    const json& D = doc.at("D");
    if (D.is_object()) {
        if (!D.contains("preset")) throw ConfigError("object-valued \"D\" must name a preset");
        if (doc.contains("f") || doc.contains("g")) {
            throw ConfigError("a preset defines the whole model; remove \"f\" and \"g\"");
        }
        spec = preset_spec(D, rho_bar, tol);
    } else {
        if (!doc.contains("f") || !doc.contains("g")) throw ConfigError("expression models need \"D\", \"f\" and \"g\"");
        spec.rho_bar = rho_bar;
        spec.D = expression_field(text(D, "D"), rho_bar, tol.fd_step);
        spec.f = expression_field(text(doc.at("f"), "f"), rho_bar, tol.fd_step);
        spec.g = expression_field(text(doc.at("g"), "g"), rho_bar, tol.fd_step);
    }
    spec.tol = tol;
    if (doc.contains("name")) spec.name = text(doc.at("name"), "name");
    if (doc.contains("declared_class")) {
        const auto cls = diffusivity_class_from_string(text(doc.at("declared_class"), "declared_class"));
        if (!cls) throw ConfigError("declared_class must be one of D0, D1, D2, Dhat0, Dhat1");
        spec.declared_class = cls;
    }
    return {std::move(spec), doc.dump()};
}

ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_config(ss.str());
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::string tolerances_json(const Tolerances& tol) {
    json out = json::object();
    for (const auto& [name, field] : tolerance_fields()) {
        if (std::holds_alternative<int Tolerances::*>(field)) {
            out[name] = tol.*std::get<int Tolerances::*>(field);
        } else {
            out[name] = tol.*std::get<double Tolerances::*>(field);
        }
    }
    return out.dump();
}

}  // namespace swfront
