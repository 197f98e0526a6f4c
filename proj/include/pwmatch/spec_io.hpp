#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwmatch/errors.hpp"
#include "pwmatch/potential.hpp"

namespace pwmatch {

struct ProblemSpec {
    PotentialSpec potential;
    std::optional<PerturbationSpec> perturbation;
};

namespace detail {

inline double read_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw SchemaError(path, "not a finite number");
    return v;
}

inline std::vector<double> read_numbers(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(read_number(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline std::vector<std::vector<double>> read_number_rows(const nlohmann::json& j,
                                                         const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of arrays");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(read_numbers(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

}  // namespace detail

/// Parse and validate a problem document:
///   { "breakpoints": [...], "heights": [...], "boundary": "dirichlet",
///     "zero_order_polys": [[...], ...],                      (optional)
///     "perturbation": { "global_poly": [...] | "interval_polys": [[...], ...],
///                       "coupling": 1.0 } }                   (optional)
inline ProblemSpec parse_spec(const std::string& document) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError("$", std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("$", "expected a JSON object");
    if (!j.contains("breakpoints")) throw SchemaError("breakpoints", "missing");
    if (!j.contains("heights")) throw SchemaError("heights", "missing");
    if (j.contains("boundary")) {
        if (!j["boundary"].is_string() || j["boundary"].get<std::string>() != "dirichlet") {
            throw SchemaError("boundary", "only \"dirichlet\" outer conditions are supported");
        }
    }

    ProblemSpec out;
    out.potential.breakpoints = detail::read_numbers(j["breakpoints"], "breakpoints");
    out.potential.heights = detail::read_numbers(j["heights"], "heights");
    if (j.contains("zero_order_polys")) {
        out.potential.zero_order_polys =
            detail::read_number_rows(j["zero_order_polys"], "zero_order_polys");
    }
    out.potential.validate();

    if (j.contains("perturbation")) {
        const auto& pj = j["perturbation"];
        if (!pj.is_object()) throw SchemaError("perturbation", "expected an object");
        const bool global = pj.contains("global_poly");
        const bool per_interval = pj.contains("interval_polys");
        if (global == per_interval) {
            throw SchemaError("perturbation",
                              "give exactly one of \"global_poly\" or \"interval_polys\"");
        }
        PerturbationSpec p;
        if (global) {
            p = PerturbationSpec::global(
                detail::read_numbers(pj["global_poly"], "perturbation.global_poly"),
                out.potential.interval_count());
        } else {
            p.interval_polys =
                detail::read_number_rows(pj["interval_polys"], "perturbation.interval_polys");
        }
        if (pj.contains("coupling")) {
            p.coupling = detail::read_number(pj["coupling"], "perturbation.coupling");
        }
        p.validate(out.potential.interval_count());
        out.perturbation = std::move(p);
    }
    return out;
}

inline ProblemSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("$", "cannot open spec file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_spec(buf.str());
}

inline nlohmann::json to_json(const ProblemSpec& spec) {
    nlohmann::json j;
    j["breakpoints"] = spec.potential.breakpoints;
    j["heights"] = spec.potential.heights;
    j["boundary"] = "dirichlet";
    if (!spec.potential.zero_order_polys.empty()) {
        j["zero_order_polys"] = spec.potential.zero_order_polys;
    }
    if (spec.perturbation) {
        j["perturbation"]["interval_polys"] = spec.perturbation->interval_polys;
        j["perturbation"]["coupling"] = spec.perturbation->coupling;
    }
    return j;
}

inline std::string serialize_spec(const ProblemSpec& spec) { return to_json(spec).dump(2); }

}  // namespace pwmatch
