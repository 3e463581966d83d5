#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lhits/core/pipeline.hpp"
#include "lhits/pde/generate.hpp"
#include "lhits/persist/binary.hpp"

namespace lhits::persist {

using Json = nlohmann::json;

enum class KeyType { UInt, Float, String, Bool, UIntList };

struct KeySpec {
    std::string key;
    KeyType type;
    Json fhn_default;  // null: required or derived
    Json ks_default;
    std::function<std::string(const Json&)> check = {};  // returns an error message or ""
};

namespace detail {

inline std::string positive(const Json& v) { return v.get<double>() > 0.0 ? "" : "must be positive"; }
inline std::string at_least_one(const Json& v) { return v.get<std::uint64_t>() >= 1 ? "" : "must be at least 1"; }
inline std::string nonempty_positive_list(const Json& v)
{
    if (v.empty())
        return "must not be empty";
    for (const auto& e : v)
        if (e.get<std::uint64_t>() == 0)
            return "entries must be positive";
    return "";
}
inline std::string one_of(const Json& v, std::initializer_list<const char*> allowed)
{
    for (const char* a : allowed)
        if (v.get<std::string>() == a)
            return "";
    std::string msg = "must be one of";
    for (const char* a : allowed)
        msg += std::string(" '") + a + "'";
    return msg;
}

inline Json dyadic_ladder() { return Json::array({1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024}); }

} // namespace detail

/// Every accepted key with its defaults for the FHN and KS systems.
inline const std::vector<KeySpec>& config_schema()
{
    using detail::at_least_one;
    using detail::positive;
    static const std::vector<KeySpec> schema = {
        {"system", KeyType::String, nullptr, nullptr, [](const Json& v) { return detail::one_of(v, {"fhn", "ks"}); }},
        {"grid.points", KeyType::UInt, 101, 120,
         [](const Json& v) { return v.get<std::uint64_t>() >= 4 ? "" : "must be at least 4"; }},
        {"grid.length", KeyType::Float, 1.0, 22.0, positive},
        {"fhn.eps", KeyType::Float, 0.015, 0.015, positive},
        {"fhn.substeps", KeyType::UInt, 5, 5, at_least_one},
        {"ks.uxx_coeff", KeyType::Float, 0.5, 0.5},
        {"dt", KeyType::Float, 0.01, 0.05, positive},
        {"steps", KeyType::UInt, 5120, 5121,
         [](const Json& v) { return v.get<std::uint64_t>() >= 2 ? "" : "must be at least 2"; }},
        {"burn_in", KeyType::UInt, 10000, 2000},
        {"data.train", KeyType::UInt, 4, 10, at_least_one},
        {"data.val", KeyType::UInt, 1, 5, at_least_one},
        {"data.test", KeyType::UInt, 1, 5, at_least_one},
        {"ic.fhn.base_u", KeyType::Float, 0.1, 0.1},
        {"ic.fhn.base_v", KeyType::Float, 0.05, 0.05},
        {"ic.fhn.amplitude_min", KeyType::Float, 0.5, 0.5},
        {"ic.fhn.amplitude_max", KeyType::Float, 0.9, 0.9},
        {"ic.fhn.center_min", KeyType::Float, 0.2, 0.2},
        {"ic.fhn.center_max", KeyType::Float, 0.8, 0.8},
        {"ic.fhn.width_min", KeyType::Float, 0.05, 0.05, positive},
        {"ic.fhn.width_max", KeyType::Float, 0.15, 0.15, positive},
        {"ic.ks.max_modes", KeyType::UInt, 5, 5, at_least_one},
        {"ic.ks.max_wavenumber", KeyType::UInt, 3, 3, at_least_one},
        {"ic.ks.amplitude", KeyType::Float, 1.0, 1.0, positive},
        {"latent_dim", KeyType::UInt, 2, 8, at_least_one},
        {"z_list", KeyType::UIntList, Json::array({1, 2, 4, 6, 8, 10}), Json::array({1, 2, 4, 6, 8, 10}),
         detail::nonempty_positive_list},
        {"ae.hidden", KeyType::UIntList, Json::array({100, 100, 100}), Json::array({120, 120, 100}),
         detail::nonempty_positive_list},
        {"ae.epochs", KeyType::UInt, 5000, 5000, at_least_one},
        {"stepper.hidden", KeyType::UIntList, Json::array({128, 128, 128, 128, 128, 128}),
         Json::array({1024, 1024, 1024}), detail::nonempty_positive_list},
        {"stepper.steps", KeyType::UIntList, detail::dyadic_ladder(), detail::dyadic_ladder(),
         [](const Json& v) -> std::string {
             if (v.empty())
                 return "must not be empty";
             for (std::size_t i = 0; i < v.size(); ++i) {
                 if (!nn::is_power_of_two(v[i].get<std::size_t>()))
                     return "step multiple " + v[i].dump() + " is not a power of two";
                 for (std::size_t j = 0; j < i; ++j)
                     if (v[j] == v[i])
                         return "duplicate step multiple " + v[i].dump();
             }
             return "";
         }},
        {"train.epochs", KeyType::UInt, 20000, 20000, at_least_one},
        {"train.batch", KeyType::UInt, 32, 32, at_least_one},
        {"train.lr", KeyType::Float, 1e-3, 1e-3, positive},
        {"train.unroll", KeyType::UInt, 1, 1, at_least_one},
        {"activation", KeyType::String, "relu", "relu",
         [](const Json& v) { return detail::one_of(v, {"relu", "identity"}); }},
        {"normalize", KeyType::String, "standardize", "standardize",
         [](const Json& v) { return detail::one_of(v, {"standardize", "none"}); }},
        {"interpolant", KeyType::String, "cubic", "cubic",
         [](const Json& v) { return detail::one_of(v, {"cubic", "linear"}); }},
        {"seed", KeyType::UInt, 0, 0},
        {"horizon", KeyType::UInt, 0, 0},
        {"cv.horizon", KeyType::UInt, 0, 0},
        {"eval.stride", KeyType::UInt, 1000, 1000, at_least_one},
        {"baseline.stepper.hidden", KeyType::UIntList, nullptr, nullptr, detail::nonempty_positive_list},
        {"baseline.epochs", KeyType::UInt, nullptr, nullptr, at_least_one},
        {"benchmark.repeats", KeyType::UInt, 3, 3, at_least_one},
    };
    return schema;
}

inline const KeySpec* find_key(const std::string& key)
{
    for (const auto& k : config_schema())
        if (k.key == key)
            return &k;
    return nullptr;
}

/// Flat, fully defaulted and validated experiment configuration.
class ExperimentConfig {
public:
    ExperimentConfig() = default;
    explicit ExperimentConfig(Json flat) : values_(std::move(flat)) {}

    const Json& json() const noexcept { return values_; }

    std::uint64_t u(const std::string& key) const { return at(key).get<std::uint64_t>(); }
    double f(const std::string& key) const { return at(key).get<double>(); }
    std::string s(const std::string& key) const { return at(key).get<std::string>(); }
    std::vector<std::size_t> list(const std::string& key) const { return at(key).get<std::vector<std::size_t>>(); }

    pde::SystemTag system() const { return pde::system_from_string(s("system")); }
    std::size_t state_dim() const { return system() == pde::SystemTag::FHN ? 2 * u("grid.points") : u("grid.points"); }

    /// FNV-1a hash of the canonical JSON, as 16 hex digits.
    std::string fingerprint() const
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : values_.dump()) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

private:
    const Json& at(const std::string& key) const
    {
        auto it = values_.find(key);
        if (it == values_.end())
            throw ConfigError(key, "not set");
        return *it;
    }

    Json values_ = Json::object();
};

namespace detail {

inline void flatten(const Json& j, const std::string& prefix, Json& out)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object())
            flatten(*it, key, out);
        else
            out[key] = *it;
    }
}

/// Coerces v to the key's type or throws ConfigError.
inline Json coerce(const KeySpec& spec, const Json& v)
{
    auto fail = [&](const std::string& want) -> Json { throw ConfigError(spec.key, "expected " + want + ", got " + v.dump()); };
    switch (spec.type) {
    case KeyType::UInt:
        if (v.is_number_unsigned())
            return v;
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
            return v.get<std::uint64_t>();
        return fail("a non-negative integer");
    case KeyType::Float:
        if (v.is_number())
            return v.get<double>();
        return fail("a number");
    case KeyType::String:
        if (v.is_string())
            return v;
        return fail("a string");
    case KeyType::Bool:
        if (v.is_boolean())
            return v;
        return fail("a boolean");
    case KeyType::UIntList: {
        if (!v.is_array())
            return fail("a list of non-negative integers");
        Json out = Json::array();
        for (const auto& e : v) {
            if (e.is_number_unsigned() || (e.is_number_integer() && e.get<std::int64_t>() >= 0))
                out.push_back(e.get<std::uint64_t>());
            else
                return fail("a list of non-negative integers");
        }
        return out;
    }
    }
    return fail("a known type");
}

/// Parses an override value: JSON if it parses, a comma list for list keys,
/// otherwise a bare string.
inline Json parse_override_value(const KeySpec& spec, const std::string& text)
{
    if (spec.type == KeyType::UIntList && !text.empty() && text.front() != '[') {
        Json arr = Json::array();
        std::size_t start = 0;
        while (start <= text.size()) {
            const std::size_t comma = text.find(',', start);
            const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            try {
                std::size_t used = 0;
                const long long value = std::stoll(item, &used);
                if (used != item.size() || value < 0)
                    throw std::invalid_argument(item);
                arr.push_back(static_cast<std::uint64_t>(value));
            } catch (const std::exception&) {
                throw ConfigError(spec.key, "expected a comma-separated list of non-negative integers, got '" + text + "'");
            }
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        return arr;
    }
    if (spec.type == KeyType::String)
        return text;
    const Json parsed = Json::parse(text, nullptr, false);
    if (parsed.is_discarded())
        throw ConfigError(spec.key, "cannot parse value '" + text + "'");
    return parsed;
}

} // namespace detail

/// Applies defaults for the selected system and validates every key.
inline ExperimentConfig finalize_config(Json flat)
{
    for (auto it = flat.begin(); it != flat.end(); ++it)
        if (!find_key(it.key()))
            throw ConfigError(it.key(), "unknown key");
    if (!flat.contains("system"))
        throw ConfigError("system", "required key missing");
    for (const auto& spec : config_schema())
        if (flat.contains(spec.key))
            flat[spec.key] = detail::coerce(spec, flat[spec.key]);
    if (const auto msg = config_schema().front().check(flat["system"]); !msg.empty())
        throw ConfigError("system", msg);
    const bool fhn = flat["system"] == "fhn";
    for (const auto& spec : config_schema()) {
        if (!flat.contains(spec.key)) {
            const Json& d = fhn ? spec.fhn_default : spec.ks_default;
            if (!d.is_null())
                flat[spec.key] = d;
        }
    }
    if (!flat.contains("baseline.stepper.hidden"))
        flat["baseline.stepper.hidden"] = flat["stepper.hidden"];
    if (!flat.contains("baseline.epochs"))
        flat["baseline.epochs"] = flat["train.epochs"];
    for (const auto& spec : config_schema())
        if (spec.check)
            if (const auto msg = spec.check(flat[spec.key]); !msg.empty())
                throw ConfigError(spec.key, msg);

    ExperimentConfig cfg(std::move(flat));
    const std::size_t n = cfg.state_dim();
    if (cfg.u("latent_dim") >= n)
        throw ConfigError("latent_dim", "latent dim " + std::to_string(cfg.u("latent_dim")) +
                                            " must be smaller than the state dim " + std::to_string(n));
    for (auto z : cfg.list("z_list"))
        if (z >= n)
            throw ConfigError("z_list", "latent dim " + std::to_string(z) + " must be smaller than the state dim " +
                                            std::to_string(n));
    if (cfg.system() == pde::SystemTag::KS && cfg.u("grid.points") % 2 != 0)
        throw ConfigError("grid.points", "KS spectral grid needs an even number of points");
    const auto steps = cfg.list("stepper.steps");
    const std::size_t largest = *std::max_element(steps.begin(), steps.end());
    if (largest >= cfg.u("steps"))
        throw ConfigError("stepper.steps", "step multiple " + std::to_string(largest) +
                                               " leaves no training pairs in trajectories of " +
                                               std::to_string(cfg.u("steps")) + " states");
    if (cfg.f("ic.fhn.amplitude_min") > cfg.f("ic.fhn.amplitude_max") ||
        cfg.f("ic.fhn.center_min") > cfg.f("ic.fhn.center_max") || cfg.f("ic.fhn.width_min") > cfg.f("ic.fhn.width_max"))
        throw ConfigError("ic.fhn", "range minimum exceeds maximum");
    return cfg;
}

/// Parses JSON text (nested objects are flattened to dotted keys) and applies
/// key=value overrides before validation.
inline ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {})
{
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded())
        throw ConfigError("<document>", "invalid JSON");
    if (!doc.is_object())
        throw ConfigError("<document>", "top level must be an object");
    Json flat = Json::object();
    detail::flatten(doc, "", flat);
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError(o, "override must have the form key=value");
        const std::string key = o.substr(0, eq);
        const KeySpec* spec = find_key(key);
        if (!spec)
            throw ConfigError(key, "unknown key");
        flat[key] = detail::parse_override_value(*spec, o.substr(eq + 1));
    }
    return finalize_config(std::move(flat));
}

inline ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {})
{
    const Bytes bytes = read_file(path);
    return parse_config(std::string(bytes.begin(), bytes.end()), overrides);
}

inline pde::SimulationSpec simulation_spec(const ExperimentConfig& cfg)
{
    pde::SimulationSpec spec;
    spec.system = cfg.system();
    const bool ks = spec.system == pde::SystemTag::KS;
    spec.grid = pde::Grid1D::make(cfg.u("grid.points"), cfg.f("grid.length"), ks);
    spec.dt = cfg.f("dt");
    spec.steps = cfg.u("steps");
    spec.burn_in = cfg.u("burn_in");
    spec.fhn_substeps = cfg.u("fhn.substeps");
    spec.fhn.eps = cfg.f("fhn.eps");
    spec.ks.uxx_coeff = cfg.f("ks.uxx_coeff");
    auto& ic = spec.ic;
    ic.fhn_base_u = cfg.f("ic.fhn.base_u");
    ic.fhn_base_v = cfg.f("ic.fhn.base_v");
    ic.fhn_amplitude_min = cfg.f("ic.fhn.amplitude_min");
    ic.fhn_amplitude_max = cfg.f("ic.fhn.amplitude_max");
    ic.fhn_center_min = cfg.f("ic.fhn.center_min");
    ic.fhn_center_max = cfg.f("ic.fhn.center_max");
    ic.fhn_width_min = cfg.f("ic.fhn.width_min");
    ic.fhn_width_max = cfg.f("ic.fhn.width_max");
    ic.ks_max_modes = cfg.u("ic.ks.max_modes");
    ic.ks_max_wavenumber = cfg.u("ic.ks.max_wavenumber");
    ic.ks_amplitude = cfg.f("ic.ks.amplitude");
    return spec;
}

/// L-HiTS training settings; `baseline` selects the identity-coder full-state variant.
inline PipelineConfig pipeline_config(const ExperimentConfig& cfg, std::size_t threads, bool baseline = false)
{
    PipelineConfig p;
    p.normalize = pde::normalizer_mode_from_string(cfg.s("normalize"));
    p.identity_coder = baseline;
    p.latent_dim = cfg.u("latent_dim");
    p.ae_hidden = cfg.list("ae.hidden");
    p.activation = nn::activation_from_string(cfg.s("activation"));
    p.ae_train.epochs = cfg.u("ae.epochs");
    p.ae_train.batch_size = cfg.u("train.batch");
    p.ae_train.adam.lr = cfg.f("train.lr");
    p.stepper.hidden = cfg.list(baseline ? "baseline.stepper.hidden" : "stepper.hidden");
    p.stepper.train.epochs = cfg.u(baseline ? "baseline.epochs" : "train.epochs");
    p.stepper.train.batch_size = cfg.u("train.batch");
    p.stepper.train.adam.lr = cfg.f("train.lr");
    p.stepper.unroll = cfg.u("train.unroll");
    p.step_multiples = cfg.list("stepper.steps");
    p.cv_horizon = cfg.u("cv.horizon");
    p.interpolant = hits::interpolant_from_string(cfg.s("interpolant"));
    p.seed = cfg.u("seed");
    p.threads = threads;
    return p;
}

} // namespace lhits::persist
