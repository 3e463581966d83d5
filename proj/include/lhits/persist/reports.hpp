#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lhits/core/experiments.hpp"
#include "lhits/persist/binary.hpp"

namespace lhits::persist {

using Json = nlohmann::json;

/// Round-trip decimal form; "inf"/"nan" for non-finite values.
inline std::string num(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline Json json_num(double v) { return std::isfinite(v) ? Json(v) : Json(num(v)); }

inline std::string join_steps(const std::vector<std::size_t>& steps)
{
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i)
        out += (i ? ";" : "") + std::to_string(steps[i]);
    return out;
}

/// Quotes a CSV field when it contains separators or quotes.
inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

// Timing columns always come last and end in "_seconds".

inline std::string prediction_csv(const PredictionReport& r)
{
    std::ostringstream out;
    out << "time,mse\n";
    for (std::size_t i = 0; i < r.checkpoint_times.size(); ++i)
        out << r.checkpoint_times[i] << ',' << num(r.mse_per_checkpoint[i]) << '\n';
    return out.str();
}

inline Json prediction_json(const PredictionReport& r)
{
    Json j;
    j["checkpoint_times"] = r.checkpoint_times;
    j["mse_per_checkpoint"] = Json::array();
    for (double v : r.mse_per_checkpoint)
        j["mse_per_checkpoint"].push_back(json_num(v));
    j["overall_mse"] = json_num(r.overall_mse);
    j["relative_l2"] = json_num(r.relative_l2);
    j["fingerprint"] = r.fingerprint;
    j["timing"] = {{"wall_clock_seconds", r.wall_clock_seconds}, {"scope", kTimingScope}};
    return j;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::ostringstream out;
    out << "z,latent_mse,reconstruction_mse,active_steps,error\n";
    for (const auto& r : rows)
        out << r.z << ',' << num(r.latent_mse) << ',' << num(r.reconstruction_mse) << ',' << join_steps(r.active_steps)
            << ',' << csv_field(r.error) << '\n';
    return out.str();
}

inline Json sweep_json(const std::vector<SweepRow>& rows)
{
    Json j = Json::array();
    for (const auto& r : rows)
        j.push_back({{"z", r.z},
                     {"latent_mse", json_num(r.latent_mse)},
                     {"reconstruction_mse", json_num(r.reconstruction_mse)},
                     {"active_steps", r.active_steps},
                     {"error", r.error}});
    return j;
}

inline std::string compare_csv(const std::vector<CompareRow>& rows)
{
    std::ostringstream out;
    out << "model,step,mse,evaluations,diverged,prediction_seconds\n";
    for (const auto& r : rows)
        out << r.label << ',' << r.step << ',' << num(r.mse) << ',' << r.evaluations << ',' << (r.diverged ? 1 : 0) << ','
            << num(r.seconds) << '\n';
    return out.str();
}

inline Json compare_json(const std::vector<CompareRow>& rows)
{
    Json j = Json::array();
    for (const auto& r : rows)
        j.push_back({{"model", r.label},
                     {"step", r.step},
                     {"mse", json_num(r.mse)},
                     {"evaluations", r.evaluations},
                     {"diverged", r.diverged},
                     {"timing", {{"prediction_seconds", r.seconds}, {"scope", kTimingScope}}}});
    return j;
}

inline std::string benchmark_csv(const std::vector<BenchmarkRow>& rows)
{
    std::ostringstream out;
    out << "method,latent_dim,active_steps,mse,relative_l2,prediction_seconds\n";
    for (const auto& r : rows)
        out << r.label << ',' << r.latent_dim << ',' << join_steps(r.active_steps) << ',' << num(r.mse) << ','
            << num(r.relative_l2) << ',' << num(r.seconds) << '\n';
    return out.str();
}

inline Json benchmark_json(const std::vector<BenchmarkRow>& rows)
{
    Json j = Json::array();
    for (const auto& r : rows)
        j.push_back({{"method", r.label},
                     {"latent_dim", r.latent_dim},
                     {"active_steps", r.active_steps},
                     {"mse", json_num(r.mse)},
                     {"relative_l2", json_num(r.relative_l2)},
                     {"timing", {{"prediction_seconds", r.seconds}, {"scope", kTimingScope}}}});
    return j;
}

/// Writes `<stem>.csv` and `<stem>.json` next to each other.
inline void write_report(const std::filesystem::path& csv_path, const std::string& csv, const Json& json)
{
    write_file_atomic(csv_path, csv);
    std::filesystem::path json_path = csv_path;
    json_path.replace_extension(".json");
    write_file_atomic(json_path, json.dump(2) + "\n");
}

} // namespace lhits::persist
