#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lhits/cli/app.hpp"

namespace lhits::testing {

namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out;
    std::string err;
};

inline Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "lhits");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

inline std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

/// Drops the trailing prediction_seconds column from a CSV report.
inline std::string strip_timing_csv(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line, out;
    bool timed = false;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            timed = line.ends_with(",prediction_seconds");
            first = false;
        }
        if (timed)
            line = line.substr(0, line.rfind(','));
        out += line + "\n";
    }
    return out;
}

inline persist::Json strip_timing_json(persist::Json j)
{
    if (j.is_object()) {
        j.erase("timing");
        for (auto& [k, v] : j.items())
            v = strip_timing_json(v);
    } else if (j.is_array()) {
        for (auto& v : j)
            v = strip_timing_json(v);
    }
    return j;
}

inline const char* kTinyConfig = R"({
  "system": "fhn",
  "grid": {"points": 11},
  "steps": 64, "burn_in": 50, "fhn.substeps": 2,
  "data": {"train": 2, "val": 1, "test": 1},
  "latent_dim": 2, "z_list": [1, 2],
  "ae": {"hidden": [8], "epochs": 2},
  "stepper": {"hidden": [8], "steps": [1, 2, 4, 8]},
  "train": {"epochs": 2},
  "baseline": {"stepper.hidden": [8], "epochs": 2},
  "eval.stride": 16, "benchmark.repeats": 1, "seed": 4
})";

/// Runs every subcommand once on the tiny config, writing `<tag>`-prefixed files into dir.
/// Returns an empty string on success, else a description of the failing command.
inline std::string run_cli_chain(const fs::path& dir, const std::string& config, const std::string& tag)
{
    const auto t = [&](const std::string& n) { return (dir / (tag + n)).string(); };
    const std::vector<std::vector<std::string>> cmds{
        {"generate", "--config", config, "--out", t("data.lhts")},
        {"train", "--config", config, "--data", t("data.lhts"), "--out", t("model.lhtm"), "--threads", "1"},
        {"train", "--config", config, "--data", t("data.lhts"), "--out", t("base.lhtm"), "--baseline"},
        {"predict", "--model", t("model.lhtm"), "--data", t("data.lhts"), "--out", t("pred.lhts")},
        {"evaluate", "--config", config, "--pred", t("pred.lhts"), "--data", t("data.lhts"), "--out", t("eval.csv")},
        {"sweep", "--config", config, "--data", t("data.lhts"), "--z", "1,2", "--out", t("sweep.csv"), "--threads", "2"},
        {"compare", "--model", t("model.lhtm"), "--data", t("data.lhts"), "--out", t("compare.csv")},
        {"benchmark", "--model", t("model.lhtm"), "--baseline", t("base.lhtm"), "--data", t("data.lhts"), "--out",
         t("bench.csv")},
    };
    for (const auto& c : cmds) {
        const auto r = run(c);
        if (r.code != 0)
            return c.front() + " exited " + std::to_string(r.code) + ": " + r.err;
    }
    return "";
}

inline const std::vector<std::string> kChainBinaries{"data.lhts", "model.lhtm", "base.lhtm", "pred.lhts"};
inline const std::vector<std::string> kChainReports{"pred.report", "eval", "sweep", "compare", "bench"};

/// First output that differs between two chain runs, ignoring timing fields; empty if none.
inline std::string chain_difference(const fs::path& dir, const std::string& a, const std::string& b)
{
    for (const auto& f : kChainBinaries)
        if (slurp(dir / (a + f)) != slurp(dir / (b + f)))
            return f;
    for (const auto& f : kChainReports) {
        if (strip_timing_csv(slurp(dir / (a + f + ".csv"))) != strip_timing_csv(slurp(dir / (b + f + ".csv"))))
            return f + ".csv";
        if (strip_timing_json(persist::Json::parse(slurp(dir / (a + f + ".json")))) !=
            strip_timing_json(persist::Json::parse(slurp(dir / (b + f + ".json")))))
            return f + ".json";
    }
    return "";
}

} // namespace lhits::testing
