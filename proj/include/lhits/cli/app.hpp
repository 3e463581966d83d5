#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lhits/core/experiments.hpp"
#include "lhits/persist/config.hpp"
#include "lhits/persist/dataset.hpp"
#include "lhits/persist/model_file.hpp"
#include "lhits/persist/reports.hpp"

namespace lhits::cli {

/// Process exit status per error category.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kConfig = 3,
    kFormat = 4,
    kIo = 5,
    kDivergence = 6,
    kTraining = 7,
    kSelection = 8,
    kInvalidInput = 9,
};

struct Options {
    std::string config;
    std::string out;
    std::string data;
    std::string model;
    std::string baseline;
    std::string pred;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
    std::optional<std::size_t> horizon;
    std::vector<std::size_t> z;
    std::vector<std::string> overrides;
    std::size_t trajectory = 0;
};

struct Splits {
    pde::TrajectorySet train, val, test;
};

inline Splits split_dataset(const pde::TrajectorySet& set, const persist::ExperimentConfig& cfg)
{
    const std::size_t tr = cfg.u("data.train"), va = cfg.u("data.val"), te = cfg.u("data.test");
    if (set.count() < tr + va + te)
        throw ParameterError("dataset holds " + std::to_string(set.count()) + " trajectories, config needs " +
                             std::to_string(tr + va + te) + " (train + val + test)");
    return {set.slice(0, tr), set.slice(tr, va), set.slice(tr + va, te)};
}

namespace detail {

inline std::vector<std::string> config_overrides(const Options& o)
{
    std::vector<std::string> ov = o.overrides;
    if (o.seed)
        ov.push_back("seed=" + std::to_string(*o.seed));
    return ov;
}

/// Config from --config, else the one stored in the model file, plus overrides.
inline persist::ExperimentConfig resolve_config(const Options& o, const persist::Json* stored = nullptr)
{
    auto ov = config_overrides(o);
    if (!o.config.empty())
        return persist::load_config(o.config, ov);
    if (stored && stored->is_object() && !stored->empty())
        return persist::parse_config(stored->dump(), ov);
    throw ConfigError("--config", "a config file is required for this command");
}

inline void require(const std::string& value, const std::string& flag)
{
    if (value.empty())
        throw ConfigError(flag, "flag is required for this command");
}

inline std::size_t threads_of(const Options& o) { return resolve_threads(o.threads); }

inline std::size_t horizon_of(const Options& o, const persist::ExperimentConfig& cfg)
{
    return o.horizon ? *o.horizon : cfg.u("horizon");
}

inline std::filesystem::path sibling(const std::filesystem::path& p, const std::string& suffix)
{
    std::filesystem::path out = p;
    out.replace_extension();
    out += suffix;
    return out;
}

inline const Matrix& test_trajectory(const Splits& s, std::size_t index)
{
    if (index >= s.test.count())
        throw ParameterError("test trajectory " + std::to_string(index) + " out of range (" +
                             std::to_string(s.test.count()) + " available)");
    return s.test.trajectories[index];
}

} // namespace detail

inline int cmd_generate(const Options& o, std::ostream& out)
{
    detail::require(o.out, "--out");
    const auto cfg = detail::resolve_config(o);
    const std::size_t count = cfg.u("data.train") + cfg.u("data.val") + cfg.u("data.test");
    const auto set = pde::generate_trajectories(persist::simulation_spec(cfg), count, cfg.u("seed"));
    persist::save_dataset(o.out, set);
    out << "generate: wrote " << count << " trajectories of " << set.steps() << " x " << set.state_dim() << " to "
        << o.out << "\n";
    return kOk;
}

inline persist::ModelMetadata metadata_for(const persist::ExperimentConfig& cfg)
{
    return {cfg.u("seed"), cfg.fingerprint(), cfg.json()};
}

inline int cmd_train(const Options& o, std::ostream& out, bool baseline)
{
    detail::require(o.data, "--data");
    detail::require(o.out, "--out");
    auto ov = detail::config_overrides(o);
    if (o.z.size() > 1)
        throw ConfigError("--z", "train takes a single latent dim");
    if (o.z.size() == 1)
        ov.push_back("latent_dim=" + std::to_string(o.z.front()));
    Options with = o;
    with.overrides = ov;
    with.seed.reset();
    const auto cfg = detail::resolve_config(with);
    const auto splits = split_dataset(persist::load_dataset(o.data), cfg);
    const auto trained = train_lhits(splits.train, splits.val, persist::pipeline_config(cfg, detail::threads_of(o), baseline));
    persist::save_model(o.out, trained.model, metadata_for(cfg));
    out << "train: " << (baseline ? "identity-coder baseline" : "latent model") << " with latent dim "
        << trained.model.latent_dim() << ", active steps " << persist::join_steps(active_steps(trained.model))
        << ", written to " << o.out << "\n";
    return kOk;
}

inline int cmd_predict(const Options& o, std::ostream& out)
{
    detail::require(o.model, "--model");
    detail::require(o.data, "--data");
    detail::require(o.out, "--out");
    const auto loaded = persist::load_model(o.model);
    const auto cfg = detail::resolve_config(o, &loaded.metadata.config);
    const auto splits = split_dataset(persist::load_dataset(o.data), cfg);
    const Matrix& truth = detail::test_trajectory(splits, o.trajectory);
    const std::size_t horizon = o.horizon ? *o.horizon : resolve_horizon(cfg.u("horizon"), splits.test);
    Stopwatch sw;
    const Matrix pred = lhits_predict(loaded.model, truth.row(0), horizon);
    const double seconds = sw.seconds();
    persist::save_dataset(o.out, pde::TrajectorySet{{pred}, splits.test.dt, splits.test.system});
    if (static_cast<std::size_t>(truth.rows()) > horizon) {
        auto report = evaluate(pred, truth.topRows(static_cast<Eigen::Index>(horizon + 1)), cfg.u("eval.stride"));
        report.wall_clock_seconds = seconds;
        report.fingerprint = loaded.metadata.fingerprint;
        persist::write_report(detail::sibling(o.out, ".report.csv"), persist::prediction_csv(report),
                              persist::prediction_json(report));
        out << "predict: horizon " << horizon << ", overall MSE " << persist::num(report.overall_mse) << "\n";
    } else {
        out << "predict: horizon " << horizon << " exceeds the stored truth; no report written\n";
    }
    return kOk;
}

inline int cmd_evaluate(const Options& o, std::ostream& out)
{
    detail::require(o.pred, "--pred");
    detail::require(o.data, "--data");
    detail::require(o.out, "--out");
    const auto cfg = detail::resolve_config(o);
    const auto pred_set = persist::load_dataset(o.pred);
    if (pred_set.count() != 1)
        throw ParameterError("prediction file must hold exactly one trajectory");
    const auto splits = split_dataset(persist::load_dataset(o.data), cfg);
    const Matrix& truth = detail::test_trajectory(splits, o.trajectory);
    const Matrix& pred = pred_set.trajectories.front();
    if (pred.rows() > truth.rows())
        throw ShapeError("prediction has " + std::to_string(pred.rows()) + " rows, truth only " +
                         std::to_string(truth.rows()));
    auto report = evaluate(pred, truth.topRows(pred.rows()), cfg.u("eval.stride"));
    report.fingerprint = cfg.fingerprint();
    persist::write_report(o.out, persist::prediction_csv(report), persist::prediction_json(report));
    out << "evaluate: overall MSE " << persist::num(report.overall_mse) << ", relative l2 "
        << persist::num(report.relative_l2) << "\n";
    return kOk;
}

inline int cmd_sweep(const Options& o, std::ostream& out)
{
    detail::require(o.data, "--data");
    detail::require(o.out, "--out");
    auto ov = detail::config_overrides(o);
    if (!o.z.empty())
        ov.push_back("z_list=" + persist::Json(o.z).dump());
    Options with = o;
    with.overrides = ov;
    with.seed.reset();
    const auto cfg = detail::resolve_config(with);
    const auto splits = split_dataset(persist::load_dataset(o.data), cfg);
    const auto rows = sensitivity_sweep(splits.train, splits.val, splits.test, cfg.list("z_list"),
                                        persist::pipeline_config(cfg, detail::threads_of(o)), detail::horizon_of(o, cfg));
    persist::write_report(o.out, persist::sweep_csv(rows), persist::sweep_json(rows));
    out << "sweep: " << rows.size() << " rows written to " << o.out << "\n";
    return kOk;
}

inline int cmd_compare(const Options& o, std::ostream& out)
{
    detail::require(o.model, "--model");
    detail::require(o.data, "--data");
    detail::require(o.out, "--out");
    const auto loaded = persist::load_model(o.model);
    const auto cfg = detail::resolve_config(o, &loaded.metadata.config);
    const auto splits = split_dataset(persist::load_dataset(o.data), cfg);
    const auto rows =
        compare_individual_vs_coupled(loaded.model, splits.test, detail::horizon_of(o, cfg), detail::threads_of(o));
    persist::write_report(o.out, persist::compare_csv(rows), persist::compare_json(rows));
    out << "compare: " << rows.size() << " rows written to " << o.out << "\n";
    return kOk;
}

inline int cmd_benchmark(const Options& o, std::ostream& out)
{
    detail::require(o.model, "--model");
    detail::require(o.data, "--data");
    detail::require(o.out, "--out");
    const auto loaded = persist::load_model(o.model);
    const auto cfg = detail::resolve_config(o, &loaded.metadata.config);
    const auto splits = split_dataset(persist::load_dataset(o.data), cfg);
    LhitsModel baseline;
    if (!o.baseline.empty()) {
        baseline = persist::load_model(o.baseline).model;
        if (!baseline.identity_coder())
            throw ParameterError("--baseline model must use the identity coder");
    } else {
        baseline = train_lhits(splits.train, splits.val, persist::pipeline_config(cfg, detail::threads_of(o), true)).model;
    }
    const std::size_t horizon = detail::horizon_of(o, cfg);
    const std::size_t repeats = cfg.u("benchmark.repeats");
    std::vector<BenchmarkRow> rows{benchmark_model("HiTS", baseline, splits.test, horizon, repeats),
                                   benchmark_model("L-HiTS", loaded.model, splits.test, horizon, repeats)};
    persist::write_report(o.out, persist::benchmark_csv(rows), persist::benchmark_json(rows));
    out << "benchmark: HiTS " << persist::num(rows[0].seconds) << " s, L-HiTS " << persist::num(rows[1].seconds)
        << " s\n";
    return kOk;
}

inline int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e))
        return kConfig;
    if (dynamic_cast<const FormatError*>(&e))
        return kFormat;
    if (dynamic_cast<const IoError*>(&e))
        return kIo;
    if (dynamic_cast<const DivergenceError*>(&e))
        return kDivergence;
    if (dynamic_cast<const TrainingError*>(&e))
        return kTraining;
    if (dynamic_cast<const SelectionError*>(&e))
        return kSelection;
    if (dynamic_cast<const ShapeError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
        dynamic_cast<const ExtrapolationError*>(&e))
        return kInvalidInput;
    return kFailure;
}

/// Parses argv and runs one subcommand; returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Latent hierarchical neural time stepping for multiscale PDE trajectories", "lhits"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "Experiment config (JSON)");
        sub->add_option("--out", o.out, "Output path");
        sub->add_option("--seed", o.seed, "Override the config seed");
        sub->add_option("--threads", o.threads, "Worker threads (default: $LHITS_THREADS, else all cores)");
        sub->add_option("--horizon", o.horizon, "Prediction horizon in base steps (0: full test length)");
        sub->add_option("--z", o.z, "Latent dims, comma separated")->delimiter(',');
        sub->add_option("--set", o.overrides, "Config override key=value (repeatable)");
    };
    struct Sub {
        CLI::App* app;
        std::string stage;
    };
    std::vector<Sub> subs;
    auto add = [&](const std::string& name, const std::string& help) {
        CLI::App* s = app.add_subcommand(name, help);
        common(s);
        subs.push_back({s, name});
        return s;
    };
    add("generate", "Simulate trajectories and write a dataset file");
    auto* train = add("train", "Train autoencoder and stepper bank, select the plan, write a model file");
    train->add_option("--data", o.data, "Dataset file");
    bool baseline = false;
    train->add_flag("--baseline", baseline, "Train the identity-coder full-state model instead");
    auto* predict = add("predict", "Predict from the first state of a test trajectory");
    predict->add_option("--model", o.model, "Model file");
    predict->add_option("--data", o.data, "Dataset file");
    predict->add_option("--trajectory", o.trajectory, "Test trajectory index");
    auto* evaluate_cmd = add("evaluate", "Score a prediction file against the test truth");
    evaluate_cmd->add_option("--pred", o.pred, "Prediction file");
    evaluate_cmd->add_option("--data", o.data, "Dataset file");
    evaluate_cmd->add_option("--trajectory", o.trajectory, "Test trajectory index");
    auto* sweep = add("sweep", "Latent-dimension sensitivity sweep");
    sweep->add_option("--data", o.data, "Dataset file");
    auto* compare = add("compare", "Individual steppers against the coupled model");
    compare->add_option("--model", o.model, "Model file");
    compare->add_option("--data", o.data, "Dataset file");
    auto* bench = add("benchmark", "Prediction time of the latent model against the full-state baseline");
    bench->add_option("--model", o.model, "Model file");
    bench->add_option("--data", o.data, "Dataset file");
    bench->add_option("--baseline", o.baseline, "Identity-coder model file (trained on the fly if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        std::ostringstream help_text;
        const int code = app.exit(e, help_text, err);
        out << help_text.str();
        return code == 0 ? kOk : kUsage;
    }

    std::string stage = "lhits";
    try {
        for (const auto& s : subs) {
            if (!s.app->parsed())
                continue;
            stage = s.stage;
            if (s.stage == "generate")
                return cmd_generate(o, out);
            if (s.stage == "train")
                return cmd_train(o, out, baseline);
            if (s.stage == "predict")
                return cmd_predict(o, out);
            if (s.stage == "evaluate")
                return cmd_evaluate(o, out);
            if (s.stage == "sweep")
                return cmd_sweep(o, out);
            if (s.stage == "compare")
                return cmd_compare(o, out);
            if (s.stage == "benchmark")
                return cmd_benchmark(o, out);
        }
    } catch (const std::exception& e) {
        err << "lhits " << stage << ": " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kUsage;
}

} // namespace lhits::cli
