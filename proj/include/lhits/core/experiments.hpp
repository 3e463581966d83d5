#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lhits/core/pipeline.hpp"
#include "lhits/parallel.hpp"

namespace lhits {

/// Wall-clock timing note carried in report metadata.
inline constexpr const char* kTimingScope =
    "prediction wall clock; includes normalize, encode, coupling, interpolation, decode; excludes data loading";

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

struct PredictionReport {
    std::vector<std::size_t> checkpoint_times;
    std::vector<double> mse_per_checkpoint;
    double overall_mse = 0.0;
    double relative_l2 = 0.0;  // ||pred - truth||_F / ||truth||_F over all times
    double wall_clock_seconds = 0.0;
    std::string fingerprint;
};

/// Per-checkpoint state MSE at times 0, stride, 2*stride, ... plus aggregates.
/// Wall clock and fingerprint are left for the caller to fill.
inline PredictionReport evaluate(const Matrix& pred, const Matrix& truth, std::size_t checkpoint_stride)
{
    require_shape(pred.rows() == truth.rows() && pred.cols() == truth.cols(),
                  "evaluate: prediction " + shape_str(pred.rows(), pred.cols()) + " and truth " + shape_str(truth.rows(), truth.cols()) + " differ");
    if (checkpoint_stride == 0)
        throw ParameterError("evaluate: checkpoint stride must be positive");
    PredictionReport r;
    for (std::size_t t = 0; t < static_cast<std::size_t>(pred.rows()); t += checkpoint_stride) {
        r.checkpoint_times.push_back(t);
        const auto i = static_cast<Eigen::Index>(t);
        r.mse_per_checkpoint.push_back(mean_squared_difference(pred.row(i), truth.row(i)));
    }
    r.overall_mse = mean_squared_difference(pred, truth);
    const double denom = truth.norm();
    r.relative_l2 = denom > 0.0 ? (pred - truth).norm() / denom : (pred - truth).norm();
    return r;
}

struct PipelineScore {
    double latent_mse = 0.0;          // against the encoder image of the truth
    double reconstruction_mse = 0.0;  // against the true states
};

inline std::size_t resolve_horizon(std::size_t horizon, const pde::TrajectorySet& test)
{
    const std::size_t available = test.steps() - 1;
    if (horizon == 0)
        return available;
    if (horizon > available)
        throw ParameterError("horizon " + std::to_string(horizon) + " exceeds test trajectory length " +
                             std::to_string(available));
    return horizon;
}

/// Mean latent and reconstruction MSE of coupled predictions from each test
/// trajectory's first state.
inline PipelineScore score_model(const LhitsModel& model, const pde::TrajectorySet& test, std::size_t horizon)
{
    horizon = resolve_horizon(horizon, test);
    PipelineScore s;
    for (const auto& traj : test.trajectories) {
        const Matrix truth = traj.topRows(static_cast<Eigen::Index>(horizon + 1));
        const Matrix z_truth = model.to_latent(truth);
        const Matrix z = hits::couple(model.bank, model.plan, z_truth.row(0), horizon);
        s.latent_mse += mean_squared_difference(z, z_truth);
        s.reconstruction_mse += mean_squared_difference(model.from_latent(z), truth);
    }
    s.latent_mse /= static_cast<double>(test.count());
    s.reconstruction_mse /= static_cast<double>(test.count());
    return s;
}

struct SweepRow {
    std::size_t z = 0;
    double latent_mse = std::numeric_limits<double>::quiet_NaN();
    double reconstruction_mse = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::size_t> active_steps;
    std::string error;  // empty on success
};

inline std::vector<std::size_t> active_steps(const LhitsModel& model)
{
    std::vector<std::size_t> out;
    for (auto i : model.plan.active_indices)
        out.push_back(model.bank.steppers[i].step_multiple);
    return out;
}

/// Trains one pipeline per latent dim and scores it on the test split. A
/// failing z is recorded in its row and the sweep continues.
inline std::vector<SweepRow> sensitivity_sweep(const pde::TrajectorySet& train, const pde::TrajectorySet& val,
                                               const pde::TrajectorySet& test, const std::vector<std::size_t>& z_list,
                                               const PipelineConfig& cfg, std::size_t horizon = 0)
{
    if (z_list.empty())
        throw ParameterError("sensitivity_sweep: z list is empty");
    for (auto z : z_list)
        if (z == 0 || z >= train.state_dim())
            throw ParameterError("sensitivity_sweep: latent dim " + std::to_string(z) + " must satisfy 0 < z < n = " +
                                 std::to_string(train.state_dim()));
    horizon = resolve_horizon(horizon, test);
    std::vector<SweepRow> rows(z_list.size());
    const std::size_t outer = std::min(cfg.threads, z_list.size());
    parallel_for(z_list.size(), outer, [&](std::size_t i) {
        rows[i].z = z_list[i];
        PipelineConfig c = cfg;
        c.latent_dim = z_list[i];
        c.identity_coder = false;
        c.threads = std::max<std::size_t>(1, cfg.threads / std::max<std::size_t>(1, outer));
        try {
            const auto trained = train_lhits(train, val, c);
            const auto score = score_model(trained.model, test, horizon);
            rows[i].latent_mse = score.latent_mse;
            rows[i].reconstruction_mse = score.reconstruction_mse;
            rows[i].active_steps = active_steps(trained.model);
        } catch (const Error& e) {
            rows[i].error = e.what();
        }
    });
    return rows;
}

struct CompareRow {
    std::string label;
    std::size_t step = 0;          // 0 for the coupled row
    double mse = 0.0;              // reconstruction MSE, +inf if diverged
    double seconds = 0.0;          // summed over test trajectories
    std::size_t evaluations = 0;   // network evaluations per trajectory
    bool diverged = false;
};

/// Prediction with a single stepper: ceil(horizon / s) steps from the encoded
/// x0, interpolated to every base step and decoded.
inline Matrix individual_predict(const LhitsModel& model, std::size_t bank_index, const RowVector& x0,
                                 std::size_t horizon, std::size_t* evaluations = nullptr)
{
    const auto& stepper = model.bank.steppers.at(bank_index);
    const std::size_t s = stepper.step_multiple;
    const std::size_t n = (horizon + s - 1) / s;
    const Matrix z0 = model.to_latent(x0);
    const Matrix nodes = hits::rollout(stepper, z0.row(0), n, evaluations);
    if (s == 1)
        return model.from_latent(nodes);
    std::vector<double> times(static_cast<std::size_t>(nodes.rows()));
    for (std::size_t k = 0; k < times.size(); ++k)
        times[k] = static_cast<double>(k * s);
    std::vector<double> query(horizon + 1);
    std::iota(query.begin(), query.end(), 0.0);
    const Matrix dense = hits::interpolate_fill(times, nodes, query, model.plan.interpolant);
    if (!dense.allFinite())
        throw DivergenceError("individual_predict: interpolation produced non-finite values", 0);
    return model.from_latent(dense);
}

/// Each bank model alone (ascending step) followed by the coupled row.
inline std::vector<CompareRow> compare_individual_vs_coupled(const LhitsModel& model, const pde::TrajectorySet& test,
                                                             std::size_t horizon, std::size_t threads = 1)
{
    model.validate();
    horizon = resolve_horizon(horizon, test);
    const std::size_t m = model.bank.size();
    std::vector<CompareRow> rows(m + 1);
    parallel_for(m, threads, [&](std::size_t r) {
        const std::size_t idx = m - 1 - r;
        auto& row = rows[r];
        row.step = model.bank.steppers[idx].step_multiple;
        row.label = "RN_" + std::to_string(row.step);
        try {
            for (const auto& traj : test.trajectories) {
                std::size_t evals = 0;
                Stopwatch sw;
                const Matrix pred = individual_predict(model, idx, traj.row(0), horizon, &evals);
                row.seconds += sw.seconds();
                row.evaluations = evals;
                row.mse += mean_squared_difference(pred, traj.topRows(static_cast<Eigen::Index>(horizon + 1)));
            }
            row.mse /= static_cast<double>(test.count());
            if (!std::isfinite(row.mse))
                throw DivergenceError("non-finite error", 0);
        } catch (const DivergenceError&) {
            row.mse = std::numeric_limits<double>::infinity();
            row.diverged = true;
        }
    });
    auto& coupled = rows[m];
    coupled.label = "L-HiTS";
    for (const auto& traj : test.trajectories) {
        Stopwatch sw;
        const Matrix pred = lhits_predict(model, traj.row(0), horizon);
        coupled.seconds += sw.seconds();
        coupled.mse += mean_squared_difference(pred, traj.topRows(static_cast<Eigen::Index>(horizon + 1)));
    }
    coupled.mse /= static_cast<double>(test.count());
    return rows;
}

struct BenchmarkRow {
    std::string label;
    std::size_t latent_dim = 0;
    std::vector<std::size_t> active_steps;
    double mse = 0.0;
    double relative_l2 = 0.0;
    double seconds = 0.0;  // median over repeats of the summed prediction time
};

/// Times lhits_predict on every test trajectory; reports the median of `repeats` passes.
inline BenchmarkRow benchmark_model(const std::string& label, const LhitsModel& model, const pde::TrajectorySet& test,
                                    std::size_t horizon, std::size_t repeats = 3)
{
    horizon = resolve_horizon(horizon, test);
    BenchmarkRow row;
    row.label = label;
    row.latent_dim = model.latent_dim();
    row.active_steps = active_steps(model);
    std::vector<double> times;
    for (std::size_t rep = 0; rep < std::max<std::size_t>(repeats, 1); ++rep) {
        double total = 0.0, mse = 0.0, rel = 0.0;
        for (const auto& traj : test.trajectories) {
            Stopwatch sw;
            const Matrix pred = lhits_predict(model, traj.row(0), horizon);
            total += sw.seconds();
            const auto report = evaluate(pred, traj.topRows(static_cast<Eigen::Index>(horizon + 1)), horizon + 1);
            mse += report.overall_mse;
            rel += report.relative_l2;
        }
        times.push_back(total);
        row.mse = mse / static_cast<double>(test.count());
        row.relative_l2 = rel / static_cast<double>(test.count());
    }
    std::sort(times.begin(), times.end());
    row.seconds = times[times.size() / 2];
    return row;
}

} // namespace lhits
