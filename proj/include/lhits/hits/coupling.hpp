#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "lhits/hits/interpolation.hpp"
#include "lhits/nn/resnet.hpp"

namespace lhits::hits {

using nn::ResNetStepper;

/// Trained steppers ordered by descending step multiple.
struct StepperBank {
    std::vector<ResNetStepper> steppers;
    std::size_t latent_dim = 0;
    double dt = 0.0;

    std::size_t size() const noexcept { return steppers.size(); }

    std::vector<std::size_t> step_multiples() const
    {
        std::vector<std::size_t> s;
        for (const auto& m : steppers)
            s.push_back(m.step_multiple);
        return s;
    }

    void validate() const
    {
        if (steppers.empty())
            throw ParameterError("StepperBank: empty");
        for (std::size_t i = 0; i < steppers.size(); ++i) {
            steppers[i].validate();
            require_shape(steppers[i].latent_dim() == latent_dim,
                          "StepperBank: stepper " + std::to_string(i) + " has latent dim " +
                              std::to_string(steppers[i].latent_dim()) + ", bank has " + std::to_string(latent_dim));
            if (i > 0 && !(steppers[i].step_multiple < steppers[i - 1].step_multiple))
                throw ParameterError("StepperBank: step multiples must be distinct and sorted descending");
        }
    }

    /// Sorts steppers by descending step and validates.
    static StepperBank from(std::vector<ResNetStepper> steppers, double dt)
    {
        std::sort(steppers.begin(), steppers.end(),
                  [](const ResNetStepper& a, const ResNetStepper& b) { return a.step_multiple > b.step_multiple; });
        StepperBank bank{std::move(steppers), 0, dt};
        if (!bank.steppers.empty())
            bank.latent_dim = bank.steppers.front().latent_dim();
        bank.validate();
        return bank;
    }
};

struct CouplingPlan {
    std::vector<std::size_t> active_indices;
    Interpolant interpolant = Interpolant::CubicNotAKnot;
    std::size_t horizon = 0;

    void validate(const StepperBank& bank) const
    {
        if (active_indices.empty())
            throw ParameterError("CouplingPlan: no active models");
        for (std::size_t i = 0; i < active_indices.size(); ++i) {
            if (active_indices[i] >= bank.size())
                throw ParameterError("CouplingPlan: index " + std::to_string(active_indices[i]) +
                                     " out of range for bank of " + std::to_string(bank.size()));
            if (i > 0 && active_indices[i] != active_indices[i - 1] + 1)
                throw ParameterError("CouplingPlan: active indices must be contiguous and ascending");
        }
    }

    /// Plan covering bank indices first..last inclusive.
    static CouplingPlan range(std::size_t first, std::size_t last, Interpolant kind = Interpolant::CubicNotAKnot,
                              std::size_t horizon = 0)
    {
        CouplingPlan p;
        p.active_indices.resize(last - first + 1);
        std::iota(p.active_indices.begin(), p.active_indices.end(), first);
        p.interpolant = kind;
        p.horizon = horizon;
        return p;
    }
};

namespace detail {

inline Eigen::Index first_nonfinite_row(const Matrix& m)
{
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        if (!m.row(r).allFinite())
            return r;
    return -1;
}

} // namespace detail

/// Autoregressive rollout; row k is the state after k applications.
/// `evaluations`, if given, is incremented once per network evaluation.
inline Matrix rollout(const ResNetStepper& stepper, const RowVector& z0, std::size_t num_steps,
                      std::size_t* evaluations = nullptr)
{
    require_shape(static_cast<std::size_t>(z0.size()) == stepper.latent_dim(), "rollout: z0 does not match latent dim");
    Matrix out(static_cast<Eigen::Index>(num_steps + 1), z0.size());
    out.row(0) = z0;
    Matrix state = z0;
    for (std::size_t k = 0; k < num_steps; ++k) {
        state = nn::resnet_step(stepper, state);
        if (evaluations)
            ++*evaluations;
        if (!state.allFinite())
            throw DivergenceError("rollout: stepper with step " + std::to_string(stepper.step_multiple) +
                                      " produced a non-finite state at step " + std::to_string(k + 1),
                                  k + 1);
        out.row(static_cast<Eigen::Index>(k + 1)) = state;
    }
    return out;
}

/// Hierarchical coupling. The coarsest active model produces checkpoints from
/// z0; each finer model then advances every existing node in one stacked batch
/// until the gap to the next coarser node is covered. Times below the finest
/// step are filled by interpolation. Returns (horizon + 1) rows at spacing dt.
inline Matrix couple(const StepperBank& bank, const CouplingPlan& plan, const RowVector& z0, std::size_t horizon)
{
    plan.validate(bank);
    if (horizon < 1)
        throw ParameterError("couple: horizon must be at least 1");
    require_shape(static_cast<std::size_t>(z0.size()) == bank.latent_dim, "couple: z0 does not match latent dim");
    if (!z0.allFinite())
        throw ParameterError("couple: z0 is not finite");

    const auto& coarse = bank.steppers[plan.active_indices.front()];
    const std::size_t s1 = coarse.step_multiple;
    Matrix nodes;
    try {
        nodes = rollout(coarse, z0, horizon / s1);
    } catch (const DivergenceError& e) {
        throw DivergenceError("couple: model with step " + std::to_string(s1) + " diverged at time index " +
                                  std::to_string(e.step() * s1),
                              e.step() * s1);
    }
    std::vector<std::size_t> times(static_cast<std::size_t>(nodes.rows()));
    for (std::size_t k = 0; k < times.size(); ++k)
        times[k] = k * s1;

    std::size_t coarser = s1;
    for (std::size_t a = 1; a < plan.active_indices.size(); ++a) {
        const auto& model = bank.steppers[plan.active_indices[a]];
        const std::size_t s = model.step_multiple;
        const std::size_t q = coarser / s - 1;
        Matrix batch = nodes;
        std::vector<std::size_t> batch_times = times;
        for (std::size_t j = 0; j < q; ++j) {
            std::vector<Eigen::Index> keep;
            for (std::size_t r = 0; r < batch_times.size(); ++r)
                if (batch_times[r] + s <= horizon)
                    keep.push_back(static_cast<Eigen::Index>(r));
            if (keep.empty())
                break;
            if (keep.size() != batch_times.size()) {
                Matrix kept(static_cast<Eigen::Index>(keep.size()), batch.cols());
                std::vector<std::size_t> kept_times(keep.size());
                for (std::size_t r = 0; r < keep.size(); ++r) {
                    kept.row(static_cast<Eigen::Index>(r)) = batch.row(keep[r]);
                    kept_times[r] = batch_times[static_cast<std::size_t>(keep[r])];
                }
                batch = std::move(kept);
                batch_times = std::move(kept_times);
            }
            batch = nn::resnet_step(model, batch);
            for (auto& t : batch_times)
                t += s;
            if (const Eigen::Index bad = detail::first_nonfinite_row(batch); bad >= 0) {
                const std::size_t t = batch_times[static_cast<std::size_t>(bad)];
                throw DivergenceError("couple: model with step " + std::to_string(s) + " diverged at time index " +
                                          std::to_string(t),
                                      t);
            }
            Matrix grown(nodes.rows() + batch.rows(), nodes.cols());
            grown << nodes, batch;
            nodes = std::move(grown);
            times.insert(times.end(), batch_times.begin(), batch_times.end());
        }
        coarser = s;
    }

    // Chronological order.
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    std::vector<double> node_times;
    Matrix sorted(nodes.rows() + 1, nodes.cols());
    for (std::size_t r = 0; r < order.size(); ++r) {
        node_times.push_back(static_cast<double>(times[order[r]]));
        sorted.row(static_cast<Eigen::Index>(r)) = nodes.row(static_cast<Eigen::Index>(order[r]));
    }
    Eigen::Index count = nodes.rows();

    // The finest model steps once past the horizon so the tail is bracketed.
    if (times[order.back()] < horizon) {
        const auto& fine = bank.steppers[plan.active_indices.back()];
        const Matrix next = nn::resnet_step(fine, sorted.row(count - 1));
        const std::size_t t = times[order.back()] + fine.step_multiple;
        if (!next.allFinite())
            throw DivergenceError("couple: model with step " + std::to_string(fine.step_multiple) +
                                      " diverged at time index " + std::to_string(t),
                                  t);
        sorted.row(count) = next;
        node_times.push_back(static_cast<double>(t));
        ++count;
    }
    sorted.conservativeResize(count, Eigen::NoChange);

    if (node_times.size() == horizon + 1 && node_times.back() == static_cast<double>(horizon))
        return sorted;
    std::vector<double> query(horizon + 1);
    std::iota(query.begin(), query.end(), 0.0);
    Matrix dense = interpolate_fill(node_times, sorted, query, plan.interpolant);
    if (!dense.allFinite())
        throw DivergenceError("couple: interpolation produced non-finite values", 0);
    return dense;
}

} // namespace lhits::hits
