#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lhits/hits/coupling.hpp"
#include "lhits/parallel.hpp"
#include "lhits/pde/pairs.hpp"
#include "lhits/rng.hpp"

namespace lhits::hits {

struct StepperNetConfig {
    std::vector<std::size_t> hidden{128, 128, 128};
    nn::Activation activation = nn::Activation::ReLU;
    nn::TrainConfig train{};    // train.seed is ignored; seeds derive from the bank seed
    std::size_t unroll = 1;     // loss over this many consecutive applications
};

struct BankFit {
    StepperBank bank;
    std::vector<std::vector<double>> loss_histories;  // aligned with bank.steppers
};

/// Trains one independent stepper per step multiple on latent trajectories.
inline BankFit train_stepper_bank(const std::vector<Matrix>& latent_trajectories,
                                  const std::vector<std::size_t>& step_multiples, const StepperNetConfig& net,
                                  std::uint64_t seed, double dt = 0.0, std::size_t threads = 1)
{
    if (step_multiples.empty())
        throw ParameterError("train_stepper_bank: no step multiples");
    if (latent_trajectories.empty())
        throw ParameterError("train_stepper_bank: no trajectories");
    if (net.unroll == 0)
        throw ParameterError("train_stepper_bank: unroll depth must be positive");
    for (std::size_t i = 0; i < step_multiples.size(); ++i) {
        if (!nn::is_power_of_two(step_multiples[i]))
            throw ParameterError("train_stepper_bank: step multiple " + std::to_string(step_multiples[i]) +
                                 " is not a power of two");
        for (std::size_t j = 0; j < i; ++j)
            if (step_multiples[j] == step_multiples[i])
                throw ParameterError("train_stepper_bank: duplicate step multiple " + std::to_string(step_multiples[i]));
    }
    const auto latent = static_cast<std::size_t>(latent_trajectories.front().cols());

    std::vector<nn::RegressorFit> fits(step_multiples.size());
    parallel_for(step_multiples.size(), threads, [&](std::size_t i) {
        const std::size_t s = step_multiples[i];
        try {
            const auto pairs = pde::build_unrolled_pairs(latent_trajectories, s, net.unroll);
            nn::TrainConfig cfg = net.train;
            cfg.seed = CounterRng::mix(seed ^ (0x5354'4550ull + s));
            fits[i] = nn::train_regressor(nn::make_stepper(latent, net.hidden, s, net.activation, seed), pairs.inputs,
                                          pairs.targets, cfg);
        } catch (const TrainingError& e) {
            throw TrainingError("bank model with step " + std::to_string(s) + ": " + e.what());
        } catch (const ParameterError& e) {
            throw ParameterError("bank model with step " + std::to_string(s) + ": " + e.what());
        }
    });

    std::vector<ResNetStepper> steppers;
    for (auto& f : fits)
        steppers.push_back(std::move(f.stepper));
    BankFit out;
    out.bank = StepperBank::from(std::move(steppers), dt);
    for (const auto& m : out.bank.steppers)
        for (std::size_t i = 0; i < step_multiples.size(); ++i)
            if (step_multiples[i] == m.step_multiple)
                out.loss_histories.push_back(std::move(fits[i].loss_history));
    return out;
}

struct CandidateScore {
    std::size_t first = 0;  // bank index of the coarsest model
    std::size_t last = 0;   // bank index of the finest model
    double mse = 0.0;       // +inf when the candidate diverged
};

struct CrossValidation {
    CouplingPlan plan;
    std::vector<CandidateScore> candidates;  // every contiguous range, ordered by (first, last)
};

/// Mean dense-trajectory MSE of couple() from each trajectory's first row.
inline double coupled_validation_mse(const StepperBank& bank, const CouplingPlan& plan,
                                     const std::vector<Matrix>& validation, std::size_t horizon)
{
    double total = 0.0;
    for (const auto& traj : validation) {
        const Matrix pred = couple(bank, plan, traj.row(0), horizon);
        total += mean_squared_difference(pred, traj.topRows(static_cast<Eigen::Index>(horizon + 1)));
    }
    return total / static_cast<double>(validation.size());
}

/// Scores every contiguous range of the bank on validation latents and keeps the
/// lowest MSE; ties prefer fewer models, then the larger smallest step.
inline CrossValidation cross_validate(const StepperBank& bank, const std::vector<Matrix>& validation,
                                      std::size_t horizon, Interpolant kind = Interpolant::CubicNotAKnot,
                                      std::size_t threads = 1)
{
    bank.validate();
    if (validation.empty())
        throw ParameterError("cross_validate: validation set is empty");
    if (horizon < 1)
        throw ParameterError("cross_validate: horizon must be at least 1");
    for (const auto& v : validation) {
        require_shape(static_cast<std::size_t>(v.cols()) == bank.latent_dim,
                      "cross_validate: validation latent dim does not match bank");
        if (static_cast<std::size_t>(v.rows()) <= horizon)
            throw ParameterError("cross_validate: validation trajectory of length " + std::to_string(v.rows()) +
                                 " is shorter than horizon " + std::to_string(horizon) + " + 1");
    }

    CrossValidation cv;
    const std::size_t m = bank.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j)
            cv.candidates.push_back({i, j, 0.0});

    parallel_for(cv.candidates.size(), threads, [&](std::size_t c) {
        auto& cand = cv.candidates[c];
        try {
            const double mse = coupled_validation_mse(bank, CouplingPlan::range(cand.first, cand.last, kind), validation,
                                                      horizon);
            cand.mse = std::isfinite(mse) ? mse : std::numeric_limits<double>::infinity();
        } catch (const DivergenceError&) {
            cand.mse = std::numeric_limits<double>::infinity();
        }
    });

    const CandidateScore* best = nullptr;
    for (const auto& c : cv.candidates) {
        if (!std::isfinite(c.mse))
            continue;
        if (!best) {
            best = &c;
            continue;
        }
        const std::size_t size_c = c.last - c.first, size_b = best->last - best->first;
        if (c.mse < best->mse || (c.mse == best->mse && (size_c < size_b || (size_c == size_b && c.last < best->last))))
            best = &c;
    }
    if (!best)
        throw SelectionError("cross_validate: all " + std::to_string(cv.candidates.size()) + " candidate plans diverged");
    cv.plan = CouplingPlan::range(best->first, best->last, kind, horizon);
    return cv;
}

} // namespace lhits::hits
