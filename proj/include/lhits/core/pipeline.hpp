#pragma once

#include <vector>

#include "lhits/core/model.hpp"
#include "lhits/hits/bank.hpp"
#include "lhits/rng.hpp"

namespace lhits {

/// Everything needed to train an LhitsModel from trajectory data.
struct PipelineConfig {
    pde::NormalizerMode normalize = pde::NormalizerMode::PerFeatureStandardize;
    bool identity_coder = false;
    std::size_t latent_dim = 2;
    std::vector<std::size_t> ae_hidden{100, 100, 100};
    nn::Activation activation = nn::Activation::ReLU;
    nn::TrainConfig ae_train{5000, 32, {}, 0};
    hits::StepperNetConfig stepper{};
    std::vector<std::size_t> step_multiples{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    std::size_t cv_horizon = 0;  // 0: full validation length
    hits::Interpolant interpolant = hits::Interpolant::CubicNotAKnot;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

struct TrainedPipeline {
    LhitsModel model;
    std::vector<double> ae_loss_history;
    std::vector<std::vector<double>> bank_loss_histories;
    hits::CrossValidation cv;
};

namespace detail {

inline std::vector<Matrix> map_rows(const std::vector<Matrix>& trajs, const auto& fn)
{
    std::vector<Matrix> out;
    out.reserve(trajs.size());
    for (const auto& t : trajs)
        out.push_back(fn(t));
    return out;
}

} // namespace detail

/// Fits normalizer and autoencoder on the training states, trains the stepper
/// bank on encoded training trajectories and picks the plan on validation.
inline TrainedPipeline train_lhits(const pde::TrajectorySet& train, const pde::TrajectorySet& val,
                                   const PipelineConfig& cfg)
{
    train.validate();
    val.validate();
    if (train.count() == 0 || val.count() == 0)
        throw ParameterError("train_lhits: training and validation sets must be nonempty");
    require_shape(train.state_dim() == val.state_dim(), "train_lhits: train and validation state dims differ");

    TrainedPipeline out;
    LhitsModel& model = out.model;
    model.system = train.system;
    model.normalizer = pde::Normalizer::fit(cfg.normalize, train.stacked());

    if (!cfg.identity_coder) {
        auto ae = nn::make_autoencoder(train.state_dim(), cfg.ae_hidden, cfg.latent_dim, cfg.activation,
                                       CounterRng::mix(cfg.seed ^ 0xAE00'0001ull));
        nn::TrainConfig tc = cfg.ae_train;
        tc.seed = CounterRng::mix(cfg.seed ^ 0xAE00'0002ull);
        auto fit = nn::train_autoencoder(std::move(ae), model.normalizer.apply(train.stacked()), tc);
        model.coder = std::move(fit.ae);
        out.ae_loss_history = std::move(fit.loss_history);
    }

    auto latent = [&](const Matrix& t) { return model.to_latent(t); };
    const auto train_latent = detail::map_rows(train.trajectories, latent);
    const auto val_latent = detail::map_rows(val.trajectories, latent);

    auto net = cfg.stepper;
    net.activation = cfg.activation;
    auto bank = hits::train_stepper_bank(train_latent, cfg.step_multiples, net, CounterRng::mix(cfg.seed ^ 0xBA00'0001ull),
                                         train.dt, cfg.threads);
    model.bank = std::move(bank.bank);
    out.bank_loss_histories = std::move(bank.loss_histories);

    const std::size_t horizon = cfg.cv_horizon ? cfg.cv_horizon : val.steps() - 1;
    out.cv = hits::cross_validate(model.bank, val_latent, horizon, cfg.interpolant, cfg.threads);
    model.plan = out.cv.plan;
    model.validate();
    return out;
}

} // namespace lhits
