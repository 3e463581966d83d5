#pragma once

#include <string>
#include <vector>

#include "lhits/nn/loss.hpp"
#include "lhits/nn/mlp.hpp"
#include "lhits/nn/training.hpp"

namespace lhits::nn {

/// Residual time stepper z -> z + N(z) advancing the state by
/// step_multiple base time steps.
struct ResNetStepper {
    MlpParams body;
    std::size_t step_multiple = 1;

    std::size_t latent_dim() const noexcept { return body.input_dim(); }

    void validate() const
    {
        body.validate();
        require_shape(body.input_dim() == body.output_dim(),
                      "ResNetStepper: body input and output dims differ");
        if (step_multiple == 0 || (step_multiple & (step_multiple - 1)) != 0)
            throw ParameterError("ResNetStepper: step multiple " + std::to_string(step_multiple) +
                                 " is not a power of two");
    }
};

inline bool is_power_of_two(std::size_t v) noexcept { return v != 0 && (v & (v - 1)) == 0; }

/// Builds a stepper latent_dim -> hidden... -> latent_dim with random initial weights.
inline ResNetStepper make_stepper(std::size_t latent_dim, const std::vector<std::size_t>& hidden,
                                  std::size_t step_multiple, Activation act, std::uint64_t seed)
{
    std::vector<std::size_t> dims{latent_dim};
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(latent_dim);
    ResNetStepper s{init_mlp(std::move(dims), act, seed, 0x5745'0000ull + step_multiple), step_multiple};
    s.validate();
    return s;
}

inline Matrix resnet_step(const ResNetStepper& stepper, const Matrix& z)
{
    require_shape(static_cast<std::size_t>(z.cols()) == stepper.latent_dim(),
                  "resnet_step: state has " + std::to_string(z.cols()) + " columns, stepper expects " +
                      std::to_string(stepper.latent_dim()));
    Matrix out = mlp_forward(stepper.body, z);
    out += z;
    return out;
}

struct RegressorFit {
    ResNetStepper stepper;
    std::vector<double> loss_history;  // epoch-mean minibatch loss
};

/// Fits the stepper so that applying it j times to inputs reproduces
/// targets[j-1], averaging the MSE over the unroll depth targets.size().
/// One target matrix is plain one-step training.
inline RegressorFit train_regressor(ResNetStepper stepper, const Matrix& inputs,
                                    const std::vector<Matrix>& targets, const TrainConfig& cfg)
{
    stepper.validate();
    detail::check_batch(cfg);
    require_shape(!targets.empty(), "train_regressor: no targets");
    require_shape(inputs.rows() > 0, "train_regressor: no training pairs");
    require_shape(static_cast<std::size_t>(inputs.cols()) == stepper.latent_dim(),
                  "train_regressor: inputs do not match latent dim");
    for (const auto& t : targets)
        require_shape(t.rows() == inputs.rows() && t.cols() == inputs.cols(),
                      "train_regressor: target shape does not match inputs");

    const std::size_t depth = targets.size();
    const std::string label = "stepper(step " + std::to_string(stepper.step_multiple) + ")";
    AdamState adam = AdamState::for_params(stepper.body, cfg.adam);
    std::vector<ForwardCache> caches(depth);
    std::vector<Matrix> states(depth + 1);
    Matrix target_batch;

    auto step = [&](const std::vector<std::size_t>& order, std::size_t begin, std::size_t end) {
        detail::gather_rows(inputs, order, begin, end, states[0]);
        for (std::size_t j = 0; j < depth; ++j) {
            states[j + 1] = mlp_forward(stepper.body, states[j], caches[j]);
            states[j + 1] += states[j];
        }
        double loss = 0.0;
        MlpGradients grads = MlpGradients::zeros_like(stepper.body);
        Matrix carry = Matrix::Zero(states[0].rows(), states[0].cols());
        Matrix through;
        for (std::size_t j = depth; j-- > 0;) {
            detail::gather_rows(targets[j], order, begin, end, target_batch);
            LossValue l = mse_loss(states[j + 1], target_batch);
            loss += l.value / static_cast<double>(depth);
            carry += l.gradient / static_cast<double>(depth);
            grads += backprop_grads(stepper.body, caches[j], carry, &through);
            carry += through;
        }
        detail::check_loss(loss);
        adam_step(stepper.body, grads, adam, label);
        return loss;
    };

    RegressorFit fit;
    fit.loss_history = detail::run_epochs(static_cast<std::size_t>(inputs.rows()), cfg, label, step);
    fit.stepper = std::move(stepper);
    return fit;
}

inline RegressorFit train_regressor(ResNetStepper stepper, const Matrix& inputs, const Matrix& targets,
                                    const TrainConfig& cfg)
{
    return train_regressor(std::move(stepper), inputs, std::vector<Matrix>{targets}, cfg);
}

} // namespace lhits::nn
