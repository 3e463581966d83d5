#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "lhits/nn/mlp.hpp"

namespace lhits::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected Adam moments for one network.
struct AdamState {
    MlpGradients first_moment;
    MlpGradients second_moment;
    std::uint64_t step_count = 0;
    AdamConfig config;

    static AdamState for_params(const MlpParams& p, AdamConfig cfg = {})
    {
        if (!(cfg.lr > 0.0))
            throw ParameterError("adam: learning rate must be positive");
        return AdamState{MlpGradients::zeros_like(p), MlpGradients::zeros_like(p), 0, cfg};
    }
};

/// One Adam update in place. `label` names the network in error messages.
inline void adam_step(MlpParams& params, const MlpGradients& grads, AdamState& state,
                      const std::string& label = "network")
{
    require_shape(grads.weights.size() == params.weights.size() &&
                      state.first_moment.weights.size() == params.weights.size(),
                  "adam_step: layer count mismatch");
    for (std::size_t k = 0; k < grads.weights.size(); ++k) {
        require_shape(grads.weights[k].rows() == params.weights[k].rows() &&
                          grads.weights[k].cols() == params.weights[k].cols() &&
                          grads.biases[k].size() == params.biases[k].size(),
                      "adam_step: gradient shape mismatch in layer " + std::to_string(k));
        if (!grads.weights[k].allFinite() || !grads.biases[k].allFinite())
            throw TrainingError("non-finite gradient in " + label + " layer " + std::to_string(k));
    }

    const AdamConfig& c = state.config;
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);

    // Moments of inactive units are flushed before they turn subnormal.
    auto flush = [](double x) { return std::abs(x) < 1e-150 ? 0.0 : x; };
    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
        m = (c.beta1 * m + (1.0 - c.beta1) * g).unaryExpr(flush);
        v = (c.beta2 * v + (1.0 - c.beta2) * g.cwiseAbs2()).unaryExpr(flush);
        p.array() -= c.lr * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + c.epsilon);
    };
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        update(params.weights[k], grads.weights[k], state.first_moment.weights[k],
               state.second_moment.weights[k]);
        update(params.biases[k], grads.biases[k], state.first_moment.biases[k],
               state.second_moment.biases[k]);
    }
}

} // namespace lhits::nn
