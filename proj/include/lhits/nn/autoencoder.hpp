#pragma once

#include <string>
#include <vector>

#include "lhits/nn/loss.hpp"
#include "lhits/nn/mlp.hpp"
#include "lhits/nn/training.hpp"

namespace lhits::nn {

/// Encoder (restricting operator, n -> z) and decoder (lifting operator, z -> n).
struct Autoencoder {
    MlpParams encoder;
    MlpParams decoder;

    std::size_t latent_dim() const noexcept { return encoder.output_dim(); }
    std::size_t state_dim() const noexcept { return encoder.input_dim(); }

    void validate() const
    {
        encoder.validate();
        decoder.validate();
        require_shape(encoder.output_dim() == decoder.input_dim(),
                      "Autoencoder: encoder output dim differs from decoder input dim");
        require_shape(encoder.input_dim() == decoder.output_dim(),
                      "Autoencoder: decoder does not map back to the state dim");
    }
};

/// Encoder n -> hidden... -> z and mirrored decoder z -> reversed(hidden)... -> n.
inline Autoencoder make_autoencoder(std::size_t state_dim, const std::vector<std::size_t>& hidden,
                                    std::size_t latent_dim, Activation act, std::uint64_t seed)
{
    if (latent_dim == 0 || latent_dim >= state_dim)
        throw ParameterError("autoencoder latent dim " + std::to_string(latent_dim) +
                             " must satisfy 0 < z < n = " + std::to_string(state_dim));
    std::vector<std::size_t> enc{state_dim};
    enc.insert(enc.end(), hidden.begin(), hidden.end());
    enc.push_back(latent_dim);
    std::vector<std::size_t> dec(enc.rbegin(), enc.rend());
    Autoencoder ae{init_mlp(std::move(enc), act, seed, 0xE1C0'DE00ull),
                   init_mlp(std::move(dec), act, seed, 0xDEC0'DE00ull)};
    ae.validate();
    return ae;
}

inline Matrix encode(const Autoencoder& ae, const Matrix& x)
{
    require_shape(static_cast<std::size_t>(x.cols()) == ae.state_dim(),
                  "encode: input has " + std::to_string(x.cols()) + " columns, expected " +
                      std::to_string(ae.state_dim()));
    return mlp_forward(ae.encoder, x);
}

inline Matrix decode(const Autoencoder& ae, const Matrix& z)
{
    require_shape(static_cast<std::size_t>(z.cols()) == ae.latent_dim(),
                  "decode: input has " + std::to_string(z.cols()) + " columns, expected " +
                      std::to_string(ae.latent_dim()));
    return mlp_forward(ae.decoder, z);
}

struct AutoencoderFit {
    Autoencoder ae;
    std::vector<double> loss_history;
};

/// Minimizes the mean reconstruction MSE ||decode(encode(x)) - x||^2 over minibatches.
inline AutoencoderFit train_autoencoder(Autoencoder ae, const Matrix& x, const TrainConfig& cfg)
{
    ae.validate();
    detail::check_batch(cfg);
    if (ae.latent_dim() >= ae.state_dim())
        throw ParameterError("train_autoencoder: latent dim must be smaller than the state dim");
    require_shape(static_cast<std::size_t>(x.cols()) == ae.state_dim(),
                  "train_autoencoder: data does not match state dim");
    if (static_cast<std::size_t>(x.rows()) < cfg.batch_size)
        throw ParameterError("train_autoencoder: fewer rows (" + std::to_string(x.rows()) +
                             ") than the batch size");

    AdamState enc_state = AdamState::for_params(ae.encoder, cfg.adam);
    AdamState dec_state = AdamState::for_params(ae.decoder, cfg.adam);
    ForwardCache enc_cache, dec_cache;
    Matrix batch, grad_latent;

    auto step = [&](const std::vector<std::size_t>& order, std::size_t begin, std::size_t end) {
        detail::gather_rows(x, order, begin, end, batch);
        const Matrix latent = mlp_forward(ae.encoder, batch, enc_cache);
        const Matrix recon = mlp_forward(ae.decoder, latent, dec_cache);
        LossValue l = mse_loss(recon, batch);
        detail::check_loss(l.value);
        MlpGradients dec_grads = backprop_grads(ae.decoder, dec_cache, l.gradient, &grad_latent);
        MlpGradients enc_grads = backprop_grads(ae.encoder, enc_cache, grad_latent);
        adam_step(ae.decoder, dec_grads, dec_state, "decoder");
        adam_step(ae.encoder, enc_grads, enc_state, "encoder");
        return l.value;
    };

    AutoencoderFit fit;
    fit.loss_history = detail::run_epochs(static_cast<std::size_t>(x.rows()), cfg, "autoencoder", step);
    fit.ae = std::move(ae);
    return fit;
}

/// Mean reconstruction MSE of decode(encode(x)) against x.
inline double reconstruction_mse(const Autoencoder& ae, const Matrix& x)
{
    return mean_squared_difference(decode(ae, encode(ae, x)), x);
}

} // namespace lhits::nn
