#pragma once

#include <optional>
#include <string>

#include "lhits/hits/coupling.hpp"
#include "lhits/nn/autoencoder.hpp"
#include "lhits/pde/normalizer.hpp"
#include "lhits/pde/trajectory.hpp"

namespace lhits {

/// Normalizer, coder, stepper bank and coupling plan. An empty coder is the
/// identity map on the normalized state, which gives full-state HiTS.
struct LhitsModel {
    pde::Normalizer normalizer;
    std::optional<nn::Autoencoder> coder;
    hits::StepperBank bank;
    hits::CouplingPlan plan;
    pde::SystemTag system = pde::SystemTag::Synthetic;

    bool identity_coder() const noexcept { return !coder.has_value(); }
    std::size_t state_dim() const noexcept { return normalizer.dim(); }
    std::size_t latent_dim() const noexcept { return coder ? coder->latent_dim() : state_dim(); }

    void validate() const
    {
        bank.validate();
        plan.validate(bank);
        if (coder) {
            coder->validate();
            require_shape(coder->state_dim() == state_dim(), "LhitsModel: coder state dim differs from normalizer");
        }
        require_shape(latent_dim() == bank.latent_dim,
                      "LhitsModel: coder latent dim " + std::to_string(latent_dim()) + " differs from bank latent dim " +
                          std::to_string(bank.latent_dim));
    }

    /// Physical states -> latent coordinates.
    Matrix to_latent(const Matrix& x) const
    {
        Matrix n = normalizer.apply(x);
        return coder ? nn::encode(*coder, n) : n;
    }

    /// Latent coordinates -> physical states.
    Matrix from_latent(const Matrix& z) const { return normalizer.invert(coder ? nn::decode(*coder, z) : z); }
};

/// Encodes x0, couples over the horizon in latent space and decodes.
/// Row 0 is the coder round trip of x0, not x0 itself.
inline Matrix lhits_predict(const LhitsModel& model, const RowVector& x0, std::size_t horizon)
{
    require_shape(static_cast<std::size_t>(x0.size()) == model.state_dim(),
                  "lhits_predict: x0 has length " + std::to_string(x0.size()) + ", model expects " +
                      std::to_string(model.state_dim()));
    if (!x0.allFinite())
        throw ParameterError("lhits_predict: x0 is not finite");
    const Matrix z0 = model.to_latent(x0);
    if (horizon == 0)
        return model.from_latent(z0);
    Matrix z;
    try {
        z = hits::couple(model.bank, model.plan, z0.row(0), horizon);
    } catch (const DivergenceError& e) {
        throw e.with_context("lhits_predict");
    }
    Matrix out = model.from_latent(z);
    // Batched products round differently from single-row ones.
    out.row(0) = model.from_latent(z0);
    return out;
}

} // namespace lhits
