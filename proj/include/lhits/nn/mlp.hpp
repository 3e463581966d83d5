#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lhits/linalg.hpp"
#include "lhits/rng.hpp"

namespace lhits::nn {

/// Activation applied after every hidden layer. The last layer is always linear.
enum class Activation { ReLU, Identity };

inline std::string to_string(Activation a) { return a == Activation::ReLU ? "relu" : "identity"; }

inline Activation activation_from_string(const std::string& s)
{
    if (s == "relu")
        return Activation::ReLU;
    if (s == "identity")
        return Activation::Identity;
    throw ParameterError("unknown activation '" + s + "'");
}

/// Dense feed-forward network y = a(...a(x W1 + b1)...) WL + bL acting on
/// row-major batches.
struct MlpParams {
    std::vector<std::size_t> dims;
    std::vector<Matrix> weights;    // weights[k] is dims[k] x dims[k+1]
    std::vector<RowVector> biases;  // biases[k] has length dims[k+1]
    Activation activation = Activation::ReLU;

    std::size_t layer_count() const noexcept { return weights.size(); }
    std::size_t input_dim() const noexcept { return dims.empty() ? 0 : dims.front(); }
    std::size_t output_dim() const noexcept { return dims.empty() ? 0 : dims.back(); }

    std::size_t parameter_count() const noexcept
    {
        std::size_t total = 0;
        for (std::size_t k = 0; k < weights.size(); ++k)
            total += static_cast<std::size_t>(weights[k].size() + biases[k].size());
        return total;
    }

    void validate() const
    {
        require_shape(dims.size() >= 2, "MlpParams: need at least input and output dims");
        require_shape(weights.size() + 1 == dims.size() && biases.size() == weights.size(),
                      "MlpParams: layer count does not match dims");
        for (std::size_t k = 0; k < weights.size(); ++k) {
            require_shape(static_cast<std::size_t>(weights[k].rows()) == dims[k] &&
                              static_cast<std::size_t>(weights[k].cols()) == dims[k + 1],
                          "MlpParams: weights[" + std::to_string(k) + "] has shape " +
                              shape_str(weights[k].rows(), weights[k].cols()));
            require_shape(static_cast<std::size_t>(biases[k].size()) == dims[k + 1],
                          "MlpParams: biases[" + std::to_string(k) + "] has wrong length");
        }
    }

    static MlpParams zeros(std::vector<std::size_t> layer_dims, Activation act = Activation::ReLU)
    {
        MlpParams p;
        p.dims = std::move(layer_dims);
        p.activation = act;
        require_shape(p.dims.size() >= 2, "MlpParams: need at least input and output dims");
        for (std::size_t k = 0; k + 1 < p.dims.size(); ++k) {
            p.weights.push_back(Matrix::Zero(static_cast<Eigen::Index>(p.dims[k]),
                                             static_cast<Eigen::Index>(p.dims[k + 1])));
            p.biases.push_back(RowVector::Zero(static_cast<Eigen::Index>(p.dims[k + 1])));
        }
        return p;
    }
};

/// Gradients (or Adam moments) with the same layout as an MlpParams.
struct MlpGradients {
    std::vector<Matrix> weights;
    std::vector<RowVector> biases;

    static MlpGradients zeros_like(const MlpParams& p)
    {
        MlpGradients g;
        for (std::size_t k = 0; k < p.weights.size(); ++k) {
            g.weights.push_back(Matrix::Zero(p.weights[k].rows(), p.weights[k].cols()));
            g.biases.push_back(RowVector::Zero(p.biases[k].size()));
        }
        return g;
    }

    MlpGradients& operator+=(const MlpGradients& o)
    {
        require_shape(weights.size() == o.weights.size(), "MlpGradients: layer count mismatch");
        for (std::size_t k = 0; k < weights.size(); ++k) {
            weights[k] += o.weights[k];
            biases[k] += o.biases[k];
        }
        return *this;
    }

    bool all_zero() const
    {
        for (std::size_t k = 0; k < weights.size(); ++k)
            if (!weights[k].isZero(0.0) || !biases[k].isZero(0.0))
                return false;
        return true;
    }
};

/// He-uniform initialization for ReLU layers (bound sqrt(6/fan_in)); the
/// linear output layer uses bound sqrt(3/fan_in). Biases start at zero.
inline MlpParams init_mlp(std::vector<std::size_t> dims, Activation act, std::uint64_t seed,
                          std::uint64_t key = 0)
{
    MlpParams p = MlpParams::zeros(std::move(dims), act);
    CounterRng rng(seed, key);
    for (std::size_t k = 0; k < p.weights.size(); ++k) {
        const bool last = k + 1 == p.weights.size();
        const double fan_in = static_cast<double>(p.dims[k]);
        const double bound = std::sqrt((last || act == Activation::Identity ? 3.0 : 6.0) / fan_in);
        Matrix& w = p.weights[k];
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j)
                w(i, j) = rng.uniform(-bound, bound);
    }
    return p;
}

/// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardCache {
    std::vector<Matrix> layer_inputs;  // input to layer k (post-activation of k-1)
    std::vector<Matrix> pre_activations;
};

namespace detail {

inline void check_input(const MlpParams& params, const Matrix& x, const char* who)
{
    require_shape(!params.weights.empty(), std::string(who) + ": empty network");
    require_shape(static_cast<std::size_t>(x.cols()) == params.input_dim(),
                  std::string(who) + ": input has " + std::to_string(x.cols()) +
                      " columns, network expects " + std::to_string(params.input_dim()));
}

inline void affine(const Matrix& in, const Matrix& w, const RowVector& b, Matrix& out)
{
    out.resize(in.rows(), w.cols());
    out.noalias() = in * w;
    out.rowwise() += b;
}

} // namespace detail

inline Matrix mlp_forward(const MlpParams& params, const Matrix& x)
{
    detail::check_input(params, x, "mlp_forward");
    Matrix cur = x;
    Matrix next;
    const std::size_t layers = params.layer_count();
    for (std::size_t k = 0; k < layers; ++k) {
        detail::affine(cur, params.weights[k], params.biases[k], next);
        if (k + 1 < layers && params.activation == Activation::ReLU)
            next = next.cwiseMax(0.0);
        cur.swap(next);
    }
    return cur;
}

inline Matrix mlp_forward(const MlpParams& params, const Matrix& x, ForwardCache& cache)
{
    detail::check_input(params, x, "mlp_forward");
    const std::size_t layers = params.layer_count();
    cache.layer_inputs.resize(layers);
    cache.pre_activations.resize(layers);
    cache.layer_inputs[0] = x;
    for (std::size_t k = 0; k < layers; ++k) {
        detail::affine(cache.layer_inputs[k], params.weights[k], params.biases[k],
                       cache.pre_activations[k]);
        if (k + 1 < layers) {
            if (params.activation == Activation::ReLU)
                cache.layer_inputs[k + 1] = cache.pre_activations[k].cwiseMax(0.0);
            else
                cache.layer_inputs[k + 1] = cache.pre_activations[k];
        }
    }
    return cache.pre_activations.back();
}

/// Reverse pass over a cached forward pass. Writes d(loss)/d(input) into
/// `grad_input` when non-null. The ReLU derivative at exactly zero is zero.
inline MlpGradients backprop_grads(const MlpParams& params, const ForwardCache& cache,
                                   const Matrix& grad_output, Matrix* grad_input = nullptr)
{
    const std::size_t layers = params.layer_count();
    require_shape(cache.pre_activations.size() == layers, "backprop_grads: cache does not match network");
    const Matrix& out = cache.pre_activations.back();
    require_shape(grad_output.rows() == out.rows() && grad_output.cols() == out.cols(),
                  "backprop_grads: output gradient has shape " +
                      shape_str(grad_output.rows(), grad_output.cols()) + ", expected " +
                      shape_str(out.rows(), out.cols()));

    MlpGradients g = MlpGradients::zeros_like(params);
    Matrix delta = grad_output;
    for (std::size_t kk = layers; kk-- > 0;) {
        g.weights[kk].noalias() = cache.layer_inputs[kk].transpose() * delta;
        g.biases[kk] = delta.colwise().sum();
        if (kk == 0 && grad_input == nullptr)
            break;
        Matrix back = delta * params.weights[kk].transpose();
        if (kk > 0 && params.activation == Activation::ReLU)
            back = back.cwiseProduct(
                (cache.pre_activations[kk - 1].array() > 0.0).cast<double>().matrix());
        delta.swap(back);
    }
    if (grad_input != nullptr)
        *grad_input = std::move(delta);
    return g;
}

/// Exact gradients of sum(dLoss_dY .* forward(X)) with respect to every parameter.
inline MlpGradients backprop_grads(const MlpParams& params, const Matrix& x, const Matrix& grad_output,
                                   Matrix* grad_input = nullptr)
{
    ForwardCache cache;
    mlp_forward(params, x, cache);
    return backprop_grads(params, cache, grad_output, grad_input);
}

} // namespace lhits::nn
