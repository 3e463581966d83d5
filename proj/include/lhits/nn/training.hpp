#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "lhits/linalg.hpp"
#include "lhits/nn/adam.hpp"
#include "lhits/rng.hpp"

namespace lhits::nn {

/// Minibatch optimization settings shared by every trainer.
struct TrainConfig {
    std::size_t epochs = 0;
    std::size_t batch_size = 32;
    AdamConfig adam;
    std::uint64_t seed = 0;
};

namespace detail {

inline void gather_rows(const Matrix& src, const std::vector<std::size_t>& order, std::size_t begin,
                        std::size_t end, Matrix& dst)
{
    dst.resize(static_cast<Eigen::Index>(end - begin), src.cols());
    for (std::size_t i = begin; i < end; ++i)
        dst.row(static_cast<Eigen::Index>(i - begin)) = src.row(static_cast<Eigen::Index>(order[i]));
}

inline void check_batch(const TrainConfig& cfg)
{
    if (cfg.batch_size == 0)
        throw ParameterError("batch size must be positive");
    if (!(cfg.adam.lr > 0.0))
        throw ParameterError("learning rate must be positive");
}

/// Runs `cfg.epochs` epochs over `rows` samples. `batch_step(order, begin, end)`
/// performs one minibatch update and returns its loss. Minibatch order is
/// reshuffled every epoch from the counter stream keyed by (seed, epoch).
/// A batch step signals a non-finite loss by throwing TrainingError; the
/// epoch index is appended here.
template <class BatchStep>
std::vector<double> run_epochs(std::size_t rows, const TrainConfig& cfg, const std::string& label,
                               BatchStep&& batch_step)
{
    std::vector<double> history;
    history.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto order = shuffled_indices(rows, cfg.seed, epoch);
        double weighted = 0.0;
        for (std::size_t begin = 0; begin < rows; begin += cfg.batch_size) {
            const std::size_t end = std::min(rows, begin + cfg.batch_size);
            double loss = 0.0;
            try {
                loss = batch_step(order, begin, end);
            } catch (const TrainingError& e) {
                throw TrainingError(label + ": " + e.what() + " at epoch " + std::to_string(epoch));
            }
            weighted += loss * static_cast<double>(end - begin);
        }
        history.push_back(weighted / static_cast<double>(rows));
    }
    return history;
}

inline void check_loss(double loss)
{
    if (!std::isfinite(loss))
        throw TrainingError("non-finite loss");
}

} // namespace detail

} // namespace lhits::nn
