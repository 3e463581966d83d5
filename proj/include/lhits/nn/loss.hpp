#pragma once

#include "lhits/linalg.hpp"

namespace lhits::nn {

struct LossValue {
    double value = 0.0;
    Matrix gradient;  // d(value)/d(pred)
};

/// Mean over all entries of (pred - target)^2, with gradient 2(pred - target)/count.
inline LossValue mse_loss(const Matrix& pred, const Matrix& target)
{
    require_shape(pred.rows() == target.rows() && pred.cols() == target.cols(),
                  "mse_loss: prediction " + shape_str(pred.rows(), pred.cols()) + " vs target " +
                      shape_str(target.rows(), target.cols()));
    LossValue out;
    if (pred.size() == 0) {
        out.gradient = Matrix::Zero(pred.rows(), pred.cols());
        return out;
    }
    const double count = static_cast<double>(pred.size());
    out.gradient = pred - target;
    out.value = out.gradient.squaredNorm() / count;
    out.gradient *= 2.0 / count;
    return out;
}

} // namespace lhits::nn
