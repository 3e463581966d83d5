#pragma once

#include <Eigen/SVD>

#include <string>

#include "lhits/linalg.hpp"

namespace lhits::nn {

/// Rank-z linear baseline: x ~ mean + (x - mean) C C^T with orthonormal C.
struct PcaModel {
    RowVector mean;
    Matrix components;  // n x z, orthonormal columns

    Matrix project(const Matrix& x) const { return (x.rowwise() - mean) * components; }
    Matrix lift(const Matrix& coords) const { return (coords * components.transpose()).rowwise() + mean; }
    Matrix reconstruct(const Matrix& x) const { return lift(project(x)); }
};

inline PcaModel pca_fit(const Matrix& x, std::size_t z)
{
    const auto n = static_cast<std::size_t>(x.cols());
    const auto rows = static_cast<std::size_t>(x.rows());
    if (z > n)
        throw ParameterError("pca: rank " + std::to_string(z) + " exceeds state dim " + std::to_string(n));
    if (z > rows)
        throw ParameterError("pca: rank " + std::to_string(z) + " exceeds sample count " +
                             std::to_string(rows));
    PcaModel m;
    m.mean = x.colwise().mean();
    const Matrix centered = x.rowwise() - m.mean;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    m.components = svd.matrixV().leftCols(static_cast<Eigen::Index>(z));
    return m;
}

struct PcaResult {
    PcaModel model;
    double reconstruction_mse = 0.0;
};

/// Fits on x and reports the rank-z reconstruction MSE on the same data.
inline PcaResult pca_fit_reconstruct(const Matrix& x, std::size_t z)
{
    PcaResult r{pca_fit(x, z), 0.0};
    r.reconstruction_mse = mean_squared_difference(r.model.reconstruct(x), x);
    return r;
}

} // namespace lhits::nn
