#pragma once

#include <cmath>
#include <string>

#include "lhits/linalg.hpp"

namespace lhits::pde {

enum class NormalizerMode { None, PerFeatureStandardize };

inline std::string to_string(NormalizerMode m) { return m == NormalizerMode::None ? "none" : "standardize"; }

inline NormalizerMode normalizer_mode_from_string(const std::string& s)
{
    if (s == "none")
        return NormalizerMode::None;
    if (s == "standardize")
        return NormalizerMode::PerFeatureStandardize;
    throw ParameterError("unknown normalizer mode '" + s + "'");
}

/// Per-feature affine standardization (x - mean) / std. Features with zero
/// variance keep mean 0 and std 1 so they pass through unchanged.
struct Normalizer {
    NormalizerMode mode = NormalizerMode::None;
    RowVector means;
    RowVector stds;

    static Normalizer fit(NormalizerMode mode, const Matrix& x)
    {
        Normalizer nz;
        nz.mode = mode;
        nz.means = RowVector::Zero(x.cols());
        nz.stds = RowVector::Ones(x.cols());
        if (mode == NormalizerMode::None || x.rows() == 0)
            return nz;
        const RowVector mean = x.colwise().mean();
        const RowVector var = (x.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(x.rows());
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double sd = std::sqrt(var(j));
            if (sd > 0.0) {
                nz.means(j) = mean(j);
                nz.stds(j) = sd;
            }
        }
        return nz;
    }

    std::size_t dim() const noexcept { return static_cast<std::size_t>(means.size()); }

    Matrix apply(const Matrix& x) const
    {
        require_shape(x.cols() == means.size(), "normalizer: width mismatch");
        if (mode == NormalizerMode::None)
            return x;
        return (x.rowwise() - means).array().rowwise() / stds.array();
    }

    Matrix invert(const Matrix& y) const
    {
        require_shape(y.cols() == means.size(), "normalizer: width mismatch");
        if (mode == NormalizerMode::None)
            return y;
        Matrix out = y.array().rowwise() * stds.array();
        out.rowwise() += means;
        return out;
    }
};

} // namespace lhits::pde
