#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>

#include "lhits/errors.hpp"

namespace lhits {

/// Dense row-major matrix of doubles; a batch of states is one row per state.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
/// Column vector of doubles.
using Vector = Eigen::VectorXd;
/// Row vector, used for biases broadcast over a batch.
using RowVector = Eigen::RowVectorXd;

inline void require_shape(bool ok, const std::string& what)
{
    if (!ok)
        throw ShapeError(what);
}

inline std::string shape_str(Eigen::Index rows, Eigen::Index cols)
{
    return std::to_string(rows) + "x" + std::to_string(cols);
}

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m)
{
    return m.allFinite();
}

/// Mean squared entrywise difference of two equally shaped arrays.
template <class A, class B>
double mean_squared_difference(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b)
{
    require_shape(a.rows() == b.rows() && a.cols() == b.cols(),
                  "mean_squared_difference: shapes " + shape_str(a.rows(), a.cols()) + " vs " +
                      shape_str(b.rows(), b.cols()));
    if (a.size() == 0)
        return 0.0;
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

} // namespace lhits
