#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lhits/linalg.hpp"

namespace lhits::hits {

enum class Interpolant { CubicNotAKnot, Linear };

inline std::string to_string(Interpolant i) { return i == Interpolant::Linear ? "linear" : "cubic"; }

inline Interpolant interpolant_from_string(const std::string& s)
{
    if (s == "cubic")
        return Interpolant::CubicNotAKnot;
    if (s == "linear")
        return Interpolant::Linear;
    throw ParameterError("unknown interpolant '" + s + "'");
}

namespace detail {

/// Solves a tridiagonal system with partial pivoting (the LAPACK gtsv scheme)
/// for every column of rhs. lower[i] is A(i+1, i), upper[i] is A(i, i+1).
inline Matrix solve_tridiagonal(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                                Matrix rhs)
{
    const std::size_t n = diag.size();
    std::vector<double> upper2(n, 0.0);
    auto row = [&](std::size_t i) { return rhs.row(static_cast<Eigen::Index>(i)); };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(diag[i]) >= std::abs(lower[i])) {
            if (diag[i] == 0.0)
                throw ParameterError("spline system is singular");
            const double fact = lower[i] / diag[i];
            diag[i + 1] -= fact * upper[i];
            row(i + 1) -= fact * row(i);
        } else {
            const double fact = diag[i] / lower[i];
            diag[i] = lower[i];
            const double temp = diag[i + 1];
            diag[i + 1] = upper[i] - fact * temp;
            if (i + 2 < n) {
                upper2[i] = upper[i + 1];
                upper[i + 1] = -fact * upper2[i];
            }
            upper[i] = temp;
            const RowVector old_i = row(i);
            row(i) = row(i + 1);
            row(i + 1) = old_i - fact * row(i + 1);
        }
    }
    if (diag[n - 1] == 0.0)
        throw ParameterError("spline system is singular");
    row(n - 1) /= diag[n - 1];
    if (n >= 2)
        row(n - 2) = (row(n - 2) - upper[n - 2] * row(n - 1)) / diag[n - 2];
    for (std::size_t i = n - 2; i-- > 0;)
        row(i) = (row(i) - upper[i] * row(i + 1) - upper2[i] * row(i + 2)) / diag[i];
    return rhs;
}

/// Node slopes of the not-a-knot cubic spline through (t, y), one column per dimension.
inline Matrix not_a_knot_slopes(const std::vector<double>& t, const Matrix& y)
{
    const std::size_t n = t.size();
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        h[i] = t[i + 1] - t[i];
    Matrix secant(static_cast<Eigen::Index>(n - 1), y.cols());
    for (std::size_t i = 0; i + 1 < n; ++i)
        secant.row(static_cast<Eigen::Index>(i)) =
            (y.row(static_cast<Eigen::Index>(i + 1)) - y.row(static_cast<Eigen::Index>(i))) / h[i];

    std::vector<double> lower(n - 1), diag(n), upper(n - 1);
    Matrix rhs(static_cast<Eigen::Index>(n), y.cols());
    // Third derivative continuous across t[1].
    const double d0 = t[2] - t[0];
    diag[0] = h[1];
    upper[0] = d0;
    rhs.row(0) = ((h[0] + 2.0 * d0) * h[1] * secant.row(0) + h[0] * h[0] * secant.row(1)) / d0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        lower[i - 1] = h[i];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        upper[i] = h[i - 1];
        rhs.row(static_cast<Eigen::Index>(i)) =
            3.0 * (h[i] * secant.row(static_cast<Eigen::Index>(i - 1)) + h[i - 1] * secant.row(static_cast<Eigen::Index>(i)));
    }
    // Third derivative continuous across t[n-2].
    const double dn = t[n - 1] - t[n - 3];
    lower[n - 2] = dn;
    diag[n - 1] = h[n - 3];
    rhs.row(static_cast<Eigen::Index>(n - 1)) =
        (h[n - 2] * h[n - 2] * secant.row(static_cast<Eigen::Index>(n - 3)) +
         (2.0 * dn + h[n - 2]) * h[n - 3] * secant.row(static_cast<Eigen::Index>(n - 2))) /
        dn;
    return solve_tridiagonal(std::move(lower), std::move(diag), std::move(upper), std::move(rhs));
}

} // namespace detail

/// Evaluates a per-dimension interpolant through (node_times, node_values) at
/// query_times. Queries that coincide with a node return that node's row
/// unchanged. Fewer than four nodes fall back to linear interpolation.
inline Matrix interpolate_fill(const std::vector<double>& node_times, const Matrix& node_values,
                               const std::vector<double>& query_times,
                               Interpolant kind = Interpolant::CubicNotAKnot)
{
    const std::size_t n = node_times.size();
    if (n < 2)
        throw ParameterError("interpolate_fill: need at least 2 nodes");
    require_shape(node_values.rows() == static_cast<Eigen::Index>(n), "interpolate_fill: node count mismatch");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(node_times[i] < node_times[i + 1]))
            throw ParameterError("interpolate_fill: node times must be strictly increasing");

    const bool cubic = kind == Interpolant::CubicNotAKnot && n >= 4;
    const Matrix slopes = cubic ? detail::not_a_knot_slopes(node_times, node_values) : Matrix();

    Matrix out(static_cast<Eigen::Index>(query_times.size()), node_values.cols());
    for (std::size_t q = 0; q < query_times.size(); ++q) {
        const double t = query_times[q];
        if (t < node_times.front() || t > node_times.back())
            throw ExtrapolationError("interpolate_fill: query " + std::to_string(t) + " outside [" +
                                     std::to_string(node_times.front()) + ", " + std::to_string(node_times.back()) + "]");
        auto it = std::lower_bound(node_times.begin(), node_times.end(), t);
        auto k = static_cast<Eigen::Index>(it - node_times.begin());
        if (*it == t) {
            out.row(static_cast<Eigen::Index>(q)) = node_values.row(k);
            continue;
        }
        const Eigen::Index i = k - 1;
        const double t0 = node_times[static_cast<std::size_t>(i)];
        const double h = node_times[static_cast<std::size_t>(k)] - t0;
        const double s = (t - t0) / h;
        if (!cubic) {
            out.row(static_cast<Eigen::Index>(q)) = (1.0 - s) * node_values.row(i) + s * node_values.row(k);
            continue;
        }
        // Cubic Hermite basis on [t_i, t_{i+1}].
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
        out.row(static_cast<Eigen::Index>(q)) = h00 * node_values.row(i) + h10 * h * slopes.row(i) +
                                                h01 * node_values.row(k) + h11 * h * slopes.row(k);
    }
    return out;
}

} // namespace lhits::hits
