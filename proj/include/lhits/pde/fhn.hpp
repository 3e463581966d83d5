#pragma once

#include <utility>

#include "lhits/pde/trajectory.hpp"

namespace lhits::pde {

struct FhnParams {
    double eps = 0.015;
};

/// Second-order central Laplacian with homogeneous Neumann boundaries
/// (reflected ghost nodes u[-1] = u[1], u[n] = u[n-2]).
inline Vector neumann_laplacian(const Vector& u, const Grid1D& grid)
{
    const auto n = static_cast<Eigen::Index>(grid.n);
    require_shape(u.size() == n, "neumann_laplacian: field length does not match grid");
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    Vector lap(n);
    lap(0) = 2.0 * (u(1) - u(0)) * inv_dx2;
    lap(n - 1) = 2.0 * (u(n - 2) - u(n - 1)) * inv_dx2;
    lap.segment(1, n - 2) = (u.head(n - 2) - 2.0 * u.segment(1, n - 2) + u.tail(n - 2)) * inv_dx2;
    return lap;
}

/// Method-of-lines right-hand side:
///   u_t = eps u_xx + (u(u - 0.1)(1 - u) - v + 0.05) / eps
///   v_t = 0.5 u - 2 v + 0.05
inline std::pair<Vector, Vector> fhn_rhs(const Vector& u, const Vector& v, const Grid1D& grid,
                                         double eps)
{
    if (grid.periodic)
        throw ParameterError("fhn_rhs: grid must be non-periodic");
    if (!(eps > 0.0))
        throw ParameterError("fhn_rhs: eps must be positive");
    require_shape(v.size() == u.size(), "fhn_rhs: u and v lengths differ");
    const auto ua = u.array();
    Vector du = eps * neumann_laplacian(u, grid);
    du.array() += (ua * (ua - 0.1) * (1.0 - ua) - v.array() + 0.05) / eps;
    Vector dv = (0.5 * ua - 2.0 * v.array() + 0.05).matrix();
    return {std::move(du), std::move(dv)};
}

/// Classical RK4 with internal step dt/substeps, recording the stacked state
/// [u; v] every dt. Returns (steps + 1) x 2n.
inline Matrix simulate_fhn(const Vector& u0, const Vector& v0, const Grid1D& grid, double dt,
                           std::size_t steps, std::size_t substeps, const FhnParams& params = {})
{
    if (!(dt > 0.0))
        throw ParameterError("simulate_fhn: dt must be positive");
    if (substeps == 0)
        throw ParameterError("simulate_fhn: substeps must be at least 1");
    const auto n = static_cast<Eigen::Index>(grid.n);
    require_shape(u0.size() == n && v0.size() == n, "simulate_fhn: initial state does not match grid");

    Matrix out(static_cast<Eigen::Index>(steps + 1), 2 * n);
    Vector u = u0, v = v0;
    out.row(0) << u.transpose(), v.transpose();
    const double h = dt / static_cast<double>(substeps);
    for (std::size_t s = 1; s <= steps; ++s) {
        for (std::size_t sub = 0; sub < substeps; ++sub) {
            const auto [k1u, k1v] = fhn_rhs(u, v, grid, params.eps);
            const auto [k2u, k2v] = fhn_rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v, grid, params.eps);
            const auto [k3u, k3v] = fhn_rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v, grid, params.eps);
            const auto [k4u, k4v] = fhn_rhs(u + h * k3u, v + h * k3v, grid, params.eps);
            u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        if (!u.allFinite() || !v.allFinite())
            throw DivergenceError("simulate_fhn: state blew up", s);
        out.row(static_cast<Eigen::Index>(s)) << u.transpose(), v.transpose();
    }
    return out;
}

} // namespace lhits::pde
