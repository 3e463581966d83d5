#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lhits/linalg.hpp"

namespace lhits::pde {

enum class SystemTag : std::uint8_t { FHN = 0, KS = 1, Synthetic = 2 };

inline std::string to_string(SystemTag s)
{
    switch (s) {
    case SystemTag::FHN: return "fhn";
    case SystemTag::KS: return "ks";
    case SystemTag::Synthetic: return "synthetic";
    }
    return "unknown";
}

inline SystemTag system_from_string(const std::string& s)
{
    if (s == "fhn")
        return SystemTag::FHN;
    if (s == "ks")
        return SystemTag::KS;
    if (s == "synthetic")
        return SystemTag::Synthetic;
    throw ParameterError("unknown system '" + s + "'");
}

/// Uniform 1-D grid. Periodic grids have n cells of width L/n starting at
/// -L/2; non-periodic grids have n nodes spanning [0, L].
struct Grid1D {
    std::size_t n = 0;
    double length = 0.0;
    bool periodic = false;

    static Grid1D make(std::size_t points, double length, bool periodic)
    {
        if (points < 4)
            throw ParameterError("grid needs at least 4 points, got " + std::to_string(points));
        if (!(length > 0.0))
            throw ParameterError("grid length must be positive");
        return Grid1D{points, length, periodic};
    }

    double dx() const noexcept
    {
        return periodic ? length / static_cast<double>(n) : length / static_cast<double>(n - 1);
    }

    double x(std::size_t i) const noexcept
    {
        return periodic ? -0.5 * length + static_cast<double>(i) * dx() : static_cast<double>(i) * dx();
    }
};

/// p trajectories, each a T x n matrix (one row per time step, spacing dt).
struct TrajectorySet {
    std::vector<Matrix> trajectories;
    double dt = 0.0;
    SystemTag system = SystemTag::Synthetic;

    std::size_t count() const noexcept { return trajectories.size(); }
    std::size_t steps() const noexcept { return trajectories.empty() ? 0 : static_cast<std::size_t>(trajectories.front().rows()); }
    std::size_t state_dim() const noexcept { return trajectories.empty() ? 0 : static_cast<std::size_t>(trajectories.front().cols()); }

    void validate() const
    {
        if (!(dt > 0.0))
            throw ParameterError("trajectory set dt must be positive");
        for (std::size_t i = 0; i < trajectories.size(); ++i) {
            require_shape(trajectories[i].rows() == trajectories.front().rows() &&
                              trajectories[i].cols() == trajectories.front().cols(),
                          "trajectory " + std::to_string(i) + " has a different shape");
            if (!trajectories[i].allFinite())
                throw ParameterError("trajectory " + std::to_string(i) + " has non-finite entries");
        }
    }

    /// Trajectories [first, first + count) as a new set.
    TrajectorySet slice(std::size_t first, std::size_t count) const
    {
        if (first + count > trajectories.size())
            throw ParameterError("trajectory slice out of range");
        TrajectorySet out{{}, dt, system};
        out.trajectories.assign(trajectories.begin() + static_cast<std::ptrdiff_t>(first),
                                trajectories.begin() + static_cast<std::ptrdiff_t>(first + count));
        return out;
    }

    /// All time steps of all trajectories stacked row-wise.
    Matrix stacked() const
    {
        Matrix out(static_cast<Eigen::Index>(count() * steps()), static_cast<Eigen::Index>(state_dim()));
        Eigen::Index row = 0;
        for (const auto& t : trajectories) {
            out.middleRows(row, t.rows()) = t;
            row += t.rows();
        }
        return out;
    }
};

} // namespace lhits::pde
