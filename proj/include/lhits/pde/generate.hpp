#pragma once

#include <cstdint>

#include "lhits/pde/fhn.hpp"
#include "lhits/pde/initial_conditions.hpp"
#include "lhits/pde/ks.hpp"

namespace lhits::pde {

/// Everything needed to produce ground-truth trajectories of one system.
struct SimulationSpec {
    SystemTag system = SystemTag::FHN;
    Grid1D grid;
    double dt = 0.01;
    std::size_t steps = 0;  // recorded states per trajectory, including the initial one
    std::size_t burn_in = 0;  // steps simulated and discarded before recording starts
    std::size_t fhn_substeps = 4;
    FhnParams fhn;
    KsParams ks;
    IcConfig ic;
};

inline Matrix simulate(const SimulationSpec& spec, const Vector& initial)
{
    if (spec.steps == 0)
        throw ParameterError("simulate: need at least one recorded state");
    const std::size_t advance = spec.burn_in + spec.steps - 1;
    const auto recorded = static_cast<Eigen::Index>(spec.steps);
    if (spec.system == SystemTag::FHN) {
        const auto n = static_cast<Eigen::Index>(spec.grid.n);
        require_shape(initial.size() == 2 * n, "simulate: FHN state must be [u; v]");
        return simulate_fhn(initial.head(n), initial.tail(n), spec.grid, spec.dt, advance, spec.fhn_substeps, spec.fhn)
            .bottomRows(recorded);
    }
    if (spec.system == SystemTag::KS)
        return simulate_ks_etdrk4(initial, spec.grid, spec.dt, advance, spec.ks).bottomRows(recorded);
    throw ParameterError("simulate: unsupported system " + to_string(spec.system));
}

/// `count` trajectories from initial conditions sampled with `seed`.
inline TrajectorySet generate_trajectories(const SimulationSpec& spec, std::size_t count, std::uint64_t seed)
{
    TrajectorySet set{{}, spec.dt, spec.system};
    for (const Vector& ic : sample_initial_conditions(spec.system, count, seed, spec.grid, spec.ic))
        set.trajectories.push_back(simulate(spec, ic));
    return set;
}

} // namespace lhits::pde
