#pragma once

#include <string>
#include <vector>

#include "lhits/linalg.hpp"

namespace lhits::pde {

/// Input/target rows where each target lies step_multiple grid steps after its
/// input within the same source trajectory.
struct PairSet {
    Matrix inputs;
    Matrix targets;
    std::size_t step_multiple = 1;

    std::size_t size() const noexcept { return static_cast<std::size_t>(inputs.rows()); }
};

/// Inputs plus targets at 1..depth multiples of the step, for unrolled training.
struct UnrolledPairSet {
    Matrix inputs;
    std::vector<Matrix> targets;
    std::size_t step_multiple = 1;
};

/// Pools (x_t, x_{t+s*1}, ..., x_{t+s*depth}) for t = 0..T-1-s*depth over every
/// trajectory; windows never cross a trajectory boundary.
inline UnrolledPairSet build_unrolled_pairs(const std::vector<Matrix>& trajectories, std::size_t step_multiple,
                                            std::size_t depth)
{
    if (step_multiple == 0 || depth == 0)
        throw ParameterError("build_pairs: step multiple and depth must be positive");
    if (trajectories.empty())
        throw ParameterError("build_pairs: no trajectories");
    const std::size_t span = step_multiple * depth;
    Eigen::Index rows = 0;
    for (const auto& t : trajectories) {
        require_shape(t.cols() == trajectories.front().cols(), "build_pairs: trajectories differ in state dim");
        if (static_cast<std::size_t>(t.rows()) <= span)
            throw ParameterError("build_pairs: trajectory of length " + std::to_string(t.rows()) +
                                 " yields no pairs for step " + std::to_string(step_multiple));
        rows += t.rows() - static_cast<Eigen::Index>(span);
    }
    const Eigen::Index dim = trajectories.front().cols();
    UnrolledPairSet out{Matrix(rows, dim), std::vector<Matrix>(depth, Matrix(rows, dim)), step_multiple};
    Eigen::Index row = 0;
    const auto s = static_cast<Eigen::Index>(step_multiple);
    for (const auto& t : trajectories) {
        const Eigen::Index count = t.rows() - static_cast<Eigen::Index>(span);
        out.inputs.middleRows(row, count) = t.topRows(count);
        for (std::size_t j = 0; j < depth; ++j)
            out.targets[j].middleRows(row, count) = t.middleRows(s * static_cast<Eigen::Index>(j + 1), count);
        row += count;
    }
    return out;
}

inline PairSet build_pairs(const std::vector<Matrix>& trajectories, std::size_t step_multiple)
{
    UnrolledPairSet u = build_unrolled_pairs(trajectories, step_multiple, 1);
    return PairSet{std::move(u.inputs), std::move(u.targets.front()), step_multiple};
}

} // namespace lhits::pde
