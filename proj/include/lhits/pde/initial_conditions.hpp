#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "lhits/pde/trajectory.hpp"
#include "lhits/rng.hpp"

namespace lhits::pde {

/// Parameters of the randomized initial-condition families.
struct IcConfig {
    // FHN: u0 = base_u + a exp(-((x - c)/w)^2), v0 = base_v, with c and w as
    // fractions of the domain length.
    double fhn_base_u = 0.1;
    double fhn_base_v = 0.05;
    double fhn_amplitude_min = 0.5;
    double fhn_amplitude_max = 0.9;
    double fhn_center_min = 0.2;
    double fhn_center_max = 0.8;
    double fhn_width_min = 0.05;
    double fhn_width_max = 0.15;
    // KS: sum of up to ks_max_modes cosines with wavenumbers 1..ks_max_wavenumber.
    std::size_t ks_max_modes = 5;
    std::size_t ks_max_wavenumber = 3;
    double ks_amplitude = 1.0;
};

/// Random Fourier profile that can be evaluated anywhere, so periodicity can
/// be checked at the domain ends.
struct FourierProfile {
    double length = 1.0;
    std::vector<int> wavenumbers;
    std::vector<double> amplitudes;
    std::vector<double> phases;

    double operator()(double x) const
    {
        double u = 0.0;
        for (std::size_t m = 0; m < wavenumbers.size(); ++m)
            u += amplitudes[m] *
                 std::cos(2.0 * std::numbers::pi * wavenumbers[m] * (x + 0.5 * length) / length + phases[m]);
        return u;
    }
};

inline FourierProfile sample_ks_profile(CounterRng& rng, const Grid1D& grid, const IcConfig& cfg)
{
    FourierProfile p;
    p.length = grid.length;
    const std::size_t modes = 1 + rng.below(std::max<std::size_t>(cfg.ks_max_modes, 1));
    for (std::size_t m = 0; m < modes; ++m) {
        p.wavenumbers.push_back(1 + static_cast<int>(rng.below(std::max<std::size_t>(cfg.ks_max_wavenumber, 1))));
        p.amplitudes.push_back(rng.uniform(-cfg.ks_amplitude, cfg.ks_amplitude));
        p.phases.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
    }
    return p;
}

/// Deterministic per (seed, index). FHN states are [u; v] (length 2n), KS states length n.
inline std::vector<Vector> sample_initial_conditions(SystemTag system, std::size_t count, std::uint64_t seed,
                                                     const Grid1D& grid, const IcConfig& cfg = {})
{
    if (count == 0)
        throw ParameterError("sample_initial_conditions: count must be at least 1");
    const auto n = static_cast<Eigen::Index>(grid.n);
    std::vector<Vector> out;
    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng(seed, 0x1C00'0000ull + i);
        if (system == SystemTag::KS) {
            const FourierProfile p = sample_ks_profile(rng, grid, cfg);
            Vector u(n);
            for (Eigen::Index j = 0; j < n; ++j)
                u(j) = p(grid.x(static_cast<std::size_t>(j)));
            out.push_back(std::move(u));
        } else if (system == SystemTag::FHN) {
            const double amp = rng.uniform(cfg.fhn_amplitude_min, cfg.fhn_amplitude_max);
            const double center = grid.length * rng.uniform(cfg.fhn_center_min, cfg.fhn_center_max);
            const double width = grid.length * rng.uniform(cfg.fhn_width_min, cfg.fhn_width_max);
            Vector state(2 * n);
            for (Eigen::Index j = 0; j < n; ++j) {
                const double r = (grid.x(static_cast<std::size_t>(j)) - center) / width;
                state(j) = cfg.fhn_base_u + amp * std::exp(-r * r);
                state(n + j) = cfg.fhn_base_v;
            }
            out.push_back(std::move(state));
        } else {
            throw ParameterError("sample_initial_conditions: no initial-condition family for this system");
        }
    }
    return out;
}

} // namespace lhits::pde
