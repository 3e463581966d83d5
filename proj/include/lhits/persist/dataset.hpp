#pragma once

#include <filesystem>
#include <limits>

#include "lhits/pde/trajectory.hpp"
#include "lhits/persist/binary.hpp"

namespace lhits::persist {

inline constexpr char kDatasetMagic[4] = {'L', 'H', 'T', 'S'};
inline constexpr unsigned char kDatasetVersion = 1;
inline constexpr std::size_t kDatasetHeaderBytes = 4 + 1 + 3 * 8 + 8 + 1;

/// Layout: "LHTS", version byte, p, T, n (u64), dt (f64), system tag byte,
/// then p*T*n f64 values, trajectory-major then time-major. All little-endian.
inline Bytes encode_dataset(const pde::TrajectorySet& set)
{
    set.validate();
    Bytes out(kDatasetMagic, kDatasetMagic + 4);
    out.push_back(kDatasetVersion);
    put_u64(out, set.count());
    put_u64(out, set.steps());
    put_u64(out, set.state_dim());
    put_f64(out, set.dt);
    out.push_back(static_cast<unsigned char>(set.system));
    out.reserve(out.size() + set.count() * set.steps() * set.state_dim() * 8);
    for (const auto& t : set.trajectories)
        for (Eigen::Index r = 0; r < t.rows(); ++r)
            for (Eigen::Index c = 0; c < t.cols(); ++c)
                put_f64(out, t(r, c));
    return out;
}

inline pde::TrajectorySet decode_dataset(const Bytes& bytes)
{
    Reader in(bytes);
    if (in.text(4, "magic") != std::string(kDatasetMagic, 4))
        throw FormatError("not a dataset file (bad magic)", 0);
    if (const auto v = in.u8("version"); v != kDatasetVersion)
        throw FormatError("unsupported dataset version " + std::to_string(v), 4);
    const std::uint64_t p = in.u64("trajectory count");
    const std::uint64_t steps = in.u64("time step count");
    const std::uint64_t n = in.u64("state dim");
    pde::TrajectorySet set;
    set.dt = in.f64("dt");
    const std::size_t tag_offset = in.offset();
    const auto tag = in.u8("system tag");
    if (tag > static_cast<unsigned char>(pde::SystemTag::Synthetic))
        throw FormatError("unknown system tag " + std::to_string(tag), tag_offset);
    set.system = static_cast<pde::SystemTag>(tag);

    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / 8;
    if ((steps && p > limit / steps) || (n && p * steps > limit / n))
        throw FormatError("header dims overflow", 5);
    const std::uint64_t values = p * steps * n;
    if (values * 8 != in.remaining()) {
        if (values * 8 > in.remaining())
            throw FormatError("truncated payload: header promises " + std::to_string(values * 8) + " bytes, file has " +
                                  std::to_string(in.remaining()),
                              bytes.size());
        throw FormatError("trailing bytes after payload", kDatasetHeaderBytes + values * 8);
    }
    for (std::uint64_t i = 0; i < p; ++i) {
        Matrix t(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(n));
        in.f64_block(t.data(), static_cast<std::size_t>(steps * n));
        set.trajectories.push_back(std::move(t));
    }
    return set;
}

inline void save_dataset(const std::filesystem::path& path, const pde::TrajectorySet& set)
{
    write_file_atomic(path, encode_dataset(set));
}

inline pde::TrajectorySet load_dataset(const std::filesystem::path& path) { return decode_dataset(read_file(path)); }

} // namespace lhits::persist
