#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lhits/errors.hpp"

namespace lhits::persist {

using Bytes = std::vector<unsigned char>;

inline void put_u64(Bytes& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void put_f64(Bytes& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

/// Bounds-checked little-endian reader; failures name the byte offset.
class Reader {
public:
    explicit Reader(const Bytes& bytes) : bytes_(bytes) {}

    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    void need(std::size_t count, const std::string& what) const
    {
        if (remaining() < count)
            throw FormatError("truncated " + what + ": need " + std::to_string(count) + " bytes, have " +
                                  std::to_string(remaining()),
                              pos_);
    }

    unsigned char u8(const std::string& what)
    {
        need(1, what);
        return bytes_[pos_++];
    }

    std::uint64_t u64(const std::string& what)
    {
        need(8, what);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64(const std::string& what) { return std::bit_cast<double>(u64(what)); }

    std::string text(std::size_t count, const std::string& what)
    {
        need(count, what);
        std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                      bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + count));
        pos_ += count;
        return s;
    }

    /// Copies `count` doubles into dst without per-element checks (need() first).
    void f64_block(double* dst, std::size_t count)
    {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t v = 0;
            for (int b = 0; b < 8; ++b)
                v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(b)]) << (8 * b);
            dst[i] = std::bit_cast<double>(v);
            pos_ += 8;
        }
    }

private:
    const Bytes& bytes_;
    std::size_t pos_ = 0;
};

inline Bytes read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

/// Writes to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t size)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        out.flush();
        if (!out)
            throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
    }
}

inline void write_file_atomic(const std::filesystem::path& path, const Bytes& bytes)
{
    write_file_atomic(path, bytes.data(), bytes.size());
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& text)
{
    write_file_atomic(path, text.data(), text.size());
}

} // namespace lhits::persist
