#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lhits {

/// Base of every error raised by the library. The CLI maps each subclass to
/// its own exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class TrainingError : public Error {
public:
    using Error::Error;
};

/// A rollout or solver produced a non-finite state.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : Error(what + " (step " + std::to_string(step) + ")"), detail_(what), step_(step) {}

    std::size_t step() const noexcept { return step_; }
    const std::string& detail() const noexcept { return detail_; }

    /// Same error with a stage prefix.
    DivergenceError with_context(const std::string& prefix) const { return {prefix + ": " + detail_, step_}; }

private:
    std::string detail_;
    std::size_t step_;
};

class ExtrapolationError : public Error {
public:
    using Error::Error;
};

class SelectionError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : Error("config key '" + key + "': " + what), key_(key) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// File missing, unreadable or unwritable.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace lhits
