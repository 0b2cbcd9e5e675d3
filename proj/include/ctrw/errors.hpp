#pragma once

#include <stdexcept>
#include <string>

namespace ctrw {

/// Requested time step breaks the nonnegativity bound (q0 < 0 or p0 < 0).
class StabilityViolation : public std::runtime_error {
public:
    explicit StabilityViolation(const std::string& msg) : std::runtime_error(msg) {}
};

/// Lattice truncation radius too small for the requested tail tolerance.
class TruncationTooCoarse : public std::runtime_error {
public:
    explicit TruncationTooCoarse(const std::string& msg) : std::runtime_error(msg) {}
};

/// Frequency cutoff leaves non-negligible transform mass (FFT inversion).
class AliasingError : public std::runtime_error {
public:
    explicit AliasingError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Discrete Laplace sum truncated before the exponential tail is negligible.
class TailError : public std::runtime_error {
public:
    explicit TailError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Coefficient table horizon shorter than the history the recursion needs.
class HistoryMissing : public std::runtime_error {
public:
    explicit HistoryMissing(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ctrw
