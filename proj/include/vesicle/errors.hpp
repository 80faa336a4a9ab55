#pragma once

#include <stdexcept>
#include <string>

namespace vesicle {

// Failure taxonomy. Every error a caller might want to branch on gets its
// own type; everything else surfaces as std::invalid_argument from the
// type validators.

// A Fourier symbol of the implicit operator hit zero or went negative:
// the time step is too large for the scheme's positivity condition.
struct NonPositiveSymbol : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A step produced NaN or Inf (blow-up; reduce dt).
struct NonFinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Picard fixed-point iteration failed to reach tolerance.
struct PicardDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A converged backward-Euler iterate violated the one-sided energy
// inequality beyond slack (non-minimizing root).
struct EnergyInequalityViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownPreset : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace vesicle
