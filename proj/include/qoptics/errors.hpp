#pragma once

#include <stdexcept>
#include <string>

namespace qoptics {

// Base of every error raised by the engines. The CLI maps any of these to a
// nonzero exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mode labels or occupation vectors that do not fit the registry in use.
class RegistryError : public Error {
public:
    using Error::Error;
};

// An element produced an occupation above the configured per-mode or total cap.
// Raising the caps on the circuit is the fix.
class TruncationOverflow : public Error {
public:
    using Error::Error;
};

// Invalid element or source parameters (non-unitary convention, |q| >= 1, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Perturbation theory is undefined: an intermediate state is resonant with the
// initial state.
class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

}  // namespace qoptics
