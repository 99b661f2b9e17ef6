#pragma once

#include <stdexcept>
#include <string>

namespace zlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two fields were combined with different truncations.
struct TruncationMismatch : Error {
  using Error::Error;
};

// A field flagged is_real lost Hermitian symmetry beyond tolerance.
struct RealityDrift : Error {
  using Error::Error;
};

// The mode matrix did not show the expected (two real, one conjugate pair)
// eigenvalue pattern; k is below the instability threshold or E=0.
struct ClassificationError : Error {
  using Error::Error;
};

// The mean coefficient of the wave forcing must vanish for the p=0 block.
struct NonzeroMeanForcing : Error {
  using Error::Error;
};

// Picard iteration failed to contract within the iteration budget.
struct NoConvergence : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace zlab
