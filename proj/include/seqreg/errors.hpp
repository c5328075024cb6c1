#pragma once

#include <stdexcept>
#include <string>

namespace seqreg {

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Covering lattice would exceed the configured point cap; reduce tau or
// increase eta.
struct CoverGridTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// No Monte Carlo draw landed inside the ellipsoid; h too small for n_mc.
struct ZeroSmallBall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The zeta integral diverges for the requested distribution family.
struct ZetaAbsent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonSummable : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ContractionViolated : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Empirical small-ball proportion vanished at the smallest bandwidth of a
// rate-validation grid; raise the grid minimum.
struct InsufficientHits : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace seqreg
