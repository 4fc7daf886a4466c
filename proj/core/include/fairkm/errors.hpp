#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairkm {

// Dimension/shape/range violations use std::invalid_argument directly. The
// types below carry enough context for callers to react programmatically.

/// A solver was asked to run in a regime it does not support (e.g. the
/// two-group line search with m != 2).
class UnsupportedModeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A cluster whose gamma-weighted denominator sum_j gamma_j * alpha_i^j is
/// zero, so the convex combination of group means is undefined.
class DegenerateClusterError : public std::domain_error {
 public:
  explicit DegenerateClusterError(std::size_t cluster)
      : std::domain_error("degenerate cluster " + std::to_string(cluster) +
                          ": no present group carries positive weight"),
        cluster_(cluster) {}

  std::size_t cluster() const noexcept { return cluster_; }

 private:
  std::size_t cluster_;
};

/// Centers handed to the lower-bound certificate are not stationary on Z_S,
/// so min_j f_j would not be a valid bound.
class InvalidCertificateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Categorical encoding failure (label not seen when the encoder was fit).
class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input: CSV contents, run specifications, plan documents.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fairkm
