#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace daecbf {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A NaN or Inf appeared where a finite value was required.
struct NonFinite : Error {
  using Error::Error;
};

/// Newton iteration (or another iterative routine) failed to converge.
struct NoConvergence : Error {
  NoConvergence(const std::string& what, std::vector<double> last_iterate,
                double residual_norm)
      : Error(what),
        last_iterate(std::move(last_iterate)),
        residual_norm(residual_norm) {}
  std::vector<double> last_iterate;
  double residual_norm{};
};

/// State violates the manifold tolerance.
struct OffManifold : Error {
  using Error::Error;
};

/// Extended Jacobian lost full row rank at one or more probe points.
struct RegularityViolated : Error {
  RegularityViolated(const std::string& what,
                     std::vector<std::size_t> offending_probes = {})
      : Error(what), offending_probes(std::move(offending_probes)) {}
  std::vector<std::size_t> offending_probes;
};

/// Numeric rank checks contradict the declared differentiation index.
struct InconsistentIndex : Error {
  using Error::Error;
};

/// Compatibility row with no input authority but nonzero drift residual.
struct StructuralInfeasibility : Error {
  using Error::Error;
};

/// Barrier input row vanished at a boundary point (relative degree mismatch).
struct DegenerateRow : Error {
  using Error::Error;
};

/// Iteration cap hit in the QP active-set loop.
struct MaxIterations : Error {
  using Error::Error;
};

/// Local NLP search and grid oracle disagree on the verdict sign.
struct OracleDisagreement : Error {
  using Error::Error;
};

/// Boundary band contains no manifold samples inside the domain box.
struct NoBoundarySamples : Error {
  using Error::Error;
};

/// Config / CLI usage error.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace daecbf
