#pragma once

// Phase-1 simplex for the feasibility of A u <= r with free u, returning
// either a witness or a Farkas infeasibility certificate recovered from the
// phase-1 duals.  Bland's rule throughout, so the pivot order is fixed and
// cycling cannot occur.

#include <cstddef>
#include <optional>
#include <vector>

#include "daecbf/matrix.hpp"

namespace daecbf {

/// Nonnegative multiplier lambda with lambda^T A = 0 and lambda^T r < 0
/// (normalized so lambda^T r = -1).
struct FarkasCertificate {
  Vector lambda;
  double residual_eq = 0.0;  // ||lambda^T A||_inf
  double value = 0.0;        // lambda^T r (normalized to -1)
};

struct LpFeasibility {
  bool feasible = false;
  Vector witness;                             // u with A u <= r when feasible
  std::optional<FarkasCertificate> certificate;  // when infeasible
  double phase1_value = 0.0;                  // min sum of artificials
};

/// Decides feasibility of A u <= r.  Empty systems are trivially feasible.
inline LpFeasibility lp_feasible(const Matrix& a, const Vector& r) {
  const std::size_t m = a.rows(), n = a.cols();
  require_finite(a, "lp_feasible");
  require_finite(r, "lp_feasible");
  LpFeasibility out;
  if (m == 0) {
    out.feasible = true;
    out.witness.assign(n, 0.0);
    return out;
  }

  // Columns: u+ (n), u- (n), s (m), t (m).  Rows with negative rhs are
  // negated so the starting basis (s_i or t_i) is the identity.
  const std::size_t ncols = 2 * n + 2 * m;
  std::vector<double> sign(m, 1.0);
  Matrix tab(m, ncols + 1);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (r[i] < 0.0) sign[i] = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      tab(i, j) = sign[i] * a(i, j);
      tab(i, n + j) = -sign[i] * a(i, j);
    }
    tab(i, 2 * n + i) = sign[i];
    tab(i, 2 * n + m + i) = -sign[i];
    tab(i, ncols) = sign[i] * r[i];
    basis[i] = sign[i] > 0.0 ? 2 * n + i : 2 * n + m + i;
  }

  // Reduced-cost row for min sum(t); price out the initial t-basics.
  std::vector<double> rc(ncols + 1, 0.0);
  for (std::size_t j = 0; j < m; ++j) rc[2 * n + m + j] = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] >= 2 * n + m) {
      for (std::size_t j = 0; j <= ncols; ++j) rc[j] -= tab(i, j);
    }
  }

  const double eps = 1e-11;
  const std::size_t max_pivots = 200 * (m + n) + 200;
  for (std::size_t pivot = 0; pivot < max_pivots; ++pivot) {
    // Bland: lowest-index improving column.
    std::size_t enter = ncols;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (rc[j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter == ncols) break;  // optimal

    // Ratio test; ties to the lowest basis index.
    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab(i, enter) > eps) {
        const double ratio = tab(i, ncols) / tab(i, enter);
        if (leave == m || ratio < best - eps ||
            (ratio < best + eps && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
    }
    if (leave == m) break;  // phase-1 objective is bounded below; cannot happen

    const double piv = tab(leave, enter);
    for (std::size_t j = 0; j <= ncols; ++j) tab(leave, j) /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = tab(i, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= ncols; ++j) tab(i, j) -= f * tab(leave, j);
    }
    const double fr = rc[enter];
    for (std::size_t j = 0; j <= ncols; ++j) rc[j] -= fr * tab(leave, j);
    basis[leave] = enter;
  }

  double opt = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= 2 * n + m) opt += tab(i, ncols);
  out.phase1_value = opt;

  if (opt <= 1e-9) {
    out.feasible = true;
    out.witness.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (basis[i] < n) out.witness[basis[i]] += tab(i, ncols);
      else if (basis[i] < 2 * n) out.witness[basis[i] - n] -= tab(i, ncols);
    }
    return out;
  }

  // Farkas multiplier: the final reduced cost of each original slack column.
  FarkasCertificate cert;
  cert.lambda.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) cert.lambda[i] = std::max(rc[2 * n + i], 0.0);
  double ltr = 0.0;
  for (std::size_t i = 0; i < m; ++i) ltr += cert.lambda[i] * r[i];
  // ltr = -opt < 0 up to roundoff; normalize to lambda^T r = -1.
  const double scale = -1.0 / ltr;
  for (auto& l : cert.lambda) l *= scale;
  Vector lta(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) lta[j] += cert.lambda[i] * a(i, j);
  cert.residual_eq = norm_inf(lta);
  cert.value = -1.0;
  out.feasible = false;
  out.certificate = std::move(cert);
  return out;
}

}  // namespace daecbf
