#pragma once

// Slow, independent reference implementations used to cross-check the fast
// solvers: vertex enumeration for LP feasibility and exhaustive active-set
// enumeration for small QPs.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "daecbf/matrix.hpp"

namespace oracles {

using daecbf::Matrix;
using daecbf::Vector;

// Solves A x = b for square A; returns nothing if A is numerically singular.
inline std::optional<Vector> solve_if_regular(Matrix a, Vector b, double piv_tol = 1e-9) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(best, col))) best = r;
    if (std::abs(a(best, col)) < piv_tol) return std::nullopt;
    if (best != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(best, j));
      std::swap(b[col], b[best]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  Vector x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

/// Brute-force feasibility of A u <= r over free u: boxes the problem with
/// |u_i| <= big and enumerates every potential vertex (each choice of n
/// active rows).  Exact for nondegenerate data.
inline bool lp_feasible_bruteforce(const Matrix& a, const Vector& r, double big = 1e6,
                                   double tol = 1e-7) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m == 0 || n == 0) return true;
  Matrix full(m + 2 * n, n);
  Vector fr(m + 2 * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) full(i, j) = a(i, j);
    fr[i] = r[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    full(m + 2 * j, j) = 1.0;
    fr[m + 2 * j] = big;
    full(m + 2 * j + 1, j) = -1.0;
    fr[m + 2 * j + 1] = big;
  }
  const std::size_t rows = m + 2 * n;
  std::vector<std::size_t> idx(n, 0);
  // iterate over all strictly increasing n-tuples of row indices
  for (std::size_t j = 0; j < n; ++j) idx[j] = j;
  while (true) {
    Matrix sub(n, n);
    Vector sr(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t c = 0; c < n; ++c) sub(j, c) = full(idx[j], c);
      sr[j] = fr[idx[j]];
    }
    if (auto u = solve_if_regular(sub, sr)) {
      bool ok = true;
      for (std::size_t i = 0; i < rows && ok; ++i) {
        double v = -fr[i];
        for (std::size_t j = 0; j < n; ++j) v += full(i, j) * (*u)[j];
        if (v > tol) ok = false;
      }
      if (ok) return true;
    }
    // advance to the next strictly increasing index tuple
    bool advanced = false;
    std::size_t k = n;
    while (k-- > 0) {
      if (idx[k] < rows - n + k) {
        ++idx[k];
        for (std::size_t j = k + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) return false;
  }
}

/// Exhaustive active-set oracle for min 1/2 u^T H u + c^T u s.t. E u = e,
/// A u <= r on small problems (<= ~12 inequality rows).  Returns nothing if
/// infeasible (no KKT point passes the checks).
inline std::optional<Vector> qp_enumerate(const Matrix& h, const Vector& c,
                                          const Matrix& eq_a, const Vector& eq_r,
                                          const Matrix& a, const Vector& r,
                                          double tol = 1e-7) {
  const std::size_t n = h.rows(), me = eq_a.rows(), mi = a.rows();
  std::optional<Vector> best;
  double best_obj = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << mi); ++mask) {
    std::vector<std::size_t> act;
    for (std::size_t i = 0; i < mi; ++i)
      if (mask & (1u << i)) act.push_back(i);
    const std::size_t k = me + act.size();
    Matrix kkt(n + k, n + k);
    Vector rhs(n + k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) kkt(i, j) = h(i, j);
      rhs[i] = -c[i];
    }
    for (std::size_t i = 0; i < me; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        kkt(n + i, j) = eq_a(i, j);
        kkt(j, n + i) = eq_a(i, j);
      }
    for (std::size_t i = 0; i < act.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) {
        kkt(n + me + i, j) = a(act[i], j);
        kkt(j, n + me + i) = a(act[i], j);
      }
    for (std::size_t i = 0; i < me; ++i) rhs[n + i] = eq_r[i];
    for (std::size_t i = 0; i < act.size(); ++i) rhs[n + me + i] = r[act[i]];
    const auto sol = solve_if_regular(kkt, rhs);
    if (!sol) continue;
    Vector u(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(n));
    bool ok = true;
    for (std::size_t i = 0; i < mi && ok; ++i) {
      double v = -r[i];
      for (std::size_t j = 0; j < n; ++j) v += a(i, j) * u[j];
      if (v > tol) ok = false;
    }
    for (std::size_t i = 0; i < me && ok; ++i) {
      double v = -eq_r[i];
      for (std::size_t j = 0; j < n; ++j) v += eq_a(i, j) * u[j];
      if (std::abs(v) > tol) ok = false;
    }
    for (std::size_t i = 0; i < act.size() && ok; ++i)
      if ((*sol)[n + me + i] < -tol) ok = false;
    if (!ok) continue;
    const Vector hu = h * u;
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += 0.5 * u[j] * hu[j] + c[j] * u[j];
    if (!best || obj < best_obj - 1e-12) {
      best = u;
      best_obj = obj;
    }
  }
  return best;
}

}  // namespace oracles
