#pragma once

// Semi-explicit control-affine DAE model and its structural analysis:
// constraint Jacobians per differentiation level, index / relative-degree
// bookkeeping, control influence matrix, and the extended-Jacobian
// regularity check.

#include <cstddef>
#include <string>
#include <vector>

#include "daecbf/errors.hpp"
#include "daecbf/matrix.hpp"
#include "daecbf/smooth.hpp"

namespace daecbf {

/// Linear input polytope A_u * u <= r_u.  Empty means unconstrained input.
struct InputPolytope {
  Matrix a_u;
  Vector r_u;
  std::size_t rows() const { return r_u.size(); }
};

/// Semi-explicit DAE:
///   xdot_d = f_d(x) + g_d(x) u,   0 = phi(x),
/// with x = (x_d, x_a).  The constraint chain holds phi and its time
/// derivatives re-expressed as functions of the state alone, one entry per
/// differentiation level 0..declared_index-1 (level k differentiates entry
/// k-1, so declared_index entries suffice).  The constraint never depends on
/// the input.
struct DaeSystem {
  std::string name;
  std::size_t n_d = 0, n_a = 0, n_u = 0;
  SmoothFn f_d;                         // R^n_x -> R^n_d
  MatrixFn g_d;                         // R^n_x -> R^(n_d x n_u)
  std::vector<SmoothFn> constraint_chain;  // phi^(0), ..., phi^(nu)
  std::size_t declared_index = 1;
  InputPolytope input_polytope;

  std::size_t n_x() const { return n_d + n_a; }
  std::size_t n_m() const { return constraint_chain.front().n_out(); }

  template <class S>
  VectorT<S> phi(const VectorT<S>& x) const { return constraint_chain[0](x); }
};

/// Result of the structural analysis.  d = nu + d_prime - 1 by construction.
struct IndexAnalysis {
  std::size_t nu = 1;        // differentiation index (declared, cross-checked)
  std::size_t d_prime = 1;   // constraint-coupled relative degree
  std::size_t d = 1;         // relative degree of phi w.r.t. the full DAE
  std::size_t j_a_rank = 0;  // numeric rank of J_a at level nu across probes
  bool regular = false;      // extended Jacobian full row rank at all probes
};

namespace detail {

// Differentiation levels are 1-based: the Jacobians entering the k-th time
// derivative of phi are those of chain entry k-1.  Level 0 is an alias for
// the raw constraint.
inline std::size_t chain_entry_for_level(std::size_t level) {
  return level == 0 ? 0 : level - 1;
}

}  // namespace detail

/// Splits the Jacobian of the level-k constraint into differential and
/// algebraic blocks (J_d, J_a).
template <class S>
std::pair<MatrixT<S>, MatrixT<S>> constraint_jacobians_t(const DaeSystem& sys,
                                                         const VectorT<S>& x,
                                                         std::size_t level) {
  const SmoothFn& entry = sys.constraint_chain[detail::chain_entry_for_level(level)];
  const MatrixT<S> j = jacobian_of([&entry](const auto& xd) { return entry(xd); }, x);
  MatrixT<S> jd(j.rows(), sys.n_d), ja(j.rows(), sys.n_a);
  for (std::size_t i = 0; i < j.rows(); ++i) {
    for (std::size_t c = 0; c < sys.n_d; ++c) jd(i, c) = j(i, c);
    for (std::size_t c = 0; c < sys.n_a; ++c) ja(i, c) = j(i, sys.n_d + c);
  }
  return {std::move(jd), std::move(ja)};
}

inline std::pair<Matrix, Matrix> constraint_jacobians(const DaeSystem& sys,
                                                      const Vector& x,
                                                      std::size_t level) {
  if (level > sys.declared_index)
    throw Error("constraint_jacobians: level exceeds declared index");
  require_finite(x, "constraint_jacobians");
  auto [jd, ja] = constraint_jacobians_t(sys, x, level);
  require_finite(jd, "constraint_jacobians");
  require_finite(ja, "constraint_jacobians");
  return {std::move(jd), std::move(ja)};
}

/// Control influence matrix eta^(level) = (J_d f_d)^(d'-1) J_d.
/// For d' = 1 this is J_d exactly; the scalar power form requires n_m = 1.
template <class S>
MatrixT<S> control_influence_t(const DaeSystem& sys, const VectorT<S>& x,
                               std::size_t level, std::size_t d_prime) {
  auto [jd, ja] = constraint_jacobians_t(sys, x, level);
  (void)ja;
  if (d_prime == 1) return jd;
  if (jd.rows() != 1)
    throw Error("control_influence: d' > 1 requires a scalar constraint");
  const VectorT<S> fd = sys.f_d(x);
  S scale(1.0);
  S jdf(0.0);
  for (std::size_t c = 0; c < sys.n_d; ++c) jdf += jd(0, c) * fd[c];
  for (std::size_t p = 0; p + 1 < d_prime; ++p) scale *= jdf;
  MatrixT<S> eta = jd;
  for (auto& e : eta.entries()) e = scale * e;
  return eta;
}

inline Matrix control_influence(const DaeSystem& sys, const Vector& x,
                                std::size_t level, std::size_t d_prime) {
  require_finite(x, "control_influence");
  Matrix eta = control_influence_t(sys, x, level, d_prime);
  require_finite(eta, "control_influence");
  return eta;
}

namespace detail {

// L_g L_f^(k-1) x_d with x_a frozen: iterated drift fields of the
// differential subsystem, then one input-direction derivative.
//   k = 1 : g_d
//   k = 2 : (d f_d / d x_d) g_d
//   k = 3 : (d (d f_d/d x_d * f_d) / d x_d) g_d, ...
inline Matrix input_reach_matrix(const DaeSystem& sys, const Vector& x, std::size_t k) {
  if (k == 1) return sys.g_d(x);
  const Vector xa(x.begin() + sys.n_d, x.end());
  const Vector xd(x.begin(), x.begin() + sys.n_d);
  auto drift1 = [&sys, &xa](const VectorT<D1>& xd_in) {
    VectorT<D1> full(xd_in);
    for (double a : xa) full.push_back(D1(a));
    return sys.f_d(full);
  };
  if (k == 2) return jacobian_of(drift1, xd) * sys.g_d(x);
  if (k == 3) {
    // v2(x_d) = (d f_d/d x_d) f_d, then contract its Jacobian with g_d.
    auto v2 = [&sys, &xa](const VectorT<D1>& xd_in) {
      VectorT<D1> full(xd_in);
      for (double a : xa) full.push_back(D1(a));
      const VectorT<D1> fd = sys.f_d(full);
      const MatrixT<D1> dv = jacobian_of(
          [&sys, &xa](const VectorT<D2>& xdd) {
            VectorT<D2> f(xdd);
            for (double a : xa) f.push_back(D2(a));
            return sys.f_d(f);
          },
          xd_in);
      return dv * fd;
    };
    return jacobian_of(v2, xd) * sys.g_d(x);
  }
  throw Error("analyze_index: constraint-coupled relative degree exceeds 3");
}

}  // namespace detail

struct AnalyzeOptions {
  double rank_tol = 1e-10;
  double majority = 0.9;     // fraction of probes that must show coupling
  bool require_regular = true;
  std::size_t max_d_prime = 3;
};

/// Structural analysis of the DAE at a set of manifold probe points.
/// The declared index is authoritative: rank checks confirm it or raise
/// InconsistentIndex; they never reclassify.
inline IndexAnalysis analyze_index(const DaeSystem& sys, const std::vector<Vector>& probes,
                                   const AnalyzeOptions& opt = {}) {
  if (probes.empty()) throw Error("analyze_index: no probe points");
  IndexAnalysis out;
  out.nu = sys.declared_index;
  const std::size_t nm = sys.n_m();

  // J_a at the declared level must have full row rank everywhere.
  for (const Vector& x : probes) {
    auto [jd, ja] = constraint_jacobians(sys, x, out.nu);
    (void)jd;
    const std::size_t r = numeric_rank(ja, opt.rank_tol);
    out.j_a_rank = r;
    if (r < nm)
      throw InconsistentIndex("analyze_index: J_a rank-deficient at level nu; declared index " +
                              std::to_string(out.nu) + " is not confirmed");
  }

  // Constraint-coupled relative degree: smallest k with J_d^(nu) L_g L_f^(k-1) x_d
  // nonzero at a >= 90% majority of probes.
  std::size_t dp = 0;
  for (std::size_t k = 1; k <= opt.max_d_prime && dp == 0; ++k) {
    std::size_t hits = 0;
    for (const Vector& x : probes) {
      auto [jd, ja] = constraint_jacobians(sys, x, out.nu);
      (void)ja;
      const Matrix reach = detail::input_reach_matrix(sys, x, k);
      if (norm_inf(jd * reach) > opt.rank_tol) ++hits;
    }
    if (static_cast<double>(hits) >= opt.majority * static_cast<double>(probes.size()))
      dp = k;
  }
  if (dp == 0)
    throw InconsistentIndex("analyze_index: input never reaches the constraint (d' > max)");
  out.d_prime = dp;
  out.d = out.nu + out.d_prime - 1;

  // Regularity: [J_a^(nu) | eta^(nu) g_d] full row rank at every probe.
  std::vector<std::size_t> offenders;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Vector& x = probes[p];
    auto [jd, ja] = constraint_jacobians(sys, x, out.nu);
    (void)jd;
    const Matrix eta = control_influence(sys, x, out.nu, out.d_prime);
    const Matrix eg = eta * sys.g_d(x);
    Matrix ext(nm, sys.n_a + sys.n_u);
    for (std::size_t i = 0; i < nm; ++i) {
      for (std::size_t j = 0; j < sys.n_a; ++j) ext(i, j) = ja(i, j);
      for (std::size_t j = 0; j < sys.n_u; ++j) ext(i, sys.n_a + j) = eg(i, j);
    }
    if (numeric_rank(ext, opt.rank_tol) < nm) offenders.push_back(p);
  }
  out.regular = offenders.empty();
  if (!out.regular && opt.require_regular)
    throw RegularityViolated("analyze_index: extended Jacobian rank-deficient at " +
                                 std::to_string(offenders.size()) + " probe(s)",
                             offenders);
  return out;
}

/// Checks that the declared chain entries vanish at manifold points
/// (levels 0..nu-1), as required by the user-supplied-chain contract.
inline bool chain_consistent(const DaeSystem& sys, const std::vector<Vector>& probes,
                             double tol = 1e-8) {
  for (const Vector& x : probes)
    for (std::size_t k = 0; k + 1 <= sys.declared_index; ++k)
      if (norm_inf(sys.constraint_chain[k](x)) > tol) return false;
  return true;
}

}  // namespace daecbf
