#pragma once

// Projected vector fields on the constraint manifold, projection operators
// per differentiation level, and Lie-derivative / HOCBF chains along the
// projected dynamics.  Everything is generic in the scalar so the chains can
// be differentiated by nested dual seeding.

#include <cstddef>
#include <utility>
#include <vector>

#include "daecbf/dae_model.hpp"
#include "daecbf/errors.hpp"
#include "daecbf/matrix.hpp"
#include "daecbf/smooth.hpp"

namespace daecbf {

/// Candidate barrier b, safety specification h, HOCBF order and the linear
/// class-K gains kappa_i (alpha_i(r) = kappa_i * r).  alphas has exactly
/// hocbf_order entries; gain i-1 scales psi_{i-1} in psi_i, the last gain
/// scales psi_{d-1} in the filter constraint.
struct BarrierSpec {
  SmoothFn b;
  SmoothFn h;
  std::size_t hocbf_order = 1;
  std::vector<double> alphas;
};

struct ProjectionOptions {
  double rank_tol = 1e-10;
  double manifold_tol = 1e-8;
  double boundary_band = 1e-3;
};

/// Evaluator bundle for the manifold dynamics of one analyzed system.
struct ProjectedDynamics {
  DaeSystem sys;
  IndexAnalysis analysis;
  ProjectionOptions opt;

  std::size_t nu() const { return analysis.nu; }
};

/// Builds the evaluator after running the structural analysis on probes.
inline ProjectedDynamics make_projected_dynamics(DaeSystem sys,
                                                 const std::vector<Vector>& probes,
                                                 ProjectionOptions opt = {}) {
  AnalyzeOptions aopt;
  aopt.rank_tol = opt.rank_tol;
  IndexAnalysis analysis = analyze_index(sys, probes, aopt);
  return ProjectedDynamics{std::move(sys), analysis, opt};
}

// --- projection operator ----------------------------------------------------

/// P^(k)(x) = I - J_a^(k) (J_a^(k))^+ ; zero exactly when J_a^(k) has full
/// numeric row rank.
template <class S>
MatrixT<S> projection_operator_t(const ProjectedDynamics& pd, const VectorT<S>& x,
                                 std::size_t level) {
  auto [jd, ja] = constraint_jacobians_t(pd.sys, x, level);
  (void)jd;
  const MatrixT<S> pinv = pseudoinverse(ja, pd.opt.rank_tol);
  return MatrixT<S>::identity(ja.rows()) - ja * pinv;
}

inline Matrix projection_operator(const ProjectedDynamics& pd, const Vector& x,
                                  std::size_t level) {
  if (level < 1 || level > pd.nu())
    throw Error("projection_operator: level out of range");
  require_finite(x, "projection_operator");
  Matrix p = projection_operator_t(pd, x, level);
  require_finite(p, "projection_operator");
  return p;
}

// --- projected vector fields -------------------------------------------------

template <class S>
VectorT<S> fhat_t(const ProjectedDynamics& pd, const VectorT<S>& x) {
  auto [jd, ja] = constraint_jacobians_t(pd.sys, x, pd.nu());
  const MatrixT<S> ja_pinv = pseudoinverse(ja, pd.opt.rank_tol);
  const VectorT<S> fd = pd.sys.f_d(x);
  const VectorT<S> xa_dot = ja_pinv * (jd * fd);
  VectorT<S> out(fd);
  out.reserve(pd.sys.n_x());
  for (const S& v : xa_dot) out.push_back(-v);
  return out;
}

template <class S>
MatrixT<S> ghat_t(const ProjectedDynamics& pd, const VectorT<S>& x) {
  auto [jd, ja] = constraint_jacobians_t(pd.sys, x, pd.nu());
  const MatrixT<S> ja_pinv = pseudoinverse(ja, pd.opt.rank_tol);
  const MatrixT<S> gd = pd.sys.g_d(x);
  const MatrixT<S> tail = ja_pinv * (jd * gd);
  MatrixT<S> out(pd.sys.n_x(), pd.sys.n_u);
  for (std::size_t i = 0; i < pd.sys.n_d; ++i)
    for (std::size_t j = 0; j < pd.sys.n_u; ++j) out(i, j) = gd(i, j);
  for (std::size_t i = 0; i < pd.sys.n_a; ++i)
    for (std::size_t j = 0; j < pd.sys.n_u; ++j) out(pd.sys.n_d + i, j) = -tail(i, j);
  return out;
}

inline void require_on_manifold(const ProjectedDynamics& pd, const Vector& x,
                                const char* who) {
  const double res = norm_inf(pd.sys.phi(x));
  if (res > pd.opt.manifold_tol)
    throw OffManifold(std::string(who) + ": ||phi(x)||_inf = " + std::to_string(res));
}

/// (f_hat, g_hat) at a manifold point.
inline std::pair<Vector, Matrix> projected_fields(const ProjectedDynamics& pd,
                                                  const Vector& x) {
  require_finite(x, "projected_fields");
  require_on_manifold(pd, x, "projected_fields");
  Vector f = fhat_t(pd, x);
  Matrix g = ghat_t(pd, x);
  if (!all_finite(f) || !all_finite(g))
    throw RegularityViolated("projected_fields: projected dynamics not finite at x");
  return {std::move(f), std::move(g)};
}

// --- Lie derivative chains ---------------------------------------------------

namespace detail {

// L_fhat^k psi at x, generic scalar.  Each recursion step lifts the scalar
// one dual level to take the gradient of the previous iterate.
template <class S, class Psi>
S lie_f_iterate(const ProjectedDynamics& pd, const Psi& psi, const VectorT<S>& x,
                std::size_t k) {
  if (k == 0) return psi(x);
  if constexpr (std::is_same_v<S, D4>) {
    throw Error("lie_chain: dual nesting depth exhausted (order too high)");
    return S(0.0);  // unreachable
  } else {
    const VectorT<S> grad = gradient_of(
        [&](const VectorT<Dual<S>>& xd) { return lie_f_iterate(pd, psi, xd, k - 1); }, x);
    const VectorT<S> f = fhat_t(pd, x);
    return dot(grad, f);
  }
}

// Row vector L_ghat (L_fhat^(k-1) psi) at x.
template <class S, class Psi>
VectorT<S> lie_g_row(const ProjectedDynamics& pd, const Psi& psi, const VectorT<S>& x,
                     std::size_t k) {
  if constexpr (std::is_same_v<S, D4>) {
    throw Error("lie_chain: dual nesting depth exhausted (order too high)");
    return {};
  } else {
    const VectorT<S> grad = gradient_of(
        [&](const VectorT<Dual<S>>& xd) { return lie_f_iterate(pd, psi, xd, k - 1); }, x);
    const MatrixT<S> g = ghat_t(pd, x);
    VectorT<S> row(pd.sys.n_u, S(0.0));
    for (std::size_t j = 0; j < pd.sys.n_u; ++j)
      for (std::size_t i = 0; i < grad.size(); ++i) row[j] += grad[i] * g(i, j);
    return row;
  }
}

}  // namespace detail

/// (L_fhat^k psi, L_ghat L_fhat^(k-1) psi) at x.
inline std::pair<double, Vector> lie_chain(const ProjectedDynamics& pd, const SmoothFn& psi,
                                           const Vector& x, std::size_t order) {
  if (order < 1) throw Error("lie_chain: order must be >= 1");
  auto scalar_psi = [&psi](const auto& xs) { return psi(xs)[0]; };
  const double lf = detail::lie_f_iterate(pd, scalar_psi, x, order);
  const Vector lg = detail::lie_g_row(pd, scalar_psi, x, order);
  if (!std::isfinite(lf) || !all_finite(lg)) throw NonFinite("lie_chain: non-finite result");
  return {lf, lg};
}

// --- HOCBF hierarchy ---------------------------------------------------------

struct HocbfTerms {
  Vector psi_values;  // psi_0 .. psi_{d-1} at x
  Vector a_row;       // L_ghat psi_{d-1}
  double lf_term;     // L_fhat psi_{d-1}
  double alpha_term;  // kappa_{d-1} * psi_{d-1}
  double c_const;     // lf_term + alpha_term; filter row is a_row * u + c_const >= 0
};

namespace detail {

// psi_i along the hierarchy psi_0 = b, psi_i = L_fhat psi_{i-1} + kappa * psi_{i-1}.
template <class S>
S hocbf_psi(const ProjectedDynamics& pd, const BarrierSpec& spec, const VectorT<S>& x,
            std::size_t i) {
  if (i == 0) return spec.b(x)[0];
  if constexpr (std::is_same_v<S, D4>) {
    throw Error("hocbf_terms: dual nesting depth exhausted (order too high)");
    return S(0.0);  // unreachable
  } else {
    const S prev = hocbf_psi(pd, spec, x, i - 1);
    const VectorT<S> grad = gradient_of(
        [&](const VectorT<Dual<S>>& xd) { return hocbf_psi(pd, spec, xd, i - 1); }, x);
    const VectorT<S> f = fhat_t(pd, x);
    return dot(grad, f) + spec.alphas[i - 1] * prev;
  }
}

}  // namespace detail

/// Evaluates the HOCBF hierarchy at x and returns the filter constraint
/// pieces so that a_row * u + c_const >= 0 enforces the top-level condition.
inline HocbfTerms hocbf_terms(const ProjectedDynamics& pd, const BarrierSpec& spec,
                              const Vector& x) {
  const std::size_t d = spec.hocbf_order;
  if (d < 1 || spec.alphas.size() != d)
    throw Error("hocbf_terms: need hocbf_order >= 1 and one gain per level");
  HocbfTerms out;
  out.psi_values.resize(d);
  for (std::size_t i = 0; i < d; ++i)
    out.psi_values[i] = detail::hocbf_psi(pd, spec, x, i);

  const Vector grad = gradient_of(
      [&](const VectorT<D1>& xd) { return detail::hocbf_psi(pd, spec, xd, d - 1); }, x);
  const Vector f = fhat_t(pd, x);
  const Matrix g = ghat_t(pd, x);
  out.lf_term = dot(grad, f);
  out.a_row.assign(pd.sys.n_u, 0.0);
  for (std::size_t j = 0; j < pd.sys.n_u; ++j)
    for (std::size_t i = 0; i < grad.size(); ++i) out.a_row[j] += grad[i] * g(i, j);
  out.alpha_term = spec.alphas[d - 1] * out.psi_values[d - 1];
  out.c_const = out.lf_term + out.alpha_term;

  if (!std::isfinite(out.c_const) || !all_finite(out.a_row))
    throw NonFinite("hocbf_terms: non-finite result");
  // A vanishing input row on the barrier boundary means the declared order
  // does not match the true relative degree at x.
  if (std::abs(out.psi_values[0]) <= pd.opt.boundary_band &&
      norm_inf(out.a_row) < pd.opt.rank_tol)
    throw DegenerateRow("hocbf_terms: input row vanished at a boundary point");
  return out;
}

}  // namespace daecbf
