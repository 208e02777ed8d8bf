#pragma once

// Dense primal active-set QP used by the safety filter:
//   min 1/2 u^T H u + c^T u   s.t.  E u = e,  A u <= r.
// Deterministic: ties in the blocking-constraint and multiplier tests always
// resolve toward the lowest row index, and the feasible starting point comes
// from the phase-1 simplex in lp.hpp.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "daecbf/errors.hpp"
#include "daecbf/lp.hpp"
#include "daecbf/matrix.hpp"
#include "daecbf/projection.hpp"

namespace daecbf {

struct QpProblem {
  Matrix hessian;  // n_u x n_u, symmetric positive definite
  Vector linear;   // n_u
  Matrix eq_a;     // equality rows E
  Vector eq_r;
  Matrix ineq_a;   // inequality rows A (A u <= r)
  Vector ineq_r;
};

enum class FilterStatus { Feasible, Infeasible };

struct FilterResult {
  FilterStatus status = FilterStatus::Infeasible;
  Vector u;
  std::vector<std::size_t> active_set;  // indices into the inequality rows
  double objective = 0.0;
  std::optional<FarkasCertificate> certificate;
};

namespace detail {

// Solves the equality-constrained subproblem
//   min 1/2 p^T H p + g^T p   s.t.  G p = 0
// via the KKT system; the pseudoinverse tolerates redundant rows in G.
inline void kkt_step(const Matrix& h, const Vector& g, const Matrix& gmat,
                     Vector& p, Vector& mu) {
  const std::size_t n = h.rows(), k = gmat.rows();
  Matrix kkt(n + k, n + k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) kkt(i, j) = h(i, j);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      kkt(n + i, j) = gmat(i, j);
      kkt(j, n + i) = gmat(i, j);
    }
  Vector rhs(n + k, 0.0);
  for (std::size_t j = 0; j < n; ++j) rhs[j] = -g[j];
  const Matrix pinv = pseudoinverse_checked(kkt, 1e-12);
  const Vector sol = pinv * rhs;
  p.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n));
  mu.assign(sol.begin() + static_cast<std::ptrdiff_t>(n), sol.end());
}

}  // namespace detail

inline FilterResult solve_qp(const QpProblem& qp) {
  const std::size_t n = qp.hessian.rows();
  const std::size_t me = qp.eq_a.rows(), mi = qp.ineq_a.rows();
  require_finite(qp.hessian, "solve_qp");
  require_finite(qp.linear, "solve_qp");

  FilterResult out;

  // Feasibility (and a starting point) from phase-1 on [A; E; -E].
  Matrix big(mi + 2 * me, n);
  Vector bigr(mi + 2 * me, 0.0);
  for (std::size_t i = 0; i < mi; ++i) {
    for (std::size_t j = 0; j < n; ++j) big(i, j) = qp.ineq_a(i, j);
    bigr[i] = qp.ineq_r[i];
  }
  for (std::size_t i = 0; i < me; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      big(mi + i, j) = qp.eq_a(i, j);
      big(mi + me + i, j) = -qp.eq_a(i, j);
    }
    bigr[mi + i] = qp.eq_r[i];
    bigr[mi + me + i] = -qp.eq_r[i];
  }
  LpFeasibility feas = lp_feasible(big, bigr);
  if (!feas.feasible) {
    out.status = FilterStatus::Infeasible;
    out.certificate = feas.certificate;
    return out;
  }

  Vector u = feas.witness;
  const double tol = 1e-9;

  // The working set starts empty; blocking rows are added one at a time,
  // which keeps the stacked constraint matrix full row rank throughout.
  std::vector<bool> active(mi, false);

  const std::size_t cap = 100 * (n + me + mi + 1);
  std::size_t it = 0;
  for (;; ++it) {
    if (it >= cap) throw MaxIterations("solve_qp: active-set iteration cap hit");

    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < mi; ++i)
      if (active[i]) work.push_back(i);

    Matrix gmat(me + work.size(), n);
    for (std::size_t i = 0; i < me; ++i)
      for (std::size_t j = 0; j < n; ++j) gmat(i, j) = qp.eq_a(i, j);
    for (std::size_t i = 0; i < work.size(); ++i)
      for (std::size_t j = 0; j < n; ++j) gmat(me + i, j) = qp.ineq_a(work[i], j);

    Vector grad = qp.hessian * u;
    for (std::size_t j = 0; j < n; ++j) grad[j] += qp.linear[j];

    Vector p, mu;
    detail::kkt_step(qp.hessian, grad, gmat, p, mu);

    if (norm_inf(p) <= tol) {
      // Multipliers on working inequalities must be >= 0 at the optimum;
      // drop the lowest-index offender (Bland-style, prevents cycling).
      std::size_t drop = mi;
      for (std::size_t i = 0; i < work.size(); ++i) {
        const double m = mu[me + i];  // stationarity: grad + G^T mu = 0
        if (m < -tol) {
          drop = work[i];
          break;
        }
      }
      if (drop == mi) break;  // KKT satisfied
      active[drop] = false;
      continue;
    }

    // Largest step along p that stays feasible.
    double alpha = 1.0;
    std::size_t blocking = mi;
    for (std::size_t i = 0; i < mi; ++i) {
      if (active[i]) continue;
      double ap = 0.0, au = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        ap += qp.ineq_a(i, j) * p[j];
        au += qp.ineq_a(i, j) * u[j];
      }
      if (ap > tol) {
        const double step = (qp.ineq_r[i] - au) / ap;
        if (step < alpha - 1e-14) {
          alpha = step;
          blocking = i;
        }
      }
    }
    if (alpha < 0.0) alpha = 0.0;
    for (std::size_t j = 0; j < n; ++j) u[j] += alpha * p[j];
    if (blocking != mi) active[blocking] = true;
    if (blocking == mi && alpha >= 1.0) {
      // Full step with no blocking row: p was the unconstrained-in-working-set
      // minimizer, so the next pass exits through the multiplier test.
      continue;
    }
  }

  out.status = FilterStatus::Feasible;
  out.u = u;
  for (std::size_t i = 0; i < mi; ++i)
    if (active[i]) out.active_set.push_back(i);
  double obj = 0.0;
  const Vector hu = qp.hessian * u;
  for (std::size_t j = 0; j < n; ++j) obj += 0.5 * u[j] * hu[j] + qp.linear[j] * u[j];
  out.objective = obj;
  require_finite(out.u, "solve_qp");
  return out;
}

/// Equality rows enforcing that the filtered input keeps every hidden
/// constraint level satisfied: lhs_k u = rhs_k for k = 1..nu.
struct CompatibilityRows {
  Matrix lhs;  // rows x n_u
  Vector rhs;
};

inline CompatibilityRows assemble_compatibility(const ProjectedDynamics& pd,
                                                const Vector& x) {
  const DaeSystem& sys = pd.sys;
  const Vector fd = sys.f_d(x);
  const Matrix gd = sys.g_d(x);
  std::vector<Vector> lhs_rows;
  std::vector<double> rhs_vals;
  for (std::size_t k = 1; k <= pd.nu(); ++k) {
    const Matrix p = projection_operator(pd, x, k);
    const Matrix jd = constraint_jacobians(sys, x, k).first;
    const Matrix eta = control_influence(sys, x, k, pd.analysis.d_prime);
    const Matrix lhs_k = p * (eta * gd);
    const Vector rhs_k = p * (jd * fd);
    for (std::size_t i = 0; i < lhs_k.rows(); ++i) {
      double mx = 0.0;
      for (std::size_t j = 0; j < lhs_k.cols(); ++j)
        mx = std::max(mx, std::abs(lhs_k(i, j)));
      const double rv = -rhs_k[i];
      if (mx <= 1e-10) {
        if (std::abs(rv) <= 1e-10) continue;  // trivially satisfied row
        throw StructuralInfeasibility(
            "assemble_compatibility: no input can cancel a hidden drift term "
            "(level " + std::to_string(k) + ", row " + std::to_string(i) + ")");
      }
      Vector row(lhs_k.cols());
      for (std::size_t j = 0; j < lhs_k.cols(); ++j) row[j] = lhs_k(i, j);
      lhs_rows.push_back(std::move(row));
      rhs_vals.push_back(rv);
    }
  }
  CompatibilityRows out;
  out.lhs = Matrix(lhs_rows.size(), sys.n_u);
  out.rhs.assign(rhs_vals.begin(), rhs_vals.end());
  for (std::size_t i = 0; i < lhs_rows.size(); ++i)
    for (std::size_t j = 0; j < sys.n_u; ++j) out.lhs(i, j) = lhs_rows[i][j];
  return out;
}

/// Builds the safety-filter QP at a safe on-manifold state:
/// stay close to u_nom, subject to the barrier row, the hidden-constraint
/// equalities, and the input polytope.
inline QpProblem assemble_filter_qp(const ProjectedDynamics& pd,
                                    const BarrierSpec& spec, const Vector& x,
                                    const Vector& u_nom) {
  const DaeSystem& sys = pd.sys;
  require_on_manifold(pd, x, "assemble_filter_qp");
  const HocbfTerms terms = hocbf_terms(pd, spec, x);
  if (terms.psi_values[0] < -1e-9)
    throw Error("assemble_filter_qp: state is already unsafe (b(x) < 0)");

  QpProblem qp;
  qp.hessian = Matrix::identity(sys.n_u);
  qp.linear.assign(sys.n_u, 0.0);
  for (std::size_t j = 0; j < sys.n_u; ++j) qp.linear[j] = -u_nom[j];

  const CompatibilityRows comp = assemble_compatibility(pd, x);
  qp.eq_a = comp.lhs;
  qp.eq_r = comp.rhs;

  const std::size_t mu = sys.input_polytope.rows();
  qp.ineq_a = Matrix(mu + 1, sys.n_u);
  qp.ineq_r.assign(mu + 1, 0.0);
  // Barrier row a_row u + c_const >= 0, i.e. -a_row u <= c_const.
  for (std::size_t j = 0; j < sys.n_u; ++j) qp.ineq_a(0, j) = -terms.a_row[j];
  qp.ineq_r[0] = terms.c_const;
  for (std::size_t i = 0; i < mu; ++i) {
    for (std::size_t j = 0; j < sys.n_u; ++j)
      qp.ineq_a(1 + i, j) = sys.input_polytope.a_u(i, j);
    qp.ineq_r[1 + i] = sys.input_polytope.r_u[i];
  }
  return qp;
}

/// Baseline filter that ignores the algebraic coupling entirely: the barrier
/// row differentiates b along the differential states only and no
/// hidden-constraint equalities are imposed.
inline QpProblem dae_unaware_filter(const DaeSystem& sys, const BarrierSpec& spec,
                                    const Vector& x, const Vector& u_nom) {
  const Vector fd = sys.f_d(x);
  const Matrix gd = sys.g_d(x);
  // Gradient of b with respect to x_d, holding x_a fixed.
  Vector grad_d(sys.n_d, 0.0);
  {
    VectorT<D1> xad(sys.n_x());
    for (std::size_t i = 0; i < sys.n_x(); ++i) xad[i] = D1(x[i]);
    for (std::size_t i = 0; i < sys.n_d; ++i) xad[i] = D1::seed(x[i], sys.n_d, i);
    const VectorT<D1> bv = spec.b(xad);
    for (std::size_t i = 0; i < sys.n_d; ++i)
      grad_d[i] = detail::tangent_at(bv[0].d, i);
  }
  const double b0 = spec.b(x)[0];
  double lf = 0.0;
  for (std::size_t i = 0; i < sys.n_d; ++i) lf += grad_d[i] * fd[i];
  Vector a_row(sys.n_u, 0.0);
  for (std::size_t j = 0; j < sys.n_u; ++j)
    for (std::size_t i = 0; i < sys.n_d; ++i) a_row[j] += grad_d[i] * gd(i, j);

  QpProblem qp;
  qp.hessian = Matrix::identity(sys.n_u);
  qp.linear.assign(sys.n_u, 0.0);
  for (std::size_t j = 0; j < sys.n_u; ++j) qp.linear[j] = -u_nom[j];
  qp.eq_a = Matrix(0, sys.n_u);
  qp.eq_r.clear();
  const std::size_t mu = sys.input_polytope.rows();
  qp.ineq_a = Matrix(mu + 1, sys.n_u);
  qp.ineq_r.assign(mu + 1, 0.0);
  for (std::size_t j = 0; j < sys.n_u; ++j) qp.ineq_a(0, j) = -a_row[j];
  qp.ineq_r[0] = lf + spec.alphas.front() * b0;
  for (std::size_t i = 0; i < mu; ++i) {
    for (std::size_t j = 0; j < sys.n_u; ++j)
      qp.ineq_a(1 + i, j) = sys.input_polytope.a_u(i, j);
    qp.ineq_r[1 + i] = sys.input_polytope.r_u[i];
  }
  return qp;
}

}  // namespace daecbf
