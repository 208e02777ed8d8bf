#pragma once

// Verification layer: assembles the per-point feasibility stacks (hidden
// constraints, barrier / tangency row, input polytope), decides them with the
// phase-1 simplex, and runs the two global checks:
//   - correctness: every manifold state approved by the barrier (b >= 0) also
//     satisfies the safety specification (h >= 0), decided by a multi-start
//     projected descent on h cross-checked against a dense grid oracle;
//   - feasibility: the stack is solvable at sampled interior / boundary
//     states, with a Farkas certificate returned at any counterexample.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstddef>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "daecbf/errors.hpp"
#include "daecbf/lp.hpp"
#include "daecbf/matrix.hpp"
#include "daecbf/projection.hpp"
#include "daecbf/qp.hpp"
#include "daecbf/simulator.hpp"
#include "daecbf/sobol.hpp"

namespace daecbf {

// --- feasibility stacks -------------------------------------------------------

enum class StackKind { Full, Interior, Boundary };

inline const char* to_string(StackKind k) {
  switch (k) {
    case StackKind::Full: return "full";
    case StackKind::Interior: return "interior";
    case StackKind::Boundary: return "boundary";
  }
  return "?";
}

/// Linear system A u <= r whose solvability at a state x is the pointwise
/// feasibility question.  Full carries the hidden-constraint equalities (as
/// inequality pairs), the barrier row and the input polytope; Interior drops
/// the barrier row (only the hidden constraints and actuator limits bind away
/// from the boundary); Boundary replaces the barrier row by the tangency row
/// (no class-K slack: the flow must not point out of the safe set).
struct FeasibilityStack {
  Matrix a_mat;
  Vector r_vec;
  StackKind kind = StackKind::Full;
};

inline FeasibilityStack assemble_stack(const ProjectedDynamics& pd,
                                       const BarrierSpec& spec, const Vector& x,
                                       StackKind kind) {
  const DaeSystem& sys = pd.sys;
  require_finite(x, "assemble_stack");
  require_on_manifold(pd, x, "assemble_stack");

  std::vector<Vector> rows;
  std::vector<double> rhs;
  const auto push = [&](const Vector& row, double r) {
    rows.push_back(row);
    rhs.push_back(r);
  };

  // Hidden-constraint equalities lhs u = rhs, written as two inequalities so
  // the whole stack is one A u <= r system.
  const CompatibilityRows comp = assemble_compatibility(pd, x);
  for (std::size_t i = 0; i < comp.lhs.rows(); ++i) {
    Vector plus(sys.n_u), minus(sys.n_u);
    for (std::size_t j = 0; j < sys.n_u; ++j) {
      plus[j] = comp.lhs(i, j);
      minus[j] = -comp.lhs(i, j);
    }
    push(plus, comp.rhs[i]);
    push(minus, -comp.rhs[i]);
  }

  if (kind != StackKind::Interior) {
    const HocbfTerms terms = hocbf_terms(pd, spec, x);
    if (kind == StackKind::Boundary &&
        std::abs(terms.psi_values[0]) > pd.opt.boundary_band)
      throw Error("assemble_stack: boundary stack requested away from the barrier "
                  "boundary (|b(x)| = " + std::to_string(std::abs(terms.psi_values[0])) + ")");
    Vector row(sys.n_u);
    for (std::size_t j = 0; j < sys.n_u; ++j) row[j] = -terms.a_row[j];
    // Full keeps the class-K relaxation; the tangency row drops it.
    push(row, kind == StackKind::Full ? terms.c_const : terms.lf_term);
  }

  for (std::size_t i = 0; i < sys.input_polytope.rows(); ++i) {
    Vector row(sys.n_u);
    for (std::size_t j = 0; j < sys.n_u; ++j) row[j] = sys.input_polytope.a_u(i, j);
    push(row, sys.input_polytope.r_u[i]);
  }

  FeasibilityStack st;
  st.kind = kind;
  st.a_mat = Matrix(rows.size(), sys.n_u);
  st.r_vec.assign(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < sys.n_u; ++j) st.a_mat(i, j) = rows[i][j];
  return st;
}

inline LpFeasibility lp_feasible(const FeasibilityStack& st) {
  return lp_feasible(st.a_mat, st.r_vec);
}

// --- reports ------------------------------------------------------------------

enum class Verdict { Certified, Violated };

inline const char* to_string(Verdict v) {
  return v == Verdict::Certified ? "Certified" : "Violated";
}

struct CorrectnessReport {
  Verdict verdict = Verdict::Certified;
  double search_min = 0.0;  // best h found by the multi-start descent
  double grid_min = 0.0;    // best h found by the dense grid oracle
  Vector witness;           // minimizer; a counterexample when Violated
  std::size_t samples = 0;  // states actually evaluated (grid + descent starts)
  double wall_time_s = 0.0;
};

struct FeasibilityReport {
  Verdict verdict = Verdict::Certified;
  StackKind kind = StackKind::Interior;
  Vector witness;            // worst sample; a counterexample when Violated
  double worst_margin = 0.0; // phase-1 objective at the worst sample (0 = feasible)
  std::optional<FarkasCertificate> certificate;  // present when Violated
  std::size_t samples = 0;
  double wall_time_s = 0.0;
};

struct VerificationReport {
  CorrectnessReport correctness;
  FeasibilityReport interior;
  FeasibilityReport boundary;
};

struct VerifyOptions {
  std::size_t samples = 4096;        // feasibility samples per stack kind
  std::size_t starts = 64;           // descent starts for the correctness search
  std::size_t grid_per_dim = 50;     // grid oracle resolution per differential state
  std::size_t max_grid_points = 200000;  // cap on the total oracle grid size
  double tol = 1e-6;                 // violation threshold on h
  double oracle_slack = 1e-3;        // allowed search/grid gap on sign disagreement
  std::size_t threads = 1;
  std::size_t sobol_skip = 0;
};

// --- internal helpers ----------------------------------------------------------

namespace detail {

inline double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline bool in_box(const Vector& x, const Vector& lo, const Vector& hi, double tol) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
  return true;
}

/// Solves the algebraic states from a differential guess; empty on failure.
inline std::optional<Vector> try_consistent(const DaeSystem& sys, const Vector& xd,
                                            const Vector& xa_guess) {
  try {
    return consistent_init(sys, xd, xa_guess);
  } catch (const NoConvergence&) {
    return std::nullopt;
  }
}

/// Gradient of a scalar field along the manifold with the algebraic states
/// eliminated: d/dx_d s(x_d, x_a(x_d)) with dx_a/dx_d = -J_a^+ J_d.
inline Vector manifold_gradient(const DaeSystem& sys, const ProjectedDynamics& pd,
                                const SmoothFn& s, const Vector& x) {
  const Vector grad = gradient_of(
      [&](const VectorT<D1>& xs) { return s(xs)[0]; }, x);
  auto [jd, ja] = constraint_jacobians(sys, x, 1);
  const Matrix sens = pseudoinverse(ja, pd.opt.rank_tol) * jd;  // n_a x n_d
  Vector out(sys.n_d);
  for (std::size_t j = 0; j < sys.n_d; ++j) {
    double v = grad[j];
    for (std::size_t i = 0; i < sys.n_a; ++i) v -= sens(i, j) * grad[sys.n_d + i];
    out[j] = v;
  }
  return out;
}

/// Gauss-Newton projection of x onto {phi = 0, b = 0}.  Returns the projected
/// point when it converges inside the tolerance, nothing otherwise.
inline std::optional<Vector> project_to_barrier_boundary(const ProjectedDynamics& pd,
                                                         const BarrierSpec& spec,
                                                         Vector x) {
  const DaeSystem& sys = pd.sys;
  const std::size_t n = sys.n_x();
  for (int it = 0; it < 60; ++it) {
    const Vector phiv = sys.phi(x);
    const double bv = spec.b(x)[0];
    double rn = std::abs(bv);
    for (double p : phiv) rn = std::max(rn, std::abs(p));
    if (rn <= 1e-11) return x;

    Matrix jac(phiv.size() + 1, n);
    Vector res(phiv.size() + 1);
    for (std::size_t r = 0; r < phiv.size(); ++r) res[r] = phiv[r];
    res[phiv.size()] = bv;
    for (std::size_t c = 0; c < n; ++c) {
      VectorT<D1> xs(n);
      for (std::size_t i = 0; i < n; ++i)
        xs[i] = (i == c) ? D1::seed(x[i], 1, 0) : D1(x[i]);
      const VectorT<D1> pv = sys.phi(xs);
      for (std::size_t r = 0; r < phiv.size(); ++r)
        jac(r, c) = tangent_at(pv[r].d, 0);
      jac(phiv.size(), c) = tangent_at(spec.b(xs)[0].d, 0);
    }
    const Vector step = pseudoinverse(jac, pd.opt.rank_tol) * res;
    double sn = norm_inf(step);
    if (!all_finite(step)) return std::nullopt;
    // Damp very large steps so the iteration cannot jump between branches.
    const double scale = sn > 1.0 ? 1.0 / sn : 1.0;
    for (std::size_t i = 0; i < n; ++i) x[i] -= scale * step[i];
    if (!all_finite(x)) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

// --- correctness ----------------------------------------------------------------

/// Decides the containment {b >= 0} ∩ M ⊆ {h >= 0} ∩ M inside [lo, hi] by
/// minimizing h over the approved region: a Sobol-seeded multi-start projected
/// descent cross-checked against a dense grid.  Throws OracleDisagreement when
/// the two disagree on the sign beyond the configured slack.
inline CorrectnessReport verify_correctness(const ProjectedDynamics& pd,
                                            const BarrierSpec& spec,
                                            const Vector& lo, const Vector& hi,
                                            const VerifyOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const DaeSystem& sys = pd.sys;
  const std::size_t nd = sys.n_d, na = sys.n_a;
  if (lo.size() != sys.n_x() || hi.size() != sys.n_x())
    throw Error("verify_correctness: box must cover the full state");

  const Vector lo_d(lo.begin(), lo.begin() + static_cast<std::ptrdiff_t>(nd));
  const Vector hi_d(hi.begin(), hi.begin() + static_cast<std::ptrdiff_t>(nd));
  Vector xa_mid(na);
  for (std::size_t i = 0; i < na; ++i) xa_mid[i] = 0.5 * (lo[nd + i] + hi[nd + i]);

  CorrectnessReport rep;
  double best = std::numeric_limits<double>::infinity();
  Vector best_x;
  std::size_t evaluated = 0;

  const auto consider = [&](const Vector& x, double& slot) {
    if (!detail::in_box(x, lo, hi, 1e-9)) return;
    if (spec.b(x)[0] < 0.0) return;
    const double hv = spec.h(x)[0];
    ++evaluated;
    if (hv < slot) slot = hv;
    if (hv < best) {
      best = hv;
      best_x = x;
    }
  };

  // Dense grid oracle over the differential states; the algebraic states are
  // re-solved at every node (warm-started along the sweep).
  double grid_min = std::numeric_limits<double>::infinity();
  {
    std::size_t per = opt.grid_per_dim;
    while (per > 2 && std::pow(static_cast<double>(per), static_cast<double>(nd)) >
                          static_cast<double>(opt.max_grid_points))
      --per;
    std::vector<std::size_t> idx(nd, 0);
    Vector xa_warm = xa_mid;
    bool done = false;
    while (!done) {
      Vector xd(nd);
      for (std::size_t i = 0; i < nd; ++i)
        xd[i] = lo_d[i] + (hi_d[i] - lo_d[i]) * static_cast<double>(idx[i]) /
                              static_cast<double>(per - 1);
      auto x = detail::try_consistent(sys, xd, xa_warm);
      if (!x) x = detail::try_consistent(sys, xd, xa_mid);
      if (x) {
        for (std::size_t i = 0; i < na; ++i) xa_warm[i] = (*x)[nd + i];
        consider(*x, grid_min);
      }
      for (std::size_t i = 0;; ++i) {
        if (i == nd) {
          done = true;
          break;
        }
        if (++idx[i] < per) break;
        idx[i] = 0;
      }
    }
  }

  // Multi-start projected descent on h with the algebraic states eliminated;
  // steps that leave the box, the approved region, or the manifold solver's
  // basin are rejected by halving the step.
  double search_min = std::numeric_limits<double>::infinity();
  {
    SobolSequence seq(sys.n_x());
    seq.skip(opt.sobol_skip);
    for (std::size_t s = 0; s < opt.starts; ++s) {
      const Vector p = scale_to_box(seq.next(), lo, hi);
      const Vector xd0(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(nd));
      const Vector xa0(p.begin() + static_cast<std::ptrdiff_t>(nd), p.end());
      auto cur = detail::try_consistent(sys, xd0, xa0);
      if (!cur || !detail::in_box(*cur, lo, hi, 1e-9) || spec.b(*cur)[0] < 0.0)
        continue;
      consider(*cur, search_min);

      double eta = 0.1;
      for (int it = 0; it < 150 && eta > 1e-12; ++it) {
        const Vector grad = detail::manifold_gradient(sys, pd, spec.h, *cur);
        const double gn = norm_inf(grad);
        if (gn < 1e-14) break;
        Vector xd(nd);
        for (std::size_t i = 0; i < nd; ++i) {
          xd[i] = (*cur)[i] - eta * grad[i] / gn;
          xd[i] = std::min(hi_d[i], std::max(lo_d[i], xd[i]));
        }
        Vector xa_warm((*cur).begin() + static_cast<std::ptrdiff_t>(nd), (*cur).end());
        auto nxt = detail::try_consistent(sys, xd, xa_warm);
        if (nxt && detail::in_box(*nxt, lo, hi, 1e-9) && spec.b(*nxt)[0] >= 0.0 &&
            spec.h(*nxt)[0] < spec.h(*cur)[0]) {
          cur = nxt;
          consider(*cur, search_min);
          eta = std::min(1.0, eta * 1.5);
        } else {
          eta *= 0.5;
        }
      }
    }
  }

  const bool grid_bad = grid_min < -opt.tol;
  const bool search_bad = search_min < -opt.tol;
  if (grid_bad != search_bad &&
      std::abs(grid_min - search_min) > opt.oracle_slack)
    throw OracleDisagreement(
        "verify_correctness: grid oracle min " + std::to_string(grid_min) +
        " vs search min " + std::to_string(search_min));

  rep.grid_min = grid_min;
  rep.search_min = search_min;
  rep.witness = best_x;
  rep.samples = evaluated;
  rep.verdict = (grid_bad || search_bad) ? Verdict::Violated : Verdict::Certified;
  rep.wall_time_s = detail::elapsed_s(t0);
  if (rep.verdict == Verdict::Violated) {
    // A counterexample must genuinely sit in the approved region.
    if (best_x.empty() || spec.b(best_x)[0] < -opt.tol || spec.h(best_x)[0] >= 0.0 ||
        norm_inf(sys.phi(best_x)) > opt.tol)
      throw Error("verify_correctness: violation reported without a valid witness");
  }
  return rep;
}

// --- pointwise feasibility --------------------------------------------------------

/// Decides whether the stack of the requested kind is solvable at sampled
/// manifold states inside [lo, hi]: interior samples keep b > 0, boundary
/// samples are projected onto {phi = 0, b = 0}.  The worst sample is refined
/// by a short ascent on the phase-1 objective before the verdict is issued;
/// any infeasible point ships a re-checked Farkas certificate.
inline FeasibilityReport verify_feasibility(const ProjectedDynamics& pd,
                                            const BarrierSpec& spec,
                                            const Vector& lo, const Vector& hi,
                                            StackKind kind,
                                            const VerifyOptions& opt = {}) {
  if (kind == StackKind::Full)
    throw Error("verify_feasibility: sample either the interior or the boundary");
  const auto t0 = std::chrono::steady_clock::now();
  const DaeSystem& sys = pd.sys;
  const std::size_t nd = sys.n_d;

  // Sample generation is serial (the Sobol stream is sequential), so the
  // sample set is independent of the thread count.
  std::vector<Vector> pts;
  pts.reserve(opt.samples);
  {
    SobolSequence seq(sys.n_x());
    seq.skip(opt.sobol_skip);
    const std::size_t max_draws = 64 * std::max<std::size_t>(opt.samples, 1);
    for (std::size_t draw = 0; draw < max_draws && pts.size() < opt.samples; ++draw) {
      const Vector p = scale_to_box(seq.next(), lo, hi);
      const Vector xd(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(nd));
      const Vector xa(p.begin() + static_cast<std::ptrdiff_t>(nd), p.end());
      auto x = detail::try_consistent(sys, xd, xa);
      if (!x || !detail::in_box(*x, lo, hi, 1e-9)) continue;
      if (kind == StackKind::Interior) {
        if (spec.b(*x)[0] <= 0.0) continue;
        pts.push_back(std::move(*x));
      } else {
        auto bx = detail::project_to_barrier_boundary(pd, spec, *x);
        if (!bx || !detail::in_box(*bx, lo, hi, 1e-9)) continue;
        if (norm_inf(sys.phi(*bx)) > pd.opt.manifold_tol) continue;
        if (std::abs(spec.b(*bx)[0]) > pd.opt.boundary_band) continue;
        pts.push_back(std::move(*bx));
      }
    }
  }
  if (pts.empty())
    throw NoBoundarySamples("verify_feasibility: no " + std::string(to_string(kind)) +
                            " samples found inside the box");

  const auto margin_at = [&](const Vector& x) -> double {
    return lp_feasible(assemble_stack(pd, spec, x, kind)).phase1_value;
  };

  // Per-sample margins; the reduction below is ordered, so the result does
  // not depend on the thread count.
  std::vector<double> margins(pts.size(), 0.0);
  {
    const std::size_t nthreads =
        std::max<std::size_t>(1, std::min(opt.threads, pts.size()));
    if (nthreads == 1) {
      for (std::size_t i = 0; i < pts.size(); ++i) margins[i] = margin_at(pts[i]);
    } else {
      std::vector<std::thread> pool;
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> errs(nthreads);
      for (std::size_t t = 0; t < nthreads; ++t)
        pool.emplace_back([&, t] {
          try {
            for (std::size_t i = next.fetch_add(1); i < pts.size();
                 i = next.fetch_add(1))
              margins[i] = margin_at(pts[i]);
          } catch (...) {
            errs[t] = std::current_exception();
          }
        });
      for (auto& th : pool) th.join();
      for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    }
  }

  std::size_t worst = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (margins[i] > margins[worst]) worst = i;

  // Local refinement: finite-difference ascent on the phase-1 objective from
  // the worst sample, staying on the manifold (and on the boundary slice for
  // the boundary stack).
  Vector x_worst = pts[worst];
  double m_worst = margins[worst];
  {
    const auto reproject = [&](Vector x) -> std::optional<Vector> {
      if (kind == StackKind::Boundary)
        return detail::project_to_barrier_boundary(pd, spec, std::move(x));
      const Vector xd(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nd));
      const Vector xa(x.begin() + static_cast<std::ptrdiff_t>(nd), x.end());
      auto r = detail::try_consistent(sys, xd, xa);
      if (r && spec.b(*r)[0] <= 0.0) return std::nullopt;
      return r;
    };
    Vector scale(nd);
    for (std::size_t i = 0; i < nd; ++i) scale[i] = hi[i] - lo[i];
    double eta = 0.02;
    for (int it = 0; it < 25 && eta > 1e-9; ++it) {
      Vector grad(nd, 0.0);
      bool ok = true;
      for (std::size_t i = 0; i < nd && ok; ++i) {
        const double eps = 1e-4 * scale[i];
        Vector xp = x_worst, xm = x_worst;
        xp[i] += eps;
        xm[i] -= eps;
        auto pp = reproject(xp), pm = reproject(xm);
        if (!pp || !pm || !detail::in_box(*pp, lo, hi, 1e-9) ||
            !detail::in_box(*pm, lo, hi, 1e-9)) {
          ok = false;
          break;
        }
        grad[i] = (margin_at(*pp) - margin_at(*pm)) / (2.0 * eps);
      }
      const double gn = ok ? norm_inf(grad) : 0.0;
      if (gn < 1e-14) break;
      Vector cand = x_worst;
      for (std::size_t i = 0; i < nd; ++i) cand[i] += eta * scale[i] * grad[i] / gn;
      auto proj = reproject(cand);
      if (proj && detail::in_box(*proj, lo, hi, 1e-9)) {
        const double m = margin_at(*proj);
        if (m > m_worst) {
          x_worst = *proj;
          m_worst = m;
          eta = std::min(0.2, eta * 1.5);
          continue;
        }
      }
      eta *= 0.5;
    }
  }

  FeasibilityReport rep;
  rep.kind = kind;
  rep.samples = pts.size();
  rep.witness = x_worst;
  rep.worst_margin = m_worst;

  const LpFeasibility verdict = lp_feasible(assemble_stack(pd, spec, x_worst, kind));
  if (verdict.feasible) {
    rep.verdict = Verdict::Certified;
  } else {
    rep.verdict = Verdict::Violated;
    if (!verdict.certificate)
      throw Error("verify_feasibility: infeasible verdict without a certificate");
    // Soundness re-check of the certificate against a freshly assembled stack.
    const FeasibilityStack st = assemble_stack(pd, spec, x_worst, kind);
    const FarkasCertificate& c = *verdict.certificate;
    if (c.lambda.size() != st.a_mat.rows())
      throw Error("verify_feasibility: certificate size mismatch");
    Vector lta(st.a_mat.cols(), 0.0);
    double ltr = 0.0;
    for (std::size_t i = 0; i < st.a_mat.rows(); ++i) {
      if (c.lambda[i] < -1e-12)
        throw Error("verify_feasibility: negative Farkas multiplier");
      ltr += c.lambda[i] * st.r_vec[i];
      for (std::size_t j = 0; j < st.a_mat.cols(); ++j)
        lta[j] += c.lambda[i] * st.a_mat(i, j);
    }
    if (norm_inf(lta) > 1e-8 || std::abs(ltr + 1.0) > 1e-8)
      throw Error("verify_feasibility: Farkas certificate failed the re-check");
    rep.certificate = c;
  }
  rep.wall_time_s = detail::elapsed_s(t0);
  return rep;
}

/// Runs all three checks over the same box.
inline VerificationReport verify_all(const ProjectedDynamics& pd,
                                     const BarrierSpec& spec, const Vector& lo,
                                     const Vector& hi, const VerifyOptions& opt = {}) {
  VerificationReport rep;
  rep.correctness = verify_correctness(pd, spec, lo, hi, opt);
  rep.interior = verify_feasibility(pd, spec, lo, hi, StackKind::Interior, opt);
  rep.boundary = verify_feasibility(pd, spec, lo, hi, StackKind::Boundary, opt);
  return rep;
}

// --- JSON serialization ------------------------------------------------------------

inline nlohmann::json to_json(const CorrectnessReport& r) {
  nlohmann::json j;
  j["verdict"] = to_string(r.verdict);
  j["witness_or_counterexample"] = r.witness;
  j["search_min"] = r.search_min;
  j["grid_min"] = r.grid_min;
  j["samples"] = r.samples;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

inline nlohmann::json to_json(const FeasibilityReport& r) {
  nlohmann::json j;
  j["verdict"] = to_string(r.verdict);
  j["kind"] = to_string(r.kind);
  j["witness_or_counterexample"] = r.witness;
  j["worst_margin"] = r.worst_margin;
  if (r.certificate) {
    j["certificate"] = {{"lambda", r.certificate->lambda},
                        {"residual_eq", r.certificate->residual_eq},
                        {"value", r.certificate->value}};
  } else {
    j["certificate"] = nullptr;
  }
  j["samples"] = r.samples;
  j["wall_time_s"] = r.wall_time_s;
  return j;
}

inline std::string report_json(const VerificationReport& rep) {
  nlohmann::json j;
  j["correctness"] = to_json(rep.correctness);
  j["interior"] = to_json(rep.interior);
  j["boundary"] = to_json(rep.boundary);
  return j.dump(2);
}

}  // namespace daecbf
