#pragma once

// Closed-loop integration of the projected dynamics: classic RK4 with the
// input held constant over a step, followed by a Newton re-projection of the
// algebraic states back onto the constraint manifold.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "daecbf/newton.hpp"
#include "daecbf/projection.hpp"
#include "daecbf/qp.hpp"

namespace daecbf {

enum class ControllerMode { Aware, Unaware, Nominal };
enum class InfeasibilityPolicy { HoldNominal, HoldZero, Halt };

using NominalController = std::function<Vector(double, const Vector&)>;

struct Scenario {
  std::string system;
  BarrierSpec spec;
  ControllerMode mode = ControllerMode::Aware;
  Vector x_d0;
  Vector x_a_guess;
  double dt = 1e-3;
  double horizon = 10.0;
  NominalController nominal;  // defaults to u = 0
  InfeasibilityPolicy policy = InfeasibilityPolicy::HoldNominal;
};

struct TrajectorySummary {
  double min_b = 0.0;
  double min_h = 0.0;
  double max_phi = 0.0;
  std::optional<double> first_infeasible;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vector> x;
  std::vector<Vector> u;
  std::vector<double> b;
  std::vector<double> h;
  std::vector<double> phi_res;
  std::vector<std::string> status;
  TrajectorySummary summary;
};

/// Completes x_d0 to a consistent state by solving every supplied constraint
/// level for the algebraic variables.
inline Vector consistent_init(const DaeSystem& sys, const Vector& x_d0,
                              const Vector& x_a_guess) {
  const std::size_t nd = sys.n_d, na = sys.n_a;
  const std::size_t levels = std::max<std::size_t>(sys.declared_index, 1);
  SmoothFn residual(na, sys.n_m() * levels, [&sys, x_d0, nd, na, levels](const auto& xa) {
    using V = std::decay_t<decltype(xa)>;
    using S = typename V::value_type;
    VectorT<S> x(nd + na);
    for (std::size_t i = 0; i < nd; ++i) x[i] = S(x_d0[i]);
    for (std::size_t i = 0; i < na; ++i) x[nd + i] = xa[i];
    V out(sys.n_m() * levels);
    std::size_t at = 0;
    for (std::size_t l = 0; l < levels; ++l) {
      const auto v = sys.constraint_chain[l](x);
      for (std::size_t i = 0; i < sys.n_m(); ++i) out[at++] = v[i];
    }
    return out;
  });
  NewtonOptions opt;
  opt.tol = 1e-12;
  const Vector xa = newton_root(residual, x_a_guess, opt);
  Vector x(nd + na);
  for (std::size_t i = 0; i < nd; ++i) x[i] = x_d0[i];
  for (std::size_t i = 0; i < na; ++i) x[nd + i] = xa[i];
  return x;
}

namespace detail {

inline Vector closed_loop_field(const ProjectedDynamics& pd, const Vector& x,
                                const Vector& u, bool raw_differential) {
  const DaeSystem& sys = pd.sys;
  Vector gu;
  Vector dx(sys.n_x(), 0.0);
  if (raw_differential) {
    // Unaware baseline: integrate the differential half only; the algebraic
    // states are frozen during the step and re-solved afterwards.
    const Vector fd = sys.f_d(x);
    const Matrix gd = sys.g_d(x);
    gu = gd * u;
    for (std::size_t i = 0; i < sys.n_d; ++i) dx[i] = fd[i] + gu[i];
    return dx;
  }
  const Vector f = fhat_t(pd, x);
  const Matrix g = ghat_t(pd, x);
  gu = g * u;
  for (std::size_t i = 0; i < sys.n_x(); ++i) dx[i] = f[i] + gu[i];
  return dx;
}

/// Re-solves phi(x_d, x_a) = 0 for x_a alone (coordinate projection).
inline void reproject_algebraic(const DaeSystem& sys, Vector& x) {
  if (sys.n_a == 0) return;
  const std::size_t nd = sys.n_d, na = sys.n_a;
  Vector xd(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nd));
  SmoothFn residual(na, sys.n_m(), [&sys, xd, nd, na](const auto& xa) {
    using V = std::decay_t<decltype(xa)>;
    using S = typename V::value_type;
    VectorT<S> full(nd + na);
    for (std::size_t i = 0; i < nd; ++i) full[i] = S(xd[i]);
    for (std::size_t i = 0; i < na; ++i) full[nd + i] = xa[i];
    return sys.constraint_chain[0](full);
  });
  Vector xa(x.begin() + static_cast<std::ptrdiff_t>(nd), x.end());
  NewtonOptions opt;
  opt.tol = 1e-12;
  xa = newton_root(residual, xa, opt);
  for (std::size_t i = 0; i < na; ++i) x[nd + i] = xa[i];
}

}  // namespace detail

/// One RK4 step with zero-order-hold input, then algebraic re-projection.
inline Vector step(const ProjectedDynamics& pd, const Vector& x, const Vector& u,
                   double dt, bool raw_differential = false) {
  const std::size_t n = x.size();
  const Vector k1 = detail::closed_loop_field(pd, x, u, raw_differential);
  Vector x2(n), x3(n), x4(n);
  for (std::size_t i = 0; i < n; ++i) x2[i] = x[i] + 0.5 * dt * k1[i];
  const Vector k2 = detail::closed_loop_field(pd, x2, u, raw_differential);
  for (std::size_t i = 0; i < n; ++i) x3[i] = x[i] + 0.5 * dt * k2[i];
  const Vector k3 = detail::closed_loop_field(pd, x3, u, raw_differential);
  for (std::size_t i = 0; i < n; ++i) x4[i] = x[i] + dt * k3[i];
  const Vector k4 = detail::closed_loop_field(pd, x4, u, raw_differential);
  Vector out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  detail::reproject_algebraic(pd.sys, out);
  const double res = norm_inf(pd.sys.phi(out));
  if (res > 1e-9)
    throw OffManifold("step: post-projection residual " + std::to_string(res));
  return out;
}

inline Trajectory run(const ProjectedDynamics& pd, const Scenario& sc) {
  const DaeSystem& sys = pd.sys;
  if (sc.dt <= 0.0 || sc.horizon < sc.dt)
    throw Error("run: need dt > 0 and horizon >= dt");
  NominalController nominal = sc.nominal;
  if (!nominal)
    nominal = [&sys](double, const Vector&) { return Vector(sys.n_u, 0.0); };

  Vector x = consistent_init(sys, sc.x_d0, sc.x_a_guess);
  const std::size_t nsteps = static_cast<std::size_t>(std::llround(sc.horizon / sc.dt));

  Trajectory tr;
  bool halted = false;
  for (std::size_t k = 0; k <= nsteps && !halted; ++k) {
    const double t = static_cast<double>(k) * sc.dt;
    const Vector u_nom = nominal(t, x);

    Vector u = u_nom;
    std::string status = "nominal";
    if (sc.mode != ControllerMode::Nominal) {
      bool infeasible = false;
      try {
        const QpProblem qp = sc.mode == ControllerMode::Aware
                                 ? assemble_filter_qp(pd, sc.spec, x, u_nom)
                                 : dae_unaware_filter(sys, sc.spec, x, u_nom);
        const FilterResult res = solve_qp(qp);
        if (res.status == FilterStatus::Feasible) {
          u = res.u;
          status = "optimal";
        } else {
          infeasible = true;
        }
      } catch (const Error&) {
        // structural infeasibility or an unsafe state: same policy path
        infeasible = true;
      }
      if (infeasible) {
        status = "infeasible";
        if (!tr.summary.first_infeasible) tr.summary.first_infeasible = t;
        switch (sc.policy) {
          case InfeasibilityPolicy::HoldNominal:
            u = u_nom;
            break;
          case InfeasibilityPolicy::HoldZero:
            u.assign(sys.n_u, 0.0);
            break;
          case InfeasibilityPolicy::Halt:
            halted = true;
            break;
        }
      }
    }

    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.u.push_back(u);
    tr.b.push_back(sc.spec.b(x)[0]);
    tr.h.push_back(sc.spec.h(x)[0]);
    tr.phi_res.push_back(norm_inf(sys.phi(x)));
    tr.status.push_back(status);

    if (halted || k == nsteps) break;
    x = step(pd, x, u, sc.dt, sc.mode == ControllerMode::Unaware);
  }

  tr.summary.min_b = tr.b.empty() ? 0.0 : *std::min_element(tr.b.begin(), tr.b.end());
  tr.summary.min_h = tr.h.empty() ? 0.0 : *std::min_element(tr.h.begin(), tr.h.end());
  tr.summary.max_phi =
      tr.phi_res.empty() ? 0.0 : *std::max_element(tr.phi_res.begin(), tr.phi_res.end());
  return tr;
}

// --- CSV export ---------------------------------------------------------------

namespace detail {

inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

}  // namespace detail

inline std::string trajectory_csv(const Trajectory& tr) {
  if (tr.x.empty()) return "";
  const std::size_t nx = tr.x[0].size(), nu = tr.u[0].size();
  std::string out = "t";
  for (std::size_t i = 1; i <= nx; ++i) out += ",x" + std::to_string(i);
  for (std::size_t i = 1; i <= nu; ++i) out += ",u" + std::to_string(i);
  out += ",b,h,phi_res,status\n";
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    out += detail::csv_double(tr.t[k]);
    for (double v : tr.x[k]) out += "," + detail::csv_double(v);
    for (double v : tr.u[k]) out += "," + detail::csv_double(v);
    out += "," + detail::csv_double(tr.b[k]);
    out += "," + detail::csv_double(tr.h[k]);
    out += "," + detail::csv_double(tr.phi_res[k]);
    out += "," + detail::csv_field(tr.status[k]);
    out += "\n";
  }
  return out;
}

}  // namespace daecbf
