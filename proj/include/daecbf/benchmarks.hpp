#pragma once

// The two shipped benchmark systems: a wind-turbine power system with a
// quartic algebraic constraint (index 1) and a two-link planar manipulator
// with a tip-height constraint (treated as index 2).

#include <map>
#include <string>

#include "daecbf/dae_model.hpp"
#include "daecbf/projection.hpp"
#include "daecbf/simulator.hpp"
#include "daecbf/sobol.hpp"

namespace daecbf {

struct BenchmarkPreset {
  std::string name;
  DaeSystem sys;
  BarrierSpec spec;
  Scenario aware;
  Scenario unaware;
  Vector domain_lo;  // probe box over the full state (structural analysis, tangency)
  Vector domain_hi;
  Vector verify_lo;  // experiment box for global verification; a subset of the
  Vector verify_hi;  // probe box restricted to the operating branch / region
  std::map<std::string, double> params;
};

/// Sobol points in the box with the algebraic part re-solved onto the
/// manifold; points where the solve fails are skipped.
inline std::vector<Vector> manifold_probes(const DaeSystem& sys, const Vector& lo,
                                           const Vector& hi, std::size_t count,
                                           std::size_t skip = 0) {
  SobolSequence seq(sys.n_x());
  seq.skip(1 + skip);  // drop the origin point
  std::vector<Vector> probes;
  std::size_t attempts = 0;
  while (probes.size() < count && attempts < 20 * count + 64) {
    ++attempts;
    const Vector p = scale_to_box(seq.next(), lo, hi);
    Vector xd(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(sys.n_d));
    Vector xa(p.begin() + static_cast<std::ptrdiff_t>(sys.n_d), p.end());
    try {
      Vector x = consistent_init(sys, xd, xa);
      bool inside = true;
      for (std::size_t i = sys.n_d; i < sys.n_x(); ++i)
        if (x[i] < lo[i] - 1e-9 || x[i] > hi[i] + 1e-9) inside = false;
      if (inside) probes.push_back(std::move(x));
    } catch (const NoConvergence&) {
      // off-branch start; try the next point
    }
  }
  if (probes.empty())
    throw NoBoundarySamples("manifold_probes: no consistent points in the box");
  return probes;
}

// ---------------------------------------------------------------------------
// Wind turbine.  The published model is
//   x1' = a1 (u - b1 x3 (x2 - x3)),  x2' = a2 (x1 - x3),
//   0   = x3^4 - [b2 + b3 x3 (x2 - x3)] x3^2 + b4,
// with a fixed degree-2 barrier candidate.  The numeric parameters below are
// this artifact's calibration (the source model leaves them unspecified).
// The quartic has two positive roots; the scenarios track the upper branch,
// where the constraint Jacobian stays positive and grows as x2 falls, so the
// branch never reaches its fold (at x2 ~ 1.21) from the shipped initial
// condition and the algebraic solve remains well posed.

namespace wt {
constexpr double a1 = 0.03;
constexpr double a2 = 0.07;
constexpr double b1 = 1.0;
constexpr double b2 = 1.64;
constexpr double b3 = -0.99;
constexpr double b4 = 0.47;
constexpr double x_max = -0.53;  // safe set h = x1 - x_max (a lower bound on x1)
constexpr double u_max = 3.1;
constexpr double u_push = -2.6;  // nominal input driving x1 toward the unsafe set
constexpr double kappa1 = 0.3;
}  // namespace wt

inline double wind_turbine_barrier_value(double x1, double x2, double x3) {
  return -1175.36 + 238.42 * x1 + 1491.68 * x2 + 238.42 * x3 - 263.78 * x1 * x1 +
         472.45 * x1 * x2 - 477.45 * x1 * x3 - 145.97 * x2 * x2 -
         263.78 * x2 * x3 + x3 * x3;
}

inline BenchmarkPreset wind_turbine() {
  BenchmarkPreset p;
  p.name = "wind_turbine";

  DaeSystem sys;
  sys.name = "wind_turbine";
  sys.n_d = 2;
  sys.n_a = 1;
  sys.n_u = 1;
  sys.declared_index = 1;
  sys.f_d = SmoothFn(3, 2, [](const auto& x) {
    using V = std::decay_t<decltype(x)>;
    V f(2);
    f[0] = -wt::a1 * wt::b1 * x[2] * (x[1] - x[2]);
    f[1] = wt::a2 * (x[0] - x[2]);
    return f;
  });
  sys.g_d = MatrixFn(3, 2, 1, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::value_type;
    MatrixT<S> g(2, 1);
    g(0, 0) = S(wt::a1);
    g(1, 0) = S(0.0);
    return g;
  });
  sys.constraint_chain.push_back(SmoothFn(3, 1, [](const auto& x) {
    using V = std::decay_t<decltype(x)>;
    V phi(1);
    phi[0] = ipow(x[2], 4) -
             (wt::b2 + wt::b3 * x[2] * (x[1] - x[2])) * x[2] * x[2] + wt::b4;
    return phi;
  }));
  sys.input_polytope.a_u = Matrix(2, 1);
  sys.input_polytope.a_u(0, 0) = 1.0;
  sys.input_polytope.a_u(1, 0) = -1.0;
  sys.input_polytope.r_u = {wt::u_max, wt::u_max};
  p.sys = sys;

  BarrierSpec spec;
  spec.b = SmoothFn(3, 1, [](const auto& x) {
    using V = std::decay_t<decltype(x)>;
    V b(1);
    b[0] = -1175.36 + 238.42 * x[0] + 1491.68 * x[1] + 238.42 * x[2] -
           263.78 * x[0] * x[0] + 472.45 * x[0] * x[1] - 477.45 * x[0] * x[2] -
           145.97 * x[1] * x[1] - 263.78 * x[1] * x[2] + x[2] * x[2];
    return b;
  });
  spec.h = SmoothFn(3, 1, [](const auto& x) {
    using V = std::decay_t<decltype(x)>;
    V h(1);
    h[0] = x[0] - wt::x_max;
    return h;
  });
  spec.hocbf_order = 1;
  spec.alphas = {wt::kappa1};
  p.spec = spec;

  Scenario aware;
  aware.system = "wind_turbine";
  aware.spec = spec;
  aware.mode = ControllerMode::Aware;
  aware.x_d0 = {-0.48, 1.17};
  aware.x_a_guess = {0.99};
  aware.dt = 1e-3;
  aware.horizon = 4.5;
  aware.nominal = [](double, const Vector&) { return Vector{wt::u_push}; };
  p.aware = aware;
  Scenario unaware = aware;
  unaware.mode = ControllerMode::Unaware;
  p.unaware = unaware;

  p.domain_lo = {-1.2, 0.6, 0.5};
  p.domain_hi = {0.6, 1.4, 1.6};
  // Verification box: the upper-branch operating region the aware scenario
  // defends.  It contains the lower barrier edge (x1 ~ -0.64) but excludes
  // the second root branch and the indefensible upper edge.
  p.verify_lo = {-0.66, 1.0, 0.95};
  p.verify_hi = {0.1, 1.18, 1.42};
  p.params = {{"a1", wt::a1},      {"a2", wt::a2},    {"b1", wt::b1},
              {"b2", wt::b2},      {"b3", wt::b3},    {"b4", wt::b4},
              {"x_max", wt::x_max},{"u_max", wt::u_max},
              {"u_push", wt::u_push},
              {"kappa1", wt::kappa1}};
  return p;
}

// ---------------------------------------------------------------------------
// Two-link planar manipulator, joint-relative second angle (the standard
// rigid-body form), angles measured from the horizontal so the tip height is
//   y_tip = l1 sin q1 + l2 sin(q1 + q2).
// State x = (q1, q2, w1, w2, x5) with the algebraic tip-height coordinate x5
// tied down by phi = y_tip(q) - x5.  Dynamics M(q) dw = u - C(q,w) w - G(q) - D w.

namespace ml {
constexpr double l1 = 1.0, l2 = 1.0;
constexpr double m1 = 1.0, m2 = 1.0;
constexpr double lc1 = 0.5, lc2 = 0.5;
constexpr double inertia = 0.083;
constexpr double grav = 9.81;
constexpr double d1 = 0.1, d2 = 0.1;
constexpr double y_max = 1.8;
constexpr double u_max = 10.0;
constexpr double kappa = 4.0;
// PD swing-up gains for the nominal controller (drives the arm toward
// vertical, which would overshoot the height limit without the filter).
constexpr double kp = 5.0, kd = 1.0;
}  // namespace ml

namespace detail {

// Joint accelerations for the two-link arm: the drift part (u = 0) and the
// input map M^{-1} are shared between f_d and g_d.
template <class S>
void manipulator_inertia(const VectorT<S>& x, S& m11, S& m12, S& m22) {
  const S c2 = cos(x[1]);
  const double a1c = ml::inertia + ml::inertia + ml::m1 * ml::lc1 * ml::lc1 +
                     ml::m2 * (ml::l1 * ml::l1 + ml::lc2 * ml::lc2);
  const double a2c = ml::m2 * ml::l1 * ml::lc2;
  const double a3c = ml::inertia + ml::m2 * ml::lc2 * ml::lc2;
  m11 = a1c + 2.0 * a2c * c2;
  m12 = a3c + a2c * c2;
  m22 = S(a3c);
}

template <class S>
VectorT<S> manipulator_drift_accel(const VectorT<S>& x) {
  const S s2 = sin(x[1]);
  const double a2c = ml::m2 * ml::l1 * ml::lc2;
  const S w1 = x[2], w2 = x[3];
  // Coriolis/centrifugal terms C(q,w) w for the relative-angle convention.
  const S cw1 = -a2c * s2 * w2 * (2.0 * w1 + w2);
  const S cw2 = a2c * s2 * w1 * w1;
  const S g1 = (ml::m1 * ml::lc1 + ml::m2 * ml::l1) * ml::grav * cos(x[0]) +
               ml::m2 * ml::lc2 * ml::grav * cos(x[0] + x[1]);
  const S g2 = ml::m2 * ml::lc2 * ml::grav * cos(x[0] + x[1]);
  S m11, m12, m22;
  manipulator_inertia(x, m11, m12, m22);
  const S det = m11 * m22 - m12 * m12;
  const S r1 = -cw1 - g1 - ml::d1 * w1;
  const S r2 = -cw2 - g2 - ml::d2 * w2;
  VectorT<S> a(2);
  a[0] = (m22 * r1 - m12 * r2) / det;
  a[1] = (m11 * r2 - m12 * r1) / det;
  return a;
}

}  // namespace detail

template <class S>
S manipulator_tip_height(const VectorT<S>& x) {
  return ml::l1 * sin(x[0]) + ml::l2 * sin(x[0] + x[1]);
}

inline BenchmarkPreset flexible_manipulator() {
  BenchmarkPreset p;
  p.name = "manipulator";

  DaeSystem sys;
  sys.name = "manipulator";
  sys.n_d = 4;
  sys.n_a = 1;
  sys.n_u = 2;
  sys.declared_index = 2;
  sys.f_d = SmoothFn(5, 4, [](const auto& x) {
    using V = std::decay_t<decltype(x)>;
    const auto a = detail::manipulator_drift_accel(x);
    V f(4);
    f[0] = x[2];
    f[1] = x[3];
    f[2] = a[0];
    f[3] = a[1];
    return f;
  });
  sys.g_d = MatrixFn(5, 4, 2, [](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::value_type;
    S m11, m12, m22;
    detail::manipulator_inertia(x, m11, m12, m22);
    const S det = m11 * m22 - m12 * m12;
    MatrixT<S> g(4, 2);
    g(0, 0) = S(0.0);
    g(0, 1) = S(0.0);
    g(1, 0) = S(0.0);
    g(1, 1) = S(0.0);
    g(2, 0) = m22 / det;
    g(2, 1) = (S(0.0) - m12) / det;
    g(3, 0) = (S(0.0) - m12) / det;
    g(3, 1) = m11 / det;
    return g;
  });
  // The tip-height constraint is supplied at both derivative levels; the
  // position-level expression carries all the geometry, so both entries
  // coincide (differentiation happens through the level Jacobians).
  SmoothFn phi(5, 1, [](const auto& x) {
    using V = std::decay_t<decltype(x)>;
    V out(1);
    out[0] = manipulator_tip_height(x) - x[4];
    return out;
  });
  sys.constraint_chain.push_back(phi);
  sys.constraint_chain.push_back(phi);
  sys.input_polytope.a_u = Matrix(4, 2);
  sys.input_polytope.a_u(0, 0) = 1.0;
  sys.input_polytope.a_u(1, 0) = -1.0;
  sys.input_polytope.a_u(2, 1) = 1.0;
  sys.input_polytope.a_u(3, 1) = -1.0;
  sys.input_polytope.r_u = {ml::u_max, ml::u_max, ml::u_max, ml::u_max};
  p.sys = sys;

  BarrierSpec spec;
  SmoothFn height_margin(5, 1, [](const auto& x) {
    using V = std::decay_t<decltype(x)>;
    V out(1);
    out[0] = ml::y_max - x[4];
    return out;
  });
  spec.b = height_margin;
  spec.h = height_margin;
  spec.hocbf_order = 3;
  spec.alphas = {ml::kappa, ml::kappa, ml::kappa};
  p.spec = spec;

  Scenario aware;
  aware.system = "manipulator";
  aware.spec = spec;
  aware.mode = ControllerMode::Aware;
  aware.x_d0 = {0.0, 0.0, 3.0, 0.0};
  aware.x_a_guess = {0.0};
  aware.dt = 1e-3;
  aware.horizon = 10.0;
  aware.nominal = [](double, const Vector& x) {
    const double pi2 = 1.5707963267948966;
    return Vector{ml::kp * (pi2 - x[0]) - ml::kd * x[2],
                  ml::kp * (0.0 - x[1]) - ml::kd * x[3]};
  };
  p.aware = aware;
  Scenario unaware = aware;
  unaware.mode = ControllerMode::Unaware;
  p.unaware = unaware;

  p.domain_lo = {-1.6, -1.6, -4.0, -4.0, -2.0};
  p.domain_hi = {1.6, 1.6, 4.0, 4.0, 2.0};
  p.verify_lo = p.domain_lo;
  p.verify_hi = p.domain_hi;
  p.params = {{"l1", ml::l1},   {"l2", ml::l2},   {"m1", ml::m1},
              {"m2", ml::m2},   {"lc1", ml::lc1}, {"lc2", ml::lc2},
              {"I", ml::inertia}, {"g", ml::grav},
              {"d1", ml::d1},   {"d2", ml::d2},   {"y_max", ml::y_max},
              {"u_max", ml::u_max}, {"kappa", ml::kappa}};
  return p;
}

inline BenchmarkPreset benchmark_by_name(const std::string& name) {
  if (name == "wind_turbine") return wind_turbine();
  if (name == "manipulator") return flexible_manipulator();
  throw UsageError("unknown benchmark: " + name);
}

}  // namespace daecbf
