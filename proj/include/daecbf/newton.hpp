#pragma once

// Damped Newton iteration for square or least-squares root finding; used for
// consistent initialization and manifold re-projection.

#include <cstddef>

#include "daecbf/matrix.hpp"
#include "daecbf/smooth.hpp"

namespace daecbf {

struct NewtonOptions {
  double tol = 1e-12;
  std::size_t max_iter = 50;
  double rank_tol = 1e-10;
};

/// Finds x with ||r(x)||_inf <= tol.  Non-square systems are solved in the
/// least-squares sense through the pseudoinverse of the Jacobian.  Re-running
/// from a converged point returns it unchanged.
inline Vector newton_root(const SmoothFn& r, Vector x, const NewtonOptions& opt = {}) {
  require_finite(x, "newton_root");
  Vector res = r(x);
  double rn = norm_inf(res);
  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    if (rn <= opt.tol) return x;
    const Matrix j = jacobian(r, x);
    const Matrix jinv = pseudoinverse(j, opt.rank_tol);
    Vector neg(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) neg[i] = -res[i];
    const Vector dx = jinv * neg;
    // Backtracking keeps the iteration from overshooting on stiff residuals.
    double step = 1.0;
    for (int bt = 0; bt < 20; ++bt) {
      Vector trial = axpy(step, dx, x);
      Vector tres = r(trial);
      if (all_finite(tres) && norm_inf(tres) < rn) {
        x = std::move(trial);
        res = std::move(tres);
        rn = norm_inf(res);
        break;
      }
      step *= 0.5;
      if (bt == 19) throw NoConvergence("newton_root: line search stalled", x, rn);
    }
  }
  if (rn <= opt.tol) return x;
  throw NoConvergence("newton_root: max iterations reached", x, rn);
}

}  // namespace daecbf
