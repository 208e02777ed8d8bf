#pragma once

// Type-erased smooth maps.  A SmoothFn wraps a generic callable (typically a
// generic lambda) and keeps instantiations for every dual-nesting depth the
// library uses, so Jacobians and nested Lie derivatives can be taken of the
// same object without templates leaking into the model types.

#include <cstddef>
#include <functional>
#include <utility>

#include "daecbf/dual.hpp"
#include "daecbf/matrix.hpp"

namespace daecbf {

using D0 = double;
using D1 = Dual<double>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

/// Smooth map R^n_in -> R^n_out, evaluable at dual depth 0..4.
class SmoothFn {
 public:
  SmoothFn() = default;

  template <class F>
  SmoothFn(std::size_t n_in, std::size_t n_out, F f)
      : n_in_(n_in), n_out_(n_out), f0_(f), f1_(f), f2_(f), f3_(f), f4_(f) {}

  std::size_t n_in() const { return n_in_; }
  std::size_t n_out() const { return n_out_; }
  bool valid() const { return static_cast<bool>(f0_); }

  template <class S>
  VectorT<S> operator()(const VectorT<S>& x) const {
    if constexpr (std::is_same_v<S, D0>) return f0_(x);
    else if constexpr (std::is_same_v<S, D1>) return f1_(x);
    else if constexpr (std::is_same_v<S, D2>) return f2_(x);
    else if constexpr (std::is_same_v<S, D3>) return f3_(x);
    else if constexpr (std::is_same_v<S, D4>) return f4_(x);
    else static_assert(sizeof(S) == 0, "dual nesting depth exceeds 4");
  }

 private:
  std::size_t n_in_ = 0, n_out_ = 0;
  std::function<VectorT<D0>(const VectorT<D0>&)> f0_;
  std::function<VectorT<D1>(const VectorT<D1>&)> f1_;
  std::function<VectorT<D2>(const VectorT<D2>&)> f2_;
  std::function<VectorT<D3>(const VectorT<D3>&)> f3_;
  std::function<VectorT<D4>(const VectorT<D4>&)> f4_;
};

/// Smooth matrix-valued map R^n_in -> R^(rows x cols).
class MatrixFn {
 public:
  MatrixFn() = default;

  template <class F>
  MatrixFn(std::size_t n_in, std::size_t rows, std::size_t cols, F f)
      : n_in_(n_in), rows_(rows), cols_(cols), f0_(f), f1_(f), f2_(f), f3_(f), f4_(f) {}

  std::size_t n_in() const { return n_in_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool valid() const { return static_cast<bool>(f0_); }

  template <class S>
  MatrixT<S> operator()(const VectorT<S>& x) const {
    if constexpr (std::is_same_v<S, D0>) return f0_(x);
    else if constexpr (std::is_same_v<S, D1>) return f1_(x);
    else if constexpr (std::is_same_v<S, D2>) return f2_(x);
    else if constexpr (std::is_same_v<S, D3>) return f3_(x);
    else if constexpr (std::is_same_v<S, D4>) return f4_(x);
    else static_assert(sizeof(S) == 0, "dual nesting depth exceeds 4");
  }

 private:
  std::size_t n_in_ = 0, rows_ = 0, cols_ = 0;
  std::function<MatrixT<D0>(const VectorT<D0>&)> f0_;
  std::function<MatrixT<D1>(const VectorT<D1>&)> f1_;
  std::function<MatrixT<D2>(const VectorT<D2>&)> f2_;
  std::function<MatrixT<D3>(const VectorT<D3>&)> f3_;
  std::function<MatrixT<D4>(const VectorT<D4>&)> f4_;
};

// --- forward-mode differentiation ------------------------------------------

/// Seeds every input component (full seeding) and evaluates f once on duals.
template <class S, class F>
MatrixT<S> jacobian_of(F&& f, const VectorT<S>& x) {
  const std::size_t n = x.size();
  VectorT<Dual<S>> xd(n);
  for (std::size_t i = 0; i < n; ++i) xd[i] = Dual<S>::seed(x[i], n, i);
  const VectorT<Dual<S>> y = f(xd);
  MatrixT<S> j(y.size(), n);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t k = 0; k < n; ++k)
      j(i, k) = y[i].d.empty() ? S(0.0) : y[i].d[k];
  return j;
}

/// Jacobian of a SmoothFn at a point (exact to machine precision for
/// polynomial maps).
inline Matrix jacobian(const SmoothFn& f, const Vector& x) {
  require_finite(x, "jacobian");
  Matrix j = jacobian_of([&f](const VectorT<D1>& xd) { return f(xd); }, x);
  require_finite(j, "jacobian");
  return j;
}

/// Gradient of a scalar component of f (row `comp` of the Jacobian).
template <class S, class F>
VectorT<S> gradient_of(F&& f, const VectorT<S>& x) {
  const std::size_t n = x.size();
  VectorT<Dual<S>> xd(n);
  for (std::size_t i = 0; i < n; ++i) xd[i] = Dual<S>::seed(x[i], n, i);
  const Dual<S> y = f(xd);
  VectorT<S> g(n, S(0.0));
  for (std::size_t k = 0; k < n; ++k)
    if (!y.d.empty()) g[k] = y.d[k];
  return g;
}

}  // namespace daecbf
