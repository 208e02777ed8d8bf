#pragma once

// Small dense row-major matrices, generic in the scalar type so the same
// kernels run on doubles and on (nested) dual numbers.  Problem sizes in
// this library are tiny (<= ~50 rows), so everything is O(n^3) textbook
// material with deterministic pivoting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "daecbf/dual.hpp"
#include "daecbf/errors.hpp"

namespace daecbf {

template <class S>
using VectorT = std::vector<S>;

using Vector = VectorT<double>;

template <class S>
class MatrixT {
 public:
  MatrixT() = default;
  MatrixT(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, S(0.0)) {}
  MatrixT(std::size_t rows, std::size_t cols, std::vector<S> entries)
      : rows_(rows), cols_(cols), a_(std::move(entries)) {}

  static MatrixT identity(std::size_t n) {
    MatrixT m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1.0);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  S& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  const std::vector<S>& entries() const { return a_; }
  std::vector<S>& entries() { return a_; }

  VectorT<S> row(std::size_t i) const {
    return VectorT<S>(a_.begin() + i * cols_, a_.begin() + (i + 1) * cols_);
  }

  MatrixT transposed() const {
    MatrixT t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<S> a_;
};

using Matrix = MatrixT<double>;

template <class S>
MatrixT<S> operator*(const MatrixT<S>& a, const MatrixT<S>& b) {
  MatrixT<S> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const S& aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class S>
VectorT<S> operator*(const MatrixT<S>& a, const VectorT<S>& x) {
  VectorT<S> y(a.rows(), S(0.0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

template <class S>
MatrixT<S> operator+(const MatrixT<S>& a, const MatrixT<S>& b) {
  MatrixT<S> c = a;
  for (std::size_t i = 0; i < c.entries().size(); ++i) c.entries()[i] += b.entries()[i];
  return c;
}

template <class S>
MatrixT<S> operator-(const MatrixT<S>& a, const MatrixT<S>& b) {
  MatrixT<S> c = a;
  for (std::size_t i = 0; i < c.entries().size(); ++i) c.entries()[i] -= b.entries()[i];
  return c;
}

template <class S>
MatrixT<S> operator*(double s, const MatrixT<S>& a) {
  MatrixT<S> c = a;
  for (auto& e : c.entries()) e = e * s;
  return c;
}

// --- vector helpers -------------------------------------------------------

template <class S>
S dot(const VectorT<S>& a, const VectorT<S>& b) {
  S s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline Vector axpy(double a, const Vector& x, const Vector& y) {
  Vector r(y);
  for (std::size_t i = 0; i < x.size(); ++i) r[i] += a * x[i];
  return r;
}

inline double norm_inf(const Matrix& m) {
  double r = 0.0;
  for (double x : m.entries()) r = std::max(r, std::abs(x));
  return r;
}

inline bool all_finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

inline bool all_finite(const Matrix& m) { return all_finite(m.entries()); }

inline void require_finite(const Matrix& m, const std::string& who) {
  if (!all_finite(m)) throw NonFinite(who + ": matrix contains NaN/Inf");
}

inline void require_finite(const Vector& v, const std::string& who) {
  if (!all_finite(v)) throw NonFinite(who + ": vector contains NaN/Inf");
}

// --- LU solve (partial pivoting on values) --------------------------------

/// Solves a square system in place; pivot choices depend only on the value
/// parts, so the factorization is dual-transparent.
template <class S>
VectorT<S> lu_solve(MatrixT<S> a, VectorT<S> b) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(value(a(k, k)));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(value(a(i, k)));
      if (cand > best) {
        best = cand;
        p = i;
      }
    }
    if (best == 0.0) throw Error("lu_solve: singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const S m = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= m * a(k, j);
      b[i] -= m * b[k];
    }
  }
  VectorT<S> x(n, S(0.0));
  for (std::size_t i = n; i-- > 0;) {
    S s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

// --- SVD via one-sided Jacobi ---------------------------------------------

template <class S>
struct SvdResult {
  MatrixT<S> u;            // m x n (thin)
  VectorT<S> sigma;        // n, descending by value
  MatrixT<S> v;            // n x n
};

/// One-sided Jacobi SVD for m >= n; deterministic sweep order.
template <class S>
SvdResult<S> svd_jacobi_tall(const MatrixT<S>& a) {
  const std::size_t m = a.rows(), n = a.cols();
  MatrixT<S> b = a;
  MatrixT<S> v = MatrixT<S>::identity(n);
  const double eps = 1e-15;

  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        S app(0.0), aqq(0.0), apq(0.0);
        for (std::size_t i = 0; i < m; ++i) {
          app += b(i, p) * b(i, p);
          aqq += b(i, q) * b(i, q);
          apq += b(i, p) * b(i, q);
        }
        const double off = std::abs(value(apq));
        if (off <= eps * std::sqrt(std::max(value(app) * value(aqq), 0.0)) || off == 0.0)
          continue;
        rotated = true;
        const S zeta = (aqq - app) / (2.0 * apq);
        const double zv = value(zeta);
        const S t = (zv >= 0.0 ? S(1.0) : S(-1.0)) /
                    (abs(zeta) + sqrt(S(1.0) + zeta * zeta));
        const S cs = S(1.0) / sqrt(S(1.0) + t * t);
        const S sn = cs * t;
        for (std::size_t i = 0; i < m; ++i) {
          const S bp = b(i, p), bq = b(i, q);
          b(i, p) = cs * bp - sn * bq;
          b(i, q) = sn * bp + cs * bq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const S vp = v(i, p), vq = v(i, q);
          v(i, p) = cs * vp - sn * vq;
          v(i, q) = sn * vp + cs * vq;
        }
      }
    }
    if (!rotated) break;
  }

  // Column norms are the singular values; sort descending (stable, by value).
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  VectorT<S> sig(n, S(0.0));
  for (std::size_t j = 0; j < n; ++j) {
    S s(0.0);
    for (std::size_t i = 0; i < m; ++i) s += b(i, j) * b(i, j);
    sig[j] = sqrt(s);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return value(sig[i]) > value(sig[j]);
  });

  SvdResult<S> r;
  r.u = MatrixT<S>(m, n);
  r.v = MatrixT<S>(n, n);
  r.sigma = VectorT<S>(n, S(0.0));
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t j = order[jj];
    r.sigma[jj] = sig[j];
    if (value(sig[j]) > 0.0) {
      for (std::size_t i = 0; i < m; ++i) r.u(i, jj) = b(i, j) / sig[j];
    }
    for (std::size_t i = 0; i < n; ++i) r.v(i, jj) = v(i, j);
  }
  return r;
}

/// Moore-Penrose pseudoinverse.  Singular values below rank_tol * sigma_max
/// are treated as exact zeros.
template <class S>
MatrixT<S> pseudoinverse(const MatrixT<S>& m, double rank_tol) {
  const bool tall = m.rows() >= m.cols();
  const MatrixT<S> work = tall ? m : m.transposed();
  const SvdResult<S> s = svd_jacobi_tall(work);
  const std::size_t k = s.sigma.size();
  const double smax = k == 0 ? 0.0 : value(s.sigma[0]);
  // pinv(work) = V diag(1/sigma) U^T over the retained spectrum.
  MatrixT<S> p(work.cols(), work.rows());
  for (std::size_t r = 0; r < k; ++r) {
    if (value(s.sigma[r]) <= rank_tol * smax || value(s.sigma[r]) == 0.0) continue;
    const S inv = S(1.0) / s.sigma[r];
    for (std::size_t i = 0; i < work.cols(); ++i)
      for (std::size_t j = 0; j < work.rows(); ++j)
        p(i, j) += s.v(i, r) * inv * s.u(j, r);
  }
  return tall ? p : p.transposed();
}

inline Matrix pseudoinverse_checked(const Matrix& m, double rank_tol) {
  require_finite(m, "pseudoinverse");
  return pseudoinverse(m, rank_tol);
}

/// Numeric rank at a relative tolerance.
inline std::size_t numeric_rank(const Matrix& m, double rank_tol) {
  if (m.empty()) return 0;
  const Matrix work = m.rows() >= m.cols() ? m : m.transposed();
  const auto s = svd_jacobi_tall(work);
  const double smax = s.sigma.empty() ? 0.0 : s.sigma[0];
  std::size_t r = 0;
  for (double sv : s.sigma)
    if (sv > rank_tol * smax && sv > 0.0) ++r;
  return r;
}

}  // namespace daecbf
