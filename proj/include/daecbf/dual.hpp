#pragma once

// Forward-mode dual numbers with a dynamically sized tangent.  Duals nest
// (Dual<Dual<double>>, ...) so higher-order Lie derivative chains can be
// computed by recursive seeding of an evaluator that is generic in its
// scalar type.

#include <cmath>
#include <cstddef>
#include <vector>

namespace daecbf {

template <class T>
struct Dual {
  T v{};
  std::vector<T> d;  // tangent; empty means "zero of any width"

  Dual() = default;
  Dual(double c) : v(T(c)) {}  // NOLINT: constants promote implicitly
  Dual(T value, std::vector<T> tangent) : v(std::move(value)), d(std::move(tangent)) {}

  static Dual seed(T value, std::size_t n, std::size_t i) {
    Dual r;
    r.v = std::move(value);
    r.d.assign(n, T(0.0));
    r.d[i] = T(1.0);
    return r;
  }
};

// value(): strip all tangent structure, returning the underlying double.
inline double value(double x) { return x; }
template <class T>
double value(const Dual<T>& x) {
  return value(x.v);
}

namespace detail {

template <class T>
std::size_t tangent_width(const Dual<T>& a, const Dual<T>& b) {
  return a.d.empty() ? b.d.size() : a.d.size();
}

template <class T>
T tangent_at(const std::vector<T>& d, std::size_t i) {
  return d.empty() ? T(0.0) : d[i];
}

}  // namespace detail

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v + b.v;
  const std::size_t n = detail::tangent_width(a, b);
  r.d.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    r.d.push_back(detail::tangent_at(a.d, i) + detail::tangent_at(b.d, i));
  return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v - b.v;
  const std::size_t n = detail::tangent_width(a, b);
  r.d.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    r.d.push_back(detail::tangent_at(a.d, i) - detail::tangent_at(b.d, i));
  return r;
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  Dual<T> r;
  r.v = -a.v;
  r.d.reserve(a.d.size());
  for (const auto& t : a.d) r.d.push_back(-t);
  return r;
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v * b.v;
  const std::size_t n = detail::tangent_width(a, b);
  r.d.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    r.d.push_back(detail::tangent_at(a.d, i) * b.v + a.v * detail::tangent_at(b.d, i));
  return r;
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v / b.v;
  const T inv_b2 = T(1.0) / (b.v * b.v);
  const std::size_t n = detail::tangent_width(a, b);
  r.d.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    r.d.push_back((detail::tangent_at(a.d, i) * b.v - a.v * detail::tangent_at(b.d, i)) * inv_b2);
  return r;
}

// Mixed double/Dual arithmetic.
template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return a + Dual<T>(b); }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return Dual<T>(a) + b; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return a - Dual<T>(b); }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return Dual<T>(a) - b; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return a * Dual<T>(b); }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return Dual<T>(a) * b; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return a / Dual<T>(b); }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) { return Dual<T>(a) / b; }

template <class T> Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) { return a = a + b; }
template <class T> Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) { return a = a - b; }
template <class T> Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) { return a = a * b; }
template <class T> Dual<T>& operator/=(Dual<T>& a, const Dual<T>& b) { return a = a / b; }

// Comparisons branch on values; the rank and pivot decisions made through
// them are piecewise-constant in the inputs.
template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return value(a) < value(b); }
template <class T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return value(a) > value(b); }
template <class T> bool operator<=(const Dual<T>& a, const Dual<T>& b) { return value(a) <= value(b); }
template <class T> bool operator>=(const Dual<T>& a, const Dual<T>& b) { return value(a) >= value(b); }
template <class T> bool operator<(const Dual<T>& a, double b) { return value(a) < b; }
template <class T> bool operator>(const Dual<T>& a, double b) { return value(a) > b; }

template <class T>
Dual<T> chain(const Dual<T>& x, T fv, T dfv) {
  Dual<T> r;
  r.v = std::move(fv);
  r.d.reserve(x.d.size());
  for (const auto& t : x.d) r.d.push_back(dfv * t);
  return r;
}

using std::atan;
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tan;

template <class T> Dual<T> sin(const Dual<T>& x) { return chain(x, sin(x.v), cos(x.v)); }
template <class T> Dual<T> cos(const Dual<T>& x) { return chain(x, cos(x.v), -sin(x.v)); }
template <class T> Dual<T> tan(const Dual<T>& x) {
  const T c = cos(x.v);
  return chain(x, tan(x.v), T(1.0) / (c * c));
}
template <class T> Dual<T> exp(const Dual<T>& x) {
  const T e = exp(x.v);
  return chain(x, e, e);
}
template <class T> Dual<T> log(const Dual<T>& x) { return chain(x, log(x.v), T(1.0) / x.v); }
template <class T> Dual<T> sqrt(const Dual<T>& x) {
  const T s = sqrt(x.v);
  return chain(x, s, T(0.5) / s);
}
template <class T> Dual<T> atan(const Dual<T>& x) {
  return chain(x, atan(x.v), T(1.0) / (T(1.0) + x.v * x.v));
}

using std::abs;
template <class T>
Dual<T> abs(const Dual<T>& x) {
  return value(x) < 0.0 ? -x : x;
}

/// Integer power by repeated multiplication (keeps polynomials exact).
template <class S>
S ipow(const S& x, int n) {
  S r(1.0);
  for (int i = 0; i < n; ++i) r = r * x;
  return r;
}

}  // namespace daecbf
