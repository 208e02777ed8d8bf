#pragma once

// Gray-code Sobol sequence for deterministic low-discrepancy sampling.
// Direction numbers follow the Joe & Kuo tables for the first 16 dimensions,
// which covers every state/input space in this project.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "daecbf/matrix.hpp"

namespace daecbf {

class SobolSequence {
 public:
  explicit SobolSequence(std::size_t dim) : dim_(dim), state_(dim, 0), count_(0) {
    if (dim == 0 || dim > 16)
      throw std::invalid_argument("SobolSequence: supported dimensions are 1..16");
    struct Row {
      unsigned s, a;
      unsigned m[6];
    };
    static const Row rows[15] = {
        {1, 0, {1, 0, 0, 0, 0, 0}},    {2, 1, {1, 3, 0, 0, 0, 0}},
        {3, 1, {1, 3, 1, 0, 0, 0}},    {3, 2, {1, 1, 1, 0, 0, 0}},
        {4, 1, {1, 1, 3, 3, 0, 0}},    {4, 4, {1, 3, 5, 13, 0, 0}},
        {5, 2, {1, 1, 5, 5, 17, 0}},   {5, 4, {1, 1, 5, 5, 5, 0}},
        {5, 7, {1, 1, 7, 11, 19, 0}},  {5, 11, {1, 1, 5, 1, 1, 0}},
        {5, 13, {1, 1, 1, 3, 11, 0}},  {5, 14, {1, 3, 5, 5, 31, 0}},
        {6, 1, {1, 3, 3, 9, 7, 49}},   {6, 13, {1, 1, 1, 15, 21, 21}},
        {6, 16, {1, 3, 1, 13, 27, 49}}};

    v_.assign(dim, std::vector<std::uint32_t>(kBits, 0));
    for (std::uint32_t k = 0; k < kBits; ++k) v_[0][k] = 1u << (31 - k);
    for (std::size_t j = 1; j < dim; ++j) {
      const Row& row = rows[j - 1];
      const unsigned s = row.s;
      for (unsigned k = 0; k < s; ++k) v_[j][k] = row.m[k] << (31 - k);
      for (unsigned k = s; k < kBits; ++k) {
        std::uint32_t vk = v_[j][k - s] ^ (v_[j][k - s] >> s);
        for (unsigned l = 1; l < s; ++l)
          if ((row.a >> (s - 1 - l)) & 1u) vk ^= v_[j][k - l];
        v_[j][k] = vk;
      }
    }
  }

  std::size_t dim() const { return dim_; }

  /// Next point in [0,1)^dim.  The first emitted point is the origin.
  Vector next() {
    Vector p(dim_);
    for (std::size_t j = 0; j < dim_; ++j)
      p[j] = static_cast<double>(state_[j]) * 0x1p-32;
    // lowest zero bit of the running counter drives the gray-code update
    std::uint64_t c = count_++;
    unsigned bit = 0;
    while (c & 1u) {
      c >>= 1;
      ++bit;
    }
    for (std::size_t j = 0; j < dim_; ++j) state_[j] ^= v_[j][bit];
    return p;
  }

  void skip(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) next();
  }

 private:
  static constexpr unsigned kBits = 32;
  std::size_t dim_;
  std::vector<std::vector<std::uint32_t>> v_;
  std::vector<std::uint32_t> state_;
  std::uint64_t count_;
};

/// Affine map of a unit-cube point into [lo, hi].
inline Vector scale_to_box(const Vector& p, const Vector& lo, const Vector& hi) {
  Vector x(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) x[i] = lo[i] + p[i] * (hi[i] - lo[i]);
  return x;
}

}  // namespace daecbf
