#pragma once

#include <cmath>
#include <cstdint>

#include "mide/kernels.hpp"
#include "mide/matrix.hpp"
#include "mide/rng.hpp"

namespace testing {

using mide::Matrix;
using mide::Rng;
using mide::Vector;

inline Matrix normal_points(Rng& rng, std::size_t n, std::size_t d, double shift = 0.0) {
  Matrix p(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) p(i, k) = rng.normal() + shift;
  return p;
}

inline Vector random_weights(Rng& rng, std::size_t n) {
  Vector w(n);
  double s = 0.0;
  for (auto& v : w) s += (v = 0.05 + rng.uniform());
  for (auto& v : w) v /= s;
  return w;
}

inline Vector uniform_weights(std::size_t n) { return Vector(n, 1.0 / static_cast<double>(n)); }

inline Matrix random_cost(Rng& rng, std::size_t n, std::size_t m) {
  Matrix c(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c(i, j) = rng.uniform();
  return c;
}

// Plain loops straight from the definitions, no shared code with the library.
inline double k_direct(const mide::kernels::KernelSpec& s, std::span<const double> a, std::span<const double> b) {
  double sq = 0.0, l1 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sq += (a[k] - b[k]) * (a[k] - b[k]);
    l1 += std::abs(a[k] - b[k]);
  }
  switch (s.family) {
    case mide::kernels::Family::gaussian: return std::exp(-s.sigma * sq);
    case mide::kernels::Family::laplacian: return std::exp(-s.sigma * l1);
    case mide::kernels::Family::inverse_multiquadric: return std::pow(s.sigma * s.sigma + sq, -s.c);
  }
  return 0.0;
}

inline double biased_oracle(const mide::kernels::KernelSpec& s, const Matrix& a, const Vector& wa, const Matrix& b,
                            const Vector& wb) {
  long double aa = 0, bb = 0, ab = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j) aa += wa[i] * wa[j] * k_direct(s, a.row(i), a.row(j));
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) bb += wb[i] * wb[j] * k_direct(s, b.row(i), b.row(j));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) ab += wa[i] * wb[j] * k_direct(s, a.row(i), b.row(j));
  const long double sq = aa + bb - 2 * ab;
  return static_cast<double>(std::sqrt(std::max<long double>(sq, 0)));
}

// Within-sample sums over i != j normalized by 1/n^2 and 1/m^2.
inline double general_oracle(const mide::kernels::KernelSpec& s, const Matrix& a, const Matrix& b) {
  const double n = a.rows(), m = b.rows();
  long double aa = 0, bb = 0, ab = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.rows(); ++j)
      if (i != j) aa += k_direct(s, a.row(i), a.row(j));
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j)
      if (i != j) bb += k_direct(s, b.row(i), b.row(j));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) ab += k_direct(s, a.row(i), b.row(j));
  return static_cast<double>(aa / (n * n) + bb / (m * m) - 2 * ab / (n * m));
}

inline double h_form_oracle(const mide::kernels::KernelSpec& s, const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  long double total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        total += k_direct(s, a.row(i), a.row(j)) + k_direct(s, b.row(i), b.row(j)) -
                 k_direct(s, a.row(i), b.row(j)) - k_direct(s, a.row(j), b.row(i));
  return static_cast<double>(total / (static_cast<double>(n) * (n - 1)));
}

}  // namespace testing
