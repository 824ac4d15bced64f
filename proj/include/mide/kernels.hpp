#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "mide/matrix.hpp"

namespace mide::kernels {

enum class Family { gaussian, laplacian, inverse_multiquadric };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

// Kernel family and its parameters.
//   gaussian              exp(-sigma * |q - q'|_2^2)
//   laplacian             exp(-sigma * |q - q'|_1)
//   inverse_multiquadric  (sigma^2 + |q - q'|_2^2)^(-c)
struct KernelSpec {
  Family family = Family::gaussian;
  double sigma = 1.0;
  double c = 1.0;

  static KernelSpec gaussian(double sigma) { return {Family::gaussian, sigma, 1.0}; }
  static KernelSpec laplacian(double sigma) { return {Family::laplacian, sigma, 1.0}; }
  static KernelSpec inverse_multiquadric(double sigma, double c) {
    return {Family::inverse_multiquadric, sigma, c};
  }

  // Throws InputError unless sigma > 0 (and c > 0 for inverse_multiquadric).
  void validate() const;

  // Upper bound C_k: 1 for gaussian/laplacian, sigma^(-2c) otherwise.
  double bound() const;

  // k(q, q), the same for every q in all three families.
  double diagonal() const { return bound(); }

  // True when k((x, e), (x', e')) = k(x, x') * k(e, e') for block splits.
  bool factorizes_over_blocks() const { return family != Family::inverse_multiquadric; }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double eval_kernel(const KernelSpec& spec, std::span<const double> q, std::span<const double> q2);

enum class GramKind { raw, centered };

struct GramMatrix {
  Matrix entries;
  GramKind kind = GramKind::raw;

  std::size_t rows() const { return entries.rows(); }
  std::size_t cols() const { return entries.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

// entries(i, j) = k(a_i, b_j), one point per row. Rows are filled in parallel;
// each entry is computed independently.
GramMatrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);
GramMatrix gram(const KernelSpec& spec, const Matrix& a);

// Empirical double centering k_ij - rowmean_i - colmean_j + grandmean.
GramMatrix center_gram(const GramMatrix& g);

// d_k(q, q') = |k(., q) - k(., q')|_H. Radicands in [-1e-12, 0) are clamped
// to zero; anything more negative throws NumericalError.
double hilbertian_metric(const KernelSpec& spec, std::span<const double> q, std::span<const double> q2);

using Metric = std::function<double(std::span<const double>, std::span<const double>)>;

// Kernel reconstructed from a Hilbertian metric with anchor z:
// k(q, q') = (d^2(q, z) + d^2(q', z) - d^2(q, q')) / 2.
double three_point_kernel(const Metric& d, std::span<const double> q, std::span<const double> q2,
                          std::span<const double> z);

// sigma = 1 / median pairwise squared distance. At most max_points rows are
// used, taken at an even stride so the result is deterministic.
double median_heuristic_sigma(const Matrix& pooled, std::size_t max_points = 400);

KernelSpec with_median_heuristic(Family family, const Matrix& pooled, double c = 1.0);

}  // namespace mide::kernels
