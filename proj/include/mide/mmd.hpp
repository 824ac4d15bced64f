#pragma once

#include <cstddef>
#include <span>

#include "mide/empirical.hpp"
#include "mide/kernels.hpp"
#include "mide/matrix.hpp"

namespace mide::mmd {

using empirical::WeightedPointCloud;
using kernels::KernelSpec;

enum class StatisticKind { biased_W, unbiased_S };

// How same-sample diagonal terms are handled by the squared statistic.
enum class DiagonalConvention {
  v_statistic,   // all pairs, weighted (biased W_H)
  u_statistic,   // h-form, 1/(n(n-1)) over i != j
  paper_general  // i != j within samples normalized by 1/n^2, all cross pairs by 1/(nm)
};

struct StatisticValue {
  double value = 0.0;
  StatisticKind kind = StatisticKind::biased_W;
  DiagonalConvention convention = DiagonalConvention::v_statistic;
  std::size_t n = 0;
  std::size_t m = 0;
  KernelSpec kernel;
};

// Weighted V-statistic estimate of |H k - P k|_H.
StatisticValue mmd_biased(const KernelSpec& spec, const WeightedPointCloud& a, const WeightedPointCloud& b);

// The three weighted V-statistic blocks sum w_i w_j k(a_i, a_j), sum v_i v_j
// k(b_i, b_j), and sum w_i v_j k(a_i, b_j).
struct EmbeddingTerms {
  double aa = 0.0;
  double bb = 0.0;
  double ab = 0.0;
  double squared_distance() const { return aa + bb - 2.0 * ab; }
};
EmbeddingTerms embedding_terms(const KernelSpec& spec, const WeightedPointCloud& a, const WeightedPointCloud& b);

// h(q_i, q_j) = k(a_i, a_j) + k(b_i, b_j) - k(a_i, b_j) - k(a_j, b_i).
double h_statistic(const KernelSpec& spec, std::span<const double> a_i, std::span<const double> a_j,
                   std::span<const double> b_i, std::span<const double> b_j);

// Full n x n matrix of h values with a zero diagonal (n = m required).
Matrix h_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b);

// Squared-distance estimate. For n = m this is the U-statistic h-form; for
// n != m it is the general form with 1/n^2 and 1/m^2 normalizations of the
// off-diagonal within-sample sums.
StatisticValue mmd_unbiased_sq(const KernelSpec& spec, const Matrix& a, const Matrix& b);

// Explicit-convention variant. u_statistic with n != m uses 1/(n(n-1)) and
// 1/(m(m-1)) within samples and excludes nothing from the cross sum; with n = m
// the cross sum also drops i = j, reproducing the h-form exactly.
StatisticValue mmd_unbiased_sq(const KernelSpec& spec, const Matrix& a, const Matrix& b,
                               DiagonalConvention convention);

// Joint cloud versus the full-grid product cloud {(x_i, e_j)} of weight 1/n^2,
// evaluated in O(n^2) through the block factorization of gaussian and
// laplacian kernels. Throws InputError for kernels that do not factor.
struct GridFactors {
  Matrix x;    // n x L
  Matrix eps;  // n x K
};
StatisticValue mmd_biased_grid(const KernelSpec& spec, const GridFactors& grid);
StatisticValue mmd_unbiased_sq_grid(const KernelSpec& spec, const GridFactors& grid);

struct DeviationBound {
  double bias = 0.0;
  double tail_prob = 0.0;
};

// Bias 2(sqrt(C/m) + sqrt(C/n)) and tail 2 exp(-eps^2 mn / (2C(m+n))).
DeviationBound deviation_bound(double kernel_bound, std::size_t n, std::size_t m, double eps);

// exp(-eps^2 n / (8 C^2)).
double hoeffding_bound(double kernel_bound, std::size_t n, double eps);

}  // namespace mide::mmd
