#include "mide/mmd.hpp"

#include <cmath>

#include "mide/errors.hpp"
#include "mide/parallel.hpp"

namespace mide::mmd {

namespace {

void check_dims(const Matrix& a, const Matrix& b) {
  if (a.empty() || b.empty()) throw InputError("mmd: empty sample");
  if (a.cols() != b.cols()) throw InputError("mmd: samples live in different dimensions");
}

// sum_i sum_j wa_i wb_j k(a_i, b_j) with per-row partials reduced pairwise.
double weighted_block(const KernelSpec& spec, const Matrix& a, std::span<const double> wa, const Matrix& b,
                      std::span<const double> wb) {
  const kernels::GramMatrix g = kernels::gram(spec, a, b);
  Vector partial(a.rows());
  parallel_for(0, a.rows(), [&](std::size_t i) {
    Vector terms(b.rows());
    for (std::size_t j = 0; j < b.rows(); ++j) terms[j] = wb[j] * g(i, j);
    partial[i] = wa[i] * pairwise_sum(terms);
  });
  return pairwise_sum(partial);
}

// Row sums of a kernel matrix over j, optionally skipping j = i.
double off_diagonal_total(const kernels::GramMatrix& g) {
  Vector partial(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.cols(); ++j)
      if (j != i) s += g(i, j);
    partial[i] = s;
  }
  return pairwise_sum(partial);
}

double cross_total(const kernels::GramMatrix& g, bool skip_diagonal) {
  Vector partial(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.cols(); ++j)
      if (!skip_diagonal || j != i) s += g(i, j);
    partial[i] = s;
  }
  return pairwise_sum(partial);
}

}  // namespace

EmbeddingTerms embedding_terms(const KernelSpec& spec, const WeightedPointCloud& a, const WeightedPointCloud& b) {
  spec.validate();
  a.validate();
  b.validate();
  check_dims(a.points, b.points);
  return {weighted_block(spec, a.points, a.weights, a.points, a.weights),
          weighted_block(spec, b.points, b.weights, b.points, b.weights),
          weighted_block(spec, a.points, a.weights, b.points, b.weights)};
}

StatisticValue mmd_biased(const KernelSpec& spec, const WeightedPointCloud& a, const WeightedPointCloud& b) {
  const double sq = embedding_terms(spec, a, b).squared_distance();
  return {std::sqrt(std::max(0.0, sq)), StatisticKind::biased_W, DiagonalConvention::v_statistic, a.size(), b.size(),
          spec};
}

double h_statistic(const KernelSpec& spec, std::span<const double> a_i, std::span<const double> a_j,
                   std::span<const double> b_i, std::span<const double> b_j) {
  // Grouped so that swapping i and j gives bitwise the same value.
  return (kernels::eval_kernel(spec, a_i, a_j) + kernels::eval_kernel(spec, b_i, b_j)) -
         (kernels::eval_kernel(spec, a_i, b_j) + kernels::eval_kernel(spec, a_j, b_i));
}

Matrix h_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  check_dims(a, b);
  if (a.rows() != b.rows()) throw InputError("h_matrix requires equal sample sizes");
  const auto kaa = kernels::gram(spec, a);
  const auto kbb = kernels::gram(spec, b);
  const auto kab = kernels::gram(spec, a, b);
  const std::size_t n = a.rows();
  Matrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) h(i, j) = (kaa(i, j) + kbb(i, j)) - (kab(i, j) + kab(j, i));
  return h;
}

StatisticValue mmd_unbiased_sq(const KernelSpec& spec, const Matrix& a, const Matrix& b,
                               DiagonalConvention convention) {
  spec.validate();
  check_dims(a, b);
  const std::size_t n = a.rows();
  const std::size_t m = b.rows();
  if (n < 2 || m < 2) throw InputError("unbiased statistic needs at least two points per sample");
  if (convention == DiagonalConvention::v_statistic)
    throw InputError("mmd_unbiased_sq: v_statistic is not an unbiased convention");

  const auto kaa = kernels::gram(spec, a);
  const auto kbb = kernels::gram(spec, b);
  const auto kab = kernels::gram(spec, a, b);
  const double sa = off_diagonal_total(kaa);
  const double sb = off_diagonal_total(kbb);
  const auto dn = static_cast<double>(n);
  const auto dm = static_cast<double>(m);

  double value = 0.0;
  if (convention == DiagonalConvention::u_statistic && n == m) {
    // h-form: cross pairs with i = j are excluded along with the diagonals.
    const double sab = cross_total(kab, true);
    value = (sa + sb - 2.0 * sab) / (dn * (dn - 1.0));
  } else if (convention == DiagonalConvention::u_statistic) {
    value = sa / (dn * (dn - 1.0)) + sb / (dm * (dm - 1.0)) - 2.0 * cross_total(kab, false) / (dn * dm);
  } else {
    value = sa / (dn * dn) + sb / (dm * dm) - 2.0 * cross_total(kab, false) / (dn * dm);
  }
  if (!std::isfinite(value)) throw NumericalError("unbiased statistic is not finite");
  return {value, StatisticKind::unbiased_S, convention, n, m, spec};
}

StatisticValue mmd_unbiased_sq(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  return mmd_unbiased_sq(spec, a, b,
                         a.rows() == b.rows() ? DiagonalConvention::u_statistic : DiagonalConvention::paper_general);
}

namespace {

struct GridSums {
  double joint_joint = 0.0;    // sum_{l,l'} Kx(l,l') Ke(l,l')
  double joint_product = 0.0;  // sum_l rowKx(l) rowKe(l)
  double product_product = 0.0;  // (sum Kx)(sum Ke)
  double kernel_diagonal = 1.0;
};

GridSums grid_sums(const KernelSpec& spec, const GridFactors& grid) {
  spec.validate();
  if (!spec.factorizes_over_blocks()) throw InputError("grid factorization needs a gaussian or laplacian kernel");
  if (grid.x.rows() != grid.eps.rows() || grid.x.empty()) throw InputError("grid factors misaligned");
  const auto kx = kernels::gram(spec, grid.x);
  const auto ke = kernels::gram(spec, grid.eps);
  const std::size_t n = grid.x.rows();
  Vector jj(n), jp(n), rx(n), re(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0, sx = 0.0, se = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s += kx(i, j) * ke(i, j);
      sx += kx(i, j);
      se += ke(i, j);
    }
    jj[i] = s;
    rx[i] = sx;
    re[i] = se;
    jp[i] = sx * se;
  }
  return {pairwise_sum(jj), pairwise_sum(jp), pairwise_sum(rx) * pairwise_sum(re), spec.diagonal()};
}

}  // namespace

StatisticValue mmd_biased_grid(const KernelSpec& spec, const GridFactors& grid) {
  const GridSums s = grid_sums(spec, grid);
  const auto n = static_cast<double>(grid.x.rows());
  const double sq = s.joint_joint / (n * n) + s.product_product / (n * n * n * n) - 2.0 * s.joint_product / (n * n * n);
  return {std::sqrt(std::max(0.0, sq)), StatisticKind::biased_W, DiagonalConvention::v_statistic, grid.x.rows(),
          grid.x.rows() * grid.x.rows(), spec};
}

StatisticValue mmd_unbiased_sq_grid(const KernelSpec& spec, const GridFactors& grid) {
  const GridSums s = grid_sums(spec, grid);
  const std::size_t n = grid.x.rows();
  const std::size_t m = n * n;
  if (n < 2) throw InputError("unbiased statistic needs at least two points per sample");
  const auto dn = static_cast<double>(n);
  const auto dm = static_cast<double>(m);
  const double within_joint = s.joint_joint - dn * s.kernel_diagonal;
  const double within_product = s.product_product - dm * s.kernel_diagonal;
  const double value = within_joint / (dn * dn) + within_product / (dm * dm) - 2.0 * s.joint_product / (dn * dm);
  return {value, StatisticKind::unbiased_S, DiagonalConvention::paper_general, n, m, spec};
}

DeviationBound deviation_bound(double kernel_bound, std::size_t n, std::size_t m, double eps) {
  if (!(kernel_bound > 0.0) || n == 0 || m == 0 || !(eps > 0.0))
    throw InputError("deviation_bound: arguments must be positive");
  const auto dn = static_cast<double>(n);
  const auto dm = static_cast<double>(m);
  const double bias = 2.0 * (std::sqrt(kernel_bound / dm) + std::sqrt(kernel_bound / dn));
  const double tail = 2.0 * std::exp(-eps * eps * dm * dn / (2.0 * kernel_bound * (dm + dn)));
  return {bias, tail};
}

double hoeffding_bound(double kernel_bound, std::size_t n, double eps) {
  if (!(kernel_bound > 0.0) || n == 0 || !(eps >= 0.0)) throw InputError("hoeffding_bound: invalid arguments");
  return std::exp(-eps * eps * static_cast<double>(n) / (8.0 * kernel_bound * kernel_bound));
}

}  // namespace mide::mmd
