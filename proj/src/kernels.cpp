#include "mide/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mide/errors.hpp"
#include "mide/parallel.hpp"

namespace mide::kernels {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::laplacian: return "laplacian";
    case Family::inverse_multiquadric: return "inverse_multiquadric";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "laplacian") return Family::laplacian;
  if (name == "inverse_multiquadric" || name == "imq") return Family::inverse_multiquadric;
  throw InputError("unknown kernel family '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("kernel sigma must be positive and finite");
  if (family == Family::inverse_multiquadric && (!(c > 0.0) || !std::isfinite(c)))
    throw InputError("inverse_multiquadric exponent c must be positive and finite");
}

double KernelSpec::bound() const {
  if (family == Family::inverse_multiquadric) return std::pow(sigma, -2.0 * c);
  return 1.0;
}

namespace {

void check_pair(std::span<const double> q, std::span<const double> q2) {
  if (q.size() != q2.size()) throw InputError("kernel arguments have different dimensions");
  if (q.empty()) throw InputError("kernel arguments must have dimension >= 1");
}

double eval_unchecked(const KernelSpec& spec, std::span<const double> q, std::span<const double> q2) {
  switch (spec.family) {
    case Family::gaussian:
      return std::exp(-spec.sigma * squared_distance(q, q2));
    case Family::laplacian: {
      double l1 = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) l1 += std::abs(q[k] - q2[k]);
      return std::exp(-spec.sigma * l1);
    }
    case Family::inverse_multiquadric:
      return std::pow(spec.sigma * spec.sigma + squared_distance(q, q2), -spec.c);
  }
  return 0.0;
}

void check_finite(const Matrix& m, const char* what) {
  for (double v : m.data())
    if (!std::isfinite(v)) throw InputError(std::string(what) + " contains non-finite coordinates");
}

}  // namespace

double eval_kernel(const KernelSpec& spec, std::span<const double> q, std::span<const double> q2) {
  check_pair(q, q2);
  for (std::size_t k = 0; k < q.size(); ++k)
    if (!std::isfinite(q[k]) || !std::isfinite(q2[k])) throw InputError("kernel argument is not finite");
  return eval_unchecked(spec, q, q2);
}

GramMatrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  if (a.empty() || b.empty()) throw InputError("gram: empty point list");
  if (a.cols() != b.cols()) throw InputError("gram: point dimension mismatch");
  if (a.cols() == 0) throw InputError("gram: points must have dimension >= 1");
  check_finite(a, "gram: first point list");
  check_finite(b, "gram: second point list");
  GramMatrix g{Matrix(a.rows(), b.rows()), GramKind::raw};
  parallel_for(0, a.rows(), [&](std::size_t i) {
    const auto ai = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) g.entries(i, j) = eval_unchecked(spec, ai, b.row(j));
  });
  return g;
}

GramMatrix gram(const KernelSpec& spec, const Matrix& a) {
  if (a.empty()) throw InputError("gram: empty point list");
  check_finite(a, "gram: point list");
  GramMatrix g{Matrix(a.rows(), a.rows()), GramKind::raw};
  parallel_for(0, a.rows(), [&](std::size_t i) {
    const auto ai = a.row(i);
    for (std::size_t j = 0; j < a.rows(); ++j) g.entries(i, j) = eval_unchecked(spec, ai, a.row(j));
  });
  // Evaluate the lower triangle from the upper one so the result is exactly symmetric.
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) g.entries(i, j) = g.entries(j, i);
  return g;
}

GramMatrix center_gram(const GramMatrix& g) {
  if (!g.entries.is_square()) throw InputError("center_gram: matrix is not square");
  const std::size_t n = g.rows();
  if (n == 0) throw InputError("center_gram: empty matrix");
  const Vector row_sum = g.entries.row_sums();
  const Vector col_sum = g.entries.col_sums();
  const double grand = pairwise_sum(row_sum) / static_cast<double>(n * n);
  const double inv_n = 1.0 / static_cast<double>(n);

  GramMatrix out{Matrix(n, n), GramKind::centered};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.entries(i, j) = g.entries(i, j) - row_sum[i] * inv_n - col_sum[j] * inv_n + grand;

  // A second sweep removes the rounding residue left in the row and column sums.
  for (int pass = 0; pass < 2; ++pass) {
    const Vector r = out.entries.row_sums();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.entries(i, j) -= r[i] * inv_n;
    const Vector c = out.entries.col_sums();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.entries(i, j) -= c[j] * inv_n;
  }
  return out;
}

double hilbertian_metric(const KernelSpec& spec, std::span<const double> q, std::span<const double> q2) {
  const double radicand = eval_kernel(spec, q, q) + eval_kernel(spec, q2, q2) - 2.0 * eval_kernel(spec, q, q2);
  if (radicand < -1e-12) throw NumericalError("hilbertian_metric: kernel is not positive definite here");
  return radicand <= 0.0 ? 0.0 : std::sqrt(radicand);
}

double three_point_kernel(const Metric& d, std::span<const double> q, std::span<const double> q2,
                          std::span<const double> z) {
  check_pair(q, q2);
  check_pair(q, z);
  const double dqz = d(q, z);
  const double dq2z = d(q2, z);
  const double dqq2 = d(q, q2);
  return 0.5 * (dqz * dqz + dq2z * dq2z - dqq2 * dqq2);
}

double median_heuristic_sigma(const Matrix& pooled, std::size_t max_points) {
  if (pooled.rows() < 2) throw InputError("median heuristic needs at least two points");
  const std::size_t stride = std::max<std::size_t>(1, (pooled.rows() + max_points - 1) / max_points);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pooled.rows(); i += stride) idx.push_back(i);

  std::vector<double> d2;
  d2.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) d2.push_back(squared_distance(pooled.row(idx[a]), pooled.row(idx[b])));
  if (d2.empty()) throw InputError("median heuristic needs at least two points");

  const std::size_t mid = d2.size() / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
  double median = d2[mid];
  if (d2.size() % 2 == 0) {
    const double lower = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) throw NumericalError("median heuristic: median pairwise distance is zero");
  return 1.0 / median;
}

KernelSpec with_median_heuristic(Family family, const Matrix& pooled, double c) {
  KernelSpec spec{family, median_heuristic_sigma(pooled), c};
  spec.validate();
  return spec;
}

}  // namespace mide::kernels
