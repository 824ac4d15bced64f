#include "mide/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mide/errors.hpp"
#include "mide/mmd.hpp"
#include "mide/parallel.hpp"
#include "mide/rng.hpp"

namespace mide::inference {

Vector gram_spectrum(const KernelSpec& spec, const Matrix& sample) {
  if (sample.rows() < 2) throw InputError("spectrum estimate needs at least two points");
  const auto centered = kernels::center_gram(kernels::gram(spec, sample));
  Matrix scaled = centered.entries;
  const double inv_n = 1.0 / static_cast<double>(sample.rows());
  for (auto& v : scaled.data()) v *= inv_n;
  Vector values = eigen_symmetric(scaled);
  for (auto& v : values) v = std::max(0.0, v);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

NullSpectrum estimate_spectrum(const KernelSpec& spec, const Matrix& x_sample, const Matrix& eps_sample) {
  spec.validate();
  Vector first = gram_spectrum(spec, x_sample);
  Vector second = gram_spectrum(spec, eps_sample);
  const std::size_t len = std::max(first.size(), second.size());
  first.resize(len, 0.0);
  second.resize(len, 0.0);

  NullSpectrum out;
  out.n_x = x_sample.rows();
  out.n_eps = eps_sample.rows();
  Vector combined(len);
  for (std::size_t l = 0; l < len; ++l) combined[l] = first[l] + second[l];
  const double lambda_max = combined.empty() ? 0.0 : combined.front();
  if (!(lambda_max > 0.0)) {
    out.degenerate = true;
    return out;
  }
  out.truncation_tol = 1e-10 * lambda_max;
  for (double l : combined) {
    if (l > out.truncation_tol) {
      out.lambdas.push_back(l);
    } else {
      out.dropped_mass += l;
    }
  }
  return out;
}

double NullDistribution::quantile(double p) const {
  if (draws.empty()) throw InputError("null distribution is empty");
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile probability must lie in [0, 1]");
  // Type-7 interpolation between order statistics.
  const double h = p * static_cast<double>(draws.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, draws.size() - 1);
  return draws[lo] + (h - static_cast<double>(lo)) * (draws[hi] - draws[lo]);
}

double NullDistribution::mean() const { return pairwise_sum(draws) / static_cast<double>(draws.size()); }

double NullDistribution::variance() const {
  const double mu = mean();
  Vector sq(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) sq[i] = (draws[i] - mu) * (draws[i] - mu);
  return pairwise_sum(sq) / static_cast<double>(draws.size() - 1);
}

double NullDistribution::p_value(double observed) const {
  const auto first = std::lower_bound(draws.begin(), draws.end(), observed);
  const auto at_least = static_cast<double>(std::distance(first, draws.end()));
  return (1.0 + at_least) / (1.0 + static_cast<double>(draws.size()));
}

NullDistribution simulate_null(const NullSpectrum& spectrum, std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw InputError("simulate_null needs at least one draw");
  if (spectrum.empty()) throw NumericalError("simulate_null: spectrum is empty");
  NullDistribution out;
  out.seed = seed;
  out.draws.resize(draws);
  parallel_for(0, draws, [&](std::size_t d) {
    Rng rng = Rng::substream(seed, d);
    Vector terms(spectrum.lambdas.size());
    for (std::size_t l = 0; l < terms.size(); ++l) {
      const double z = rng.normal();
      terms[l] = spectrum.lambdas[l] * (z * z - 1.0);
    }
    out.draws[d] = pairwise_sum(terms);
  });
  std::sort(out.draws.begin(), out.draws.end());
  return out;
}

double variance_sigma_s(const Matrix& h) {
  if (!h.is_square()) throw InputError("variance_sigma_s: h matrix is not square");
  const std::size_t n = h.rows();
  if (n < 2) throw InputError("variance_sigma_s needs n >= 2");
  const double scale = std::max(1.0, h.max_abs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(h(i, j) - h(j, i)) > 1e-10 * scale) throw InputError("variance_sigma_s: h matrix is not symmetric");

  Vector row_mean(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += h(i, j);
    row_mean[i] = s / static_cast<double>(n - 1);
  }
  const double grand = pairwise_sum(row_mean) / static_cast<double>(n);
  Vector sq(n);
  for (std::size_t i = 0; i < n; ++i) sq[i] = row_mean[i] * row_mean[i];
  const double value = 4.0 * (pairwise_sum(sq) / static_cast<double>(n) - grand * grand);
  if (value < -1e-10) throw NumericalError("variance_sigma_s: negative variance estimate");
  return std::max(0.0, value);
}

std::string_view to_string(TestMethod method) {
  switch (method) {
    case TestMethod::spectrum_sim: return "spectrum_sim";
    case TestMethod::gaussian_clt: return "gaussian_clt";
    case TestMethod::hoeffding_conservative: return "hoeffding_conservative";
  }
  return "unknown";
}

TestMethod test_method_from_string(std::string_view name) {
  if (name == "spectrum_sim") return TestMethod::spectrum_sim;
  if (name == "gaussian_clt") return TestMethod::gaussian_clt;
  if (name == "hoeffding_conservative") return TestMethod::hoeffding_conservative;
  throw InputError("unknown test method '" + std::string(name) + "'");
}

TestReport test_two_sample(const Matrix& a, const Matrix& b, const TestSettings& settings) {
  if (a.rows() != b.rows()) throw InputError("test_two_sample needs samples of equal size");
  if (a.rows() < 2) throw InputError("test_two_sample needs at least two observations per sample");
  if (settings.method == TestMethod::spectrum_sim && settings.draws < 1000)
    throw InputError("spectrum_sim needs at least 1000 null draws");
  const KernelSpec spec =
      settings.kernel ? *settings.kernel : kernels::with_median_heuristic(settings.family, Matrix::vconcat(a, b));
  spec.validate();

  TestReport report;
  report.method = settings.method;
  report.seed = settings.seed;
  report.kernel = spec;
  report.n = a.rows();
  report.s_hat = mmd::mmd_unbiased_sq(spec, a, b, mmd::DiagonalConvention::u_statistic).value;
  report.statistic = static_cast<double>(report.n) * report.s_hat;
  report.sigma_s2 = variance_sigma_s(mmd::h_matrix(spec, a, b));

  switch (settings.method) {
    case TestMethod::spectrum_sim: {
      const NullSpectrum spectrum = estimate_spectrum(spec, a, b);
      if (spectrum.empty()) throw NumericalError("null spectrum is degenerate (all points identical)");
      report.spectrum_size = spectrum.lambdas.size();
      report.truncation_error = spectrum.dropped_mass;
      report.draws = settings.draws;
      NullDistribution null = simulate_null(spectrum, settings.draws, settings.seed);
      report.p_value = null.p_value(report.statistic);
      for (double p : {0.5, 0.9, 0.95, 0.99}) report.null_quantiles.emplace_back(p, null.quantile(p));
      report.null = std::move(null);
      break;
    }
    case TestMethod::gaussian_clt: {
      // sqrt(n) S_hat ~ N(0, sigma_s^2) with S_H = 0 under the null.
      const double sd = std::sqrt(report.sigma_s2);
      if (sd > 0.0) {
        const double z = std::sqrt(static_cast<double>(report.n)) * report.s_hat / sd;
        report.p_value = 0.5 * std::erfc(z / std::sqrt(2.0));
        for (double p : {0.5, 0.9, 0.95, 0.99}) {
          // Normal quantile by bisection on erfc.
          double lo = -10.0, hi = 10.0;
          for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
          }
          report.null_quantiles.emplace_back(p, 0.5 * (lo + hi) * sd * std::sqrt(static_cast<double>(report.n)));
        }
      } else {
        report.p_value = report.s_hat > 0.0 ? 0.0 : 1.0;
      }
      break;
    }
    case TestMethod::hoeffding_conservative:
      report.p_value = report.s_hat > 0.0 ? mmd::hoeffding_bound(spec.bound(), report.n, report.s_hat) : 1.0;
      break;
  }
  report.p_value = std::clamp(report.p_value, 0.0, 1.0);
  return report;
}

TestReport test_independence(const empirical::ResidualModel& model, const empirical::Dataset& data,
                             std::span<const double> theta, const TestSettings& settings) {
  const std::size_t n = data.size();
  if (n < 4) throw InputError("test_independence needs at least four observations");
  const Matrix eps = empirical::residuals(model, data, theta);

  Rng rng = Rng::substream(settings.seed, 0x5eedULL);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_index(i + 1)]);
  const std::size_t half = n / 2;
  std::vector<std::size_t> repair(half);
  std::iota(repair.begin(), repair.end(), 0);
  for (std::size_t i = half - 1; i > 0; --i) std::swap(repair[i], repair[rng.uniform_index(i + 1)]);

  const std::size_t dim = data.x_dim() + eps.cols();
  Matrix a(half, dim), b(half, dim);
  for (std::size_t r = 0; r < half; ++r) {
    const std::size_t ia = order[r];
    const std::size_t ib = order[half + r];
    const std::size_t ie = order[half + repair[r]];
    auto ra = a.row(r);
    auto rb = b.row(r);
    std::copy(data.x().row(ia).begin(), data.x().row(ia).end(), ra.begin());
    std::copy(eps.row(ia).begin(), eps.row(ia).end(), ra.begin() + static_cast<std::ptrdiff_t>(data.x_dim()));
    std::copy(data.x().row(ib).begin(), data.x().row(ib).end(), rb.begin());
    std::copy(eps.row(ie).begin(), eps.row(ie).end(), rb.begin() + static_cast<std::ptrdiff_t>(data.x_dim()));
  }
  return test_two_sample(a, b, settings);
}

namespace {

Matrix thin(const Matrix& sample, std::size_t max_points) {
  if (sample.rows() <= max_points) return sample;
  const std::size_t stride = (sample.rows() + max_points - 1) / max_points;
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < sample.rows(); i += stride) rows.emplace_back(sample.row(i).begin(), sample.row(i).end());
  return Matrix::from_rows(rows);
}

}  // namespace

double null_quantile(const KernelSpec& spec, const Matrix& a, const Matrix& b, double level, std::size_t draws,
                     std::uint64_t seed, std::size_t max_points) {
  const NullSpectrum spectrum = estimate_spectrum(spec, thin(a, max_points), thin(b, max_points));
  if (spectrum.empty()) throw NumericalError("null spectrum is degenerate");
  return simulate_null(spectrum, draws, seed).quantile(level);
}

double kolmogorov_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("kolmogorov_distance: empty sample");
  Vector sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const auto na = static_cast<double>(sa.size());
  const auto nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < sa.size() || j < sb.size()) {
    double t;
    if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) {
      t = sa[i];
    } else {
      t = sb[j];
    }
    while (i < sa.size() && sa[i] <= t) ++i;
    while (j < sb.size() && sb[j] <= t) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return worst;
}

}  // namespace mide::inference
