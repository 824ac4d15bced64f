#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mide/empirical.hpp"
#include "mide/kernels.hpp"
#include "mide/linalg.hpp"
#include "mide/matrix.hpp"

namespace mide::inference {

using kernels::KernelSpec;
using linalg::eigen_symmetric;

// Weights lambda_l of the sum_l lambda_l (z_l^2 - 1) null law.
struct NullSpectrum {
  Vector lambdas;  // nonincreasing, nonnegative
  std::size_t n_x = 0;
  std::size_t n_eps = 0;
  double truncation_tol = 0.0;
  double dropped_mass = 0.0;  // sum of |lambda| removed by truncation and clamping
  bool degenerate = false;    // every eigenvalue vanished

  bool empty() const { return lambdas.empty(); }
};

// Eigenvalues of the centered Gram matrix divided by the sample size, sorted
// nonincreasing, negatives clamped to zero.
Vector gram_spectrum(const KernelSpec& spec, const Matrix& sample);

// lambda_l = lambda_l^(1) + lambda_l^(2) from the two samples, each list
// sorted nonincreasing and zero padded, truncated at 1e-10 * lambda_max.
NullSpectrum estimate_spectrum(const KernelSpec& spec, const Matrix& x_sample, const Matrix& eps_sample);

struct NullDistribution {
  Vector draws;  // sorted ascending
  std::uint64_t seed = 0;

  double quantile(double p) const;
  double mean() const;
  double variance() const;
  // (1 + #{draws >= observed}) / (1 + draws).
  double p_value(double observed) const;
};

// Draw d uses the substream (seed, d), so the sample does not depend on the
// thread count.
NullDistribution simulate_null(const NullSpectrum& spectrum, std::size_t draws, std::uint64_t seed);

// Plug-in 4(mean_i (rowmean_i)^2 - grandmean^2) over the off-diagonal entries
// of a symmetric h matrix; small negatives are clamped to zero.
double variance_sigma_s(const Matrix& h);

enum class TestMethod { spectrum_sim, gaussian_clt, hoeffding_conservative };

std::string_view to_string(TestMethod method);
TestMethod test_method_from_string(std::string_view name);

struct TestReport {
  double statistic = 0.0;  // n * S_hat
  double s_hat = 0.0;
  double p_value = 1.0;
  TestMethod method = TestMethod::spectrum_sim;
  std::vector<std::pair<double, double>> null_quantiles;  // (probability, quantile)
  std::uint64_t seed = 0;
  std::size_t draws = 0;
  std::size_t n = 0;
  double sigma_s2 = 0.0;
  KernelSpec kernel;
  std::size_t spectrum_size = 0;
  double truncation_error = 0.0;
  std::optional<NullDistribution> null;  // spectrum_sim only
};

struct TestSettings {
  std::optional<KernelSpec> kernel;  // median heuristic on the pooled sample when absent
  kernels::Family family = kernels::Family::gaussian;
  TestMethod method = TestMethod::spectrum_sim;
  std::size_t draws = 10000;
  std::uint64_t seed = 0;
};

// Two-sample test of equal distributions with paired samples of equal size,
// statistic n * S_hat (h-form).
TestReport test_two_sample(const Matrix& a, const Matrix& b, const TestSettings& settings);

// Independence of x and eps = rho(x, y, theta). The observations are shuffled
// by the seed and split in halves; the first half keeps its (x_i, eps_i)
// pairs, the second half has its eps re-paired by a seeded permutation. Under
// independence both halves are i.i.d. draws of the same law and independent
// of each other, so the two-sample null applies.
TestReport test_independence(const empirical::ResidualModel& model, const empirical::Dataset& data,
                             std::span<const double> theta, const TestSettings& settings);

// Upper quantile of n * S_hat under the simulated null for two samples of
// possibly different size; used as the stopping rule of the estimation
// scheme. Samples larger than max_points are thinned by stride for the
// spectrum estimate.
double null_quantile(const KernelSpec& spec, const Matrix& a, const Matrix& b, double level, std::size_t draws,
                     std::uint64_t seed, std::size_t max_points = 200);

// Kolmogorov distance sup_t |F_1(t) - F_2(t)| between two empirical samples.
double kolmogorov_distance(std::span<const double> a, std::span<const double> b);

}  // namespace mide::inference
