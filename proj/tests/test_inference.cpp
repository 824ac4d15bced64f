#include <doctest.h>

#include <cmath>

#include "mide/empirical.hpp"
#include "mide/errors.hpp"
#include "mide/inference.hpp"
#include "mide/kernels.hpp"
#include "mide/mmd.hpp"
#include "mide/models.hpp"
#include "mide/parallel.hpp"
#include "support.hpp"

using namespace mide;
using namespace mide::inference;
using kernels::KernelSpec;
using testing::normal_points;

TEST_CASE("spectrum closed forms") {
  const auto s = KernelSpec::gaussian(1.0);
  const Vector l = gram_spectrum(s, Matrix{{0.0}, {1.0}});
  REQUIRE(l.size() >= 1);
  CHECK(l[0] == doctest::Approx((1 - std::exp(-1.0)) / 2).epsilon(1e-14));

  const Matrix same{{2.0}, {2.0}, {2.0}};
  const auto degenerate = estimate_spectrum(s, same, same);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.empty());
  CHECK_THROWS_AS(simulate_null(degenerate, 100, 1), NumericalError);
}

TEST_CASE("spectrum trace identity and ordering") {
  Rng rng(1);
  const auto s = KernelSpec::gaussian(0.4);
  const Matrix x = normal_points(rng, 50, 2);
  const Vector l = gram_spectrum(s, x);
  const auto centered = kernels::center_gram(kernels::gram(s, x)).entries;
  double trace = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < 50; ++i) trace += centered(i, i);
  for (double v : l) sum += v;
  CHECK(std::abs(sum - trace / 50) <= 1e-10);

  const auto spec = estimate_spectrum(s, x, normal_points(rng, 40, 2));
  CHECK(std::is_sorted(spec.lambdas.rbegin(), spec.lambdas.rend()));
  for (double v : spec.lambdas) CHECK(v >= 0.0);
  CHECK(spec.lambdas.back() >= 1e-10 * spec.lambdas.front());
  CHECK_THROWS_AS(estimate_spectrum(s, Matrix{{1.0}}, x), InputError);
}

TEST_CASE("null simulation moments") {
  NullSpectrum one;
  one.lambdas = {1.0};
  const auto d1 = simulate_null(one, 10000, 3);
  CHECK(std::abs(d1.mean()) <= 0.05);
  CHECK(std::abs(d1.variance() - 2.0) <= 0.1);
  NullSpectrum two;
  two.lambdas = {1.0, 1.0};
  CHECK(std::abs(simulate_null(two, 10000, 4).variance() - 4.0) <= 0.15);

  NullSpectrum mix;
  mix.lambdas = {0.5, 0.2, 0.05};
  const auto d = simulate_null(mix, 10000, 5);
  double sq = 0.0;
  for (double l : mix.lambdas) sq += l * l;
  CHECK(std::abs(d.mean()) <= 3 * std::sqrt(2 * sq / 10000));
  CHECK(std::abs(d.variance() - 2 * sq) <= 0.1 * 2 * sq);
  CHECK(std::is_sorted(d.draws.begin(), d.draws.end()));
  CHECK(d.quantile(0.1) <= d.quantile(0.9));
  CHECK_THROWS_AS(simulate_null(mix, 0, 1), InputError);
}

TEST_CASE("null simulation is seed-determined and thread-independent") {
  NullSpectrum mix;
  mix.lambdas = {0.4, 0.3, 0.1, 0.01};
  set_thread_count(1);
  const auto a = simulate_null(mix, 5000, 9);
  set_thread_count(4);
  const auto b = simulate_null(mix, 5000, 9);
  set_thread_count(1);
  CHECK(a.draws == b.draws);
  CHECK(a.draws != simulate_null(mix, 5000, 10).draws);
}

TEST_CASE("p-value convention") {
  NullDistribution d;
  d.draws = {0.0, 1.0, 2.0, 3.0};
  CHECK(d.p_value(10.0) == doctest::Approx(1.0 / 5));
  CHECK(d.p_value(-1.0) == doctest::Approx(1.0));
  CHECK(d.p_value(2.0) == doctest::Approx(3.0 / 5));
}

TEST_CASE("sigma_s plug-in") {
  CHECK(variance_sigma_s(Matrix(5, 5, 0.7)) == 0.0);
  Matrix ident(4, 4, 0.0);
  for (std::size_t i = 0; i < 4; ++i) ident(i, i) = 1.0;
  CHECK(variance_sigma_s(ident) == 0.0);

  Rng rng(6);
  Matrix h(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j <= i; ++j) h(i, j) = h(j, i) = rng.normal();
  Vector row_mean(6, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j)
      if (i != j) row_mean[i] += h(i, j) / 5.0;
    grand += row_mean[i] / 6.0;
  }
  double sq = 0.0;
  for (double r : row_mean) sq += r * r / 6.0;
  const double expected = std::max(0.0, 4 * (sq - grand * grand));
  CHECK(std::abs(variance_sigma_s(h) - expected) <= 1e-12);
  CHECK_THROWS_AS(variance_sigma_s(Matrix{{0, 1}, {2, 0}}), InputError);
}

namespace {

empirical::Dataset linear_data(std::size_t n, std::uint64_t seed, bool dependent) {
  Rng rng(seed);
  Matrix x(n, 1), y(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = rng.normal();
    const double e = dependent ? x(i, 0) : rng.normal();
    y(i, 0) = 0.5 * x(i, 0) + e;
  }
  return empirical::Dataset(std::move(x), std::move(y));
}

}  // namespace

TEST_CASE("independence test power and determinism") {
  TestSettings s;
  s.seed = 3;
  const auto dep = test_independence(models::linear(), linear_data(100, 1, true), Vector{0.5}, s);
  CHECK(dep.p_value <= 0.01);
  CHECK(dep.method == TestMethod::spectrum_sim);
  CHECK(dep.null.has_value());
  for (std::size_t k = 1; k < dep.null_quantiles.size(); ++k)
    CHECK(dep.null_quantiles[k - 1].second <= dep.null_quantiles[k].second);

  const auto a = test_independence(models::linear(), linear_data(100, 2, false), Vector{0.5}, s);
  const auto b = test_independence(models::linear(), linear_data(100, 2, false), Vector{0.5}, s);
  CHECK(a.statistic == b.statistic);
  CHECK(a.p_value == b.p_value);
  CHECK(a.p_value >= 0.0);
  CHECK(a.p_value <= 1.0);

  s.draws = 500;
  CHECK_THROWS_AS(test_independence(models::linear(), linear_data(100, 2, false), Vector{0.5}, s), InputError);
}

TEST_CASE("gaussian and hoeffding methods") {
  TestSettings s;
  s.method = TestMethod::gaussian_clt;
  const auto g = test_independence(models::linear(), linear_data(80, 4, true), Vector{0.5}, s);
  CHECK(g.p_value >= 0.0);
  CHECK(g.p_value <= 1.0);
  CHECK(g.sigma_s2 >= 0.0);
  s.method = TestMethod::hoeffding_conservative;
  const auto h = test_independence(models::linear(), linear_data(80, 4, false), Vector{0.5}, s);
  CHECK(h.p_value > 0.0);
  CHECK(h.p_value <= 1.0);
}

TEST_CASE("two-sample p-values are roughly uniform under the null") {
  const auto spec = KernelSpec::gaussian(0.5);
  std::vector<int> deciles(10, 0);
  for (std::uint64_t r = 0; r < 200; ++r) {
    Rng rng = Rng::substream(99, r);
    const Matrix a = normal_points(rng, 40, 2), b = normal_points(rng, 40, 2);
    TestSettings s;
    s.kernel = spec;
    s.draws = 1000;
    s.seed = r;
    const double p = test_two_sample(a, b, s).p_value;
    deciles[std::min(9, static_cast<int>(p * 10))]++;
  }
  for (int c : deciles) {
    CHECK(c >= 8);
    CHECK(c <= 32);
  }
}

TEST_CASE("kolmogorov distance") {
  CHECK(kolmogorov_distance(Vector{1, 2, 3}, Vector{1, 2, 3}) == 0.0);
  CHECK(kolmogorov_distance(Vector{0, 0}, Vector{1, 1}) == 1.0);
  CHECK(kolmogorov_distance(Vector{0, 2}, Vector{1, 3}) == doctest::Approx(0.5));
}
