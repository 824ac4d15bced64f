#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mide/errors.hpp"
#include "mide/experiment.hpp"
#include "mide/inference.hpp"
#include "mide/kernels.hpp"

using namespace mide;
using namespace mide::experiment;
namespace fs = std::filesystem;

namespace {

double column_mean(const Matrix& p, std::size_t c) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) s += p(i, c);
  return s / p.rows();
}

double corr(const Matrix& p, std::size_t a, std::size_t b) {
  const double ma = column_mean(p, a), mb = column_mean(p, b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    sab += (p(i, a) - ma) * (p(i, b) - mb);
    saa += (p(i, a) - ma) * (p(i, a) - ma);
    sbb += (p(i, b) - mb) * (p(i, b) - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("joint generator moments") {
  for (double theta : {1.0, 0.5, 1.7}) {
    ExperimentDesign d;
    d.theta = theta;
    d.n = d.m = 100000;
    const auto c = generate_joint(d);
    CHECK(std::abs(column_mean(c.points, 0)) <= 0.02);
    CHECK(std::abs(column_mean(c.points, 1) + 0.5) <= 0.02);
    CHECK(std::abs(column_mean(c.points, 2)) <= 0.02);
    CHECK(std::abs(column_mean(c.points, 3) - (0.25 + theta)) <= 0.02);
    CHECK(std::abs(corr(c.points, 1, 3) - (1 - theta)) <= 0.02);
    CHECK(std::abs(corr(c.points, 0, 2)) <= 0.02);
  }
  ExperimentDesign zero;
  zero.theta = 0.0;
  zero.n = 100000;
  CHECK(corr(generate_joint(zero).points, 1, 3) >= 0.98);
}

TEST_CASE("independent generator moments") {
  for (double theta : {0.0, 1.0, 2.0}) {
    ExperimentDesign d;
    d.theta = theta;
    d.m = 100000;
    const auto c = generate_independent(d);
    CHECK(c.size() == 100000);
    CHECK(std::abs(corr(c.points, 1, 3)) <= 0.02);
    CHECK(std::abs(column_mean(c.points, 3) - (0.25 + theta)) <= 0.02);
  }
  CHECK(ExperimentDesign{}.m == 150);
  CHECK(ExperimentDesign{}.n == 140);
}

TEST_CASE("generators are seed-determined and validate theta") {
  ExperimentDesign d;
  d.seed = 12;
  CHECK(generate_joint(d).points == generate_joint(d).points);
  CHECK(generate_independent(d).points == generate_independent(d).points);
  d.theta = 2.5;
  CHECK_THROWS_AS(generate_joint(d), InputError);
}

TEST_CASE("at the true parameter both generators share one law") {
  int accepted = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ExperimentDesign d;
    d.n = d.m = 200;
    d.seed = seed;
    const auto a = generate_joint(d), b = generate_independent(d);
    inference::TestSettings s;
    s.kernel = kernels::with_median_heuristic(kernels::Family::gaussian, Matrix::vconcat(a.points, b.points));
    s.draws = 1000;
    s.seed = seed;
    accepted += inference::test_two_sample(a.points, b.points, s).p_value > 0.05;
  }
  CHECK(accepted >= 80);
}

TEST_CASE("smoothed marginal integrates to the mass") {
  const Vector w(50, 1.0 / 50);
  const Vector s = smooth_marginal(w);
  double total = 0.0;
  for (double v : s) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("figure bundle") {
  ExperimentDesign d;
  d.n = d.m = 2;
  d.seed = 4;
  const ExperimentProblem p(draw_sample(d));
  estimator::EstimationConfig c;
  c.theta_grid = {{1.0}};
  const auto r = estimator::run_scheme(p, c);
  const fs::path dir = fs::temp_directory_path() / "mide_fig_test";
  fs::remove_all(dir);
  const auto files = emit_figures(r, d, dir);
  CHECK(files.size() == 10);
  for (const auto& f : files) CHECK(fs::exists(f));

  const auto fig3 = read_lines(dir / "fig3_plan.csv");
  REQUIRE(fig3.size() == 5);
  double mass = 0.0;
  for (std::size_t k = 1; k < fig3.size(); ++k) mass += std::stod(fig3[k].substr(fig3[k].rfind(',') + 1));
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  const auto fig5 = read_lines(dir / "fig5_connections.csv");
  CHECK(fig5.size() - 1 <= r.plan->support());
  CHECK(r.plan->support() <= 3);

  const auto fig4 = read_lines(dir / "fig4_marginals.csv");
  double dh = 0.0, dp = 0.0;
  for (std::size_t k = 1; k < fig4.size(); ++k) {
    std::stringstream in(fig4[k]);
    std::string idx, a, b;
    std::getline(in, idx, ',');
    std::getline(in, a, ',');
    std::getline(in, b, ',');
    dh += std::stod(a);
    dp += std::stod(b);
  }
  CHECK(std::abs(dh - 1.0) <= 1e-9);
  CHECK(std::abs(dp - 1.0) <= 1e-9);

  estimator::EstimationResult no_plan;
  no_plan.theta_star = {1.0};
  CHECK_THROWS_AS(emit_figures(no_plan, d, dir), InputError);
  fs::remove_all(dir);
}
