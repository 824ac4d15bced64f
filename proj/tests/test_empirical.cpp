#include <doctest.h>

#include <limits>
#include <sstream>

#include "mide/empirical.hpp"
#include "mide/errors.hpp"
#include "mide/models.hpp"
#include "support.hpp"

using namespace mide;
using namespace mide::empirical;

namespace {

Dataset toy(std::size_t n, std::uint64_t seed = 1) {
  Rng rng(seed);
  return Dataset(testing::normal_points(rng, n, 1), testing::normal_points(rng, n, 1));
}

}  // namespace

TEST_CASE("linear residuals") {
  const auto model = models::linear();
  const Dataset d = toy(5);
  const double zero = 0.0;
  CHECK(residuals(model, d, std::span<const double>(&zero, 1)) == d.y());
  const Dataset exact(Matrix{{1.0}}, Matrix{{2.0}});
  const Vector theta{2.0};
  CHECK(residuals(model, exact, theta)(0, 0) == 0.0);
  CHECK_THROWS_AS(residuals(model, exact, Vector{1.0, 2.0}), InputError);
}

TEST_CASE("supply-demand residuals match the hand-composed system") {
  const auto model = models::supply_demand();
  const Dataset d(Matrix{{1.0, 2.0}, {0.5, -1.0}, {3.0, 0.0}}, Matrix{{4.0, 1.0}, {2.0, 2.0}, {-1.0, 0.5}});
  const Vector th{0.3, -0.2, 0.7, 0.1};
  const Matrix eps = residuals(model, d, th);
  for (std::size_t i = 0; i < 3; ++i) {
    const double z = d.x()(i, 0), w = d.x()(i, 1), q = d.y()(i, 0), p = d.y()(i, 1);
    const double demand = th[0] * z + th[1] * p;
    const double supply = th[2] * w + th[3] * q;
    CHECK(eps(i, 0) == doctest::Approx(q - demand).epsilon(1e-15));
    CHECK(eps(i, 1) == doctest::Approx(p - supply).epsilon(1e-15));
  }
}

TEST_CASE("non-finite residuals are numerical errors") {
  const Dataset d(Matrix{{0.0, 0.0}}, Matrix{{0.0, 0.0}});
  CHECK_THROWS_AS(residuals(models::experiment52(), d, Vector{2.5}), NumericalError);
  CHECK_THROWS_AS(models::by_name("nope"), InputError);
}

TEST_CASE("residuals are equivariant under permutation") {
  const auto model = models::linear();
  const Dataset d = toy(6);
  const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  const Dataset p = d.subset(perm);
  const Vector th{0.7};
  const Matrix e = residuals(model, d, th), ep = residuals(model, p, th);
  for (std::size_t k = 0; k < perm.size(); ++k) CHECK(ep(k, 0) == e(perm[k], 0));
}

TEST_CASE("joint cloud") {
  const Dataset one(Matrix{{1.0}}, Matrix{{2.0}});
  const auto c1 = joint_cloud(one, one.y());
  CHECK(c1.size() == 1);
  CHECK(c1.weights[0] == 1.0);
  CHECK(c1.points(0, 1) == 2.0);
  const auto c3 = joint_cloud(toy(3), toy(3).y());
  for (double w : c3.weights) CHECK(w == doctest::Approx(1.0 / 3));
  for (std::size_t n = 1; n <= 100; n += 9) {
    const auto c = joint_cloud(toy(n), toy(n).y());
    CHECK_NOTHROW(c.validate());
  }
  CHECK_THROWS_AS(joint_cloud(toy(3), Matrix(2, 1)), InputError);
}

TEST_CASE("product cloud modes") {
  const Dataset d2 = toy(2);
  const auto grid = product_cloud(d2, d2.y(), ProductMode::full_grid());
  CHECK(grid.size() == 4);
  for (double w : grid.weights) CHECK(w == 0.25);

  const Dataset d1 = toy(1);
  CHECK(product_cloud(d1, d1.y(), ProductMode::full_grid()).points == joint_cloud(d1, d1.y()).points);

  const Dataset d = toy(140);
  const auto r1 = product_cloud(d, d.y(), ProductMode::resample(150, 42));
  const auto r2 = product_cloud(d, d.y(), ProductMode::resample(150, 42));
  CHECK(r1.size() == 150);
  CHECK(r1.points == r2.points);
  CHECK_NOTHROW(r1.validate());
  CHECK_THROWS_AS(product_cloud(d, d.y(), ProductMode::resample(0, 1)), InputError);
}

TEST_CASE("full-grid product marginals equal F_n and G_n") {
  const Dataset d = toy(7, 4);
  const auto joint = joint_cloud(d, d.y());
  const auto grid = product_cloud(d, d.y(), ProductMode::full_grid());
  for (std::size_t i = 0; i < 7; ++i) {
    const double inf = std::numeric_limits<double>::infinity();
    const Vector tx{d.x()(i, 0), inf}, te{inf, d.y()(i, 0)};
    CHECK(empirical_cdf(grid, tx) == doctest::Approx(empirical_cdf(joint, tx)).epsilon(1e-15));
    CHECK(empirical_cdf(grid, te) == doctest::Approx(empirical_cdf(joint, te)).epsilon(1e-15));
  }
}

TEST_CASE("empirical cdf") {
  const auto c = WeightedPointCloud::uniform(Matrix{{1.0}, {2.0}, {3.0}});
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(empirical_cdf(c, Vector{inf}) == doctest::Approx(1.0));
  CHECK(empirical_cdf(c, Vector{0.0}) == 0.0);
  CHECK(empirical_cdf(c, Vector{2.0}) == doctest::Approx(2.0 / 3));
  CHECK_THROWS_AS(empirical_cdf(c, Vector{1.0, 2.0}), InputError);

  Rng rng(8);
  const auto cloud = WeightedPointCloud{testing::normal_points(rng, 30, 2), testing::random_weights(rng, 30)};
  for (int t = 0; t < 100; ++t) {
    const Vector lo{rng.normal(), rng.normal()};
    const Vector hi{lo[0] + rng.uniform(), lo[1] + rng.uniform()};
    CHECK(empirical_cdf(cloud, lo) <= empirical_cdf(cloud, hi));
  }
}

TEST_CASE("resample dataset") {
  const Dataset d = toy(10);
  CHECK(resample_dataset(d, 10, 3).x() == resample_dataset(d, 10, 3).x());
  const Dataset one(Matrix{{1.5}}, Matrix{{-2.0}});
  const auto r = resample_dataset(one, 4, 9);
  CHECK(r.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(r.x()(i, 0) == 1.5);

  const Dataset four(Matrix{{0.0}, {1.0}, {2.0}, {3.0}}, Matrix{{0.0}, {0.0}, {0.0}, {0.0}});
  const auto big = resample_dataset(four, 10000, 77);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < big.size(); ++i) zeros += big.x()(i, 0) == 0.0;
  CHECK(std::abs(zeros / 10000.0 - 0.25) <= 0.02);
  CHECK_THROWS_AS(resample_dataset(d, 0, 1), InputError);
}

TEST_CASE("dataset CSV round trip and malformed input") {
  std::istringstream good("x1,x2,y1\n1,2,3\n4.5,-1e-3,6\n");
  const Dataset d = read_dataset_csv(good);
  CHECK(d.size() == 2);
  CHECK(d.x_dim() == 2);
  CHECK(d.y()(1, 0) == 6.0);
  std::ostringstream out;
  write_dataset_csv(out, d);
  std::istringstream back(out.str());
  CHECK(read_dataset_csv(back).x() == d.x());

  std::istringstream bad_header("a,b\n1,2\n");
  CHECK_THROWS_AS(read_dataset_csv(bad_header), ParseError);
  std::istringstream bad_value("x1,y1\n1,abc\n");
  CHECK_THROWS_AS(read_dataset_csv(bad_value), ParseError);
  std::istringstream ragged("x1,y1\n1,2,3\n");
  CHECK_THROWS_AS(read_dataset_csv(ragged), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_dataset_csv(empty), ParseError);
}

TEST_CASE("point cloud CSV") {
  std::istringstream plain("a,b\n0,1\n2,3\n");
  const auto c = read_point_cloud_csv(plain);
  CHECK(c.size() == 2);
  CHECK(c.weights[0] == 0.5);
  std::istringstream weighted("p,weight\n0,0.25\n1,0.75\n");
  const auto w = read_point_cloud_csv(weighted);
  CHECK(w.dim() == 1);
  CHECK(w.weights[1] == 0.75);
}
