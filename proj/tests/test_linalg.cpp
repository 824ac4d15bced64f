#include <doctest.h>

#include "mide/errors.hpp"
#include "mide/linalg.hpp"
#include "support.hpp"

using namespace mide;
using linalg::eigen_symmetric;

TEST_CASE("eigen_symmetric closed forms") {
  CHECK(eigen_symmetric(Matrix{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == Vector{1, 1, 1});
  CHECK(eigen_symmetric(Matrix{{3, 0, 0}, {0, 1, 0}, {0, 0, 2}}) == Vector{3, 2, 1});
  const Vector ev = eigen_symmetric(Matrix{{2, 1}, {1, 2}});
  CHECK(ev[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigen_symmetric rejects asymmetric input") {
  CHECK_THROWS_AS(eigen_symmetric(Matrix{{1, 2}, {0, 1}}), InputError);
  CHECK_THROWS_AS(eigen_symmetric(Matrix(2, 3)), InputError);
}

TEST_CASE("trace identity on random symmetric matrices") {
  Rng rng(1);
  for (std::size_t n : {1u, 2u, 5u, 17u, 40u}) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
    const Vector ev = eigen_symmetric(a);
    double trace = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += a(i, i);
    for (double v : ev) sum += v;
    CHECK(std::abs(trace - sum) <= 1e-10 * a.frobenius_norm());
    CHECK(std::is_sorted(ev.rbegin(), ev.rend()));
  }
}

TEST_CASE("cholesky_solve") {
  const Matrix s{{4, 1, 0}, {1, 3, 1}, {0, 1, 2}};
  const Vector x = linalg::cholesky_solve(s, Vector{1, 2, 3});
  for (std::size_t i = 0; i < 3; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < 3; ++j) r += s(i, j) * x[j];
    CHECK(r == doctest::Approx(static_cast<double>(i + 1)).epsilon(1e-13));
  }
}
