#include "mide/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mide/errors.hpp"

namespace mide::linalg {

Vector eigen_symmetric(const Matrix& input, const EigenOptions& options) {
  if (!input.is_square()) throw InputError("eigen_symmetric: matrix is not square");
  const std::size_t n = input.rows();
  if (n == 0) return {};
  const double scale = std::max(1.0, input.max_abs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > options.symmetry_tol * scale)
        throw InputError("eigen_symmetric: matrix is not symmetric");

  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (input(i, j) + input(j, i));

  const double target = options.off_diagonal_tol * a.frobenius_norm();
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > target) {
    if (++sweep > options.max_sweeps) throw NumericalError("eigen_symmetric: Jacobi sweeps did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rotation angle chosen to annihilate a(p, q) (Golub & Van Loan 8.5).
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
      }
    }
  }

  Vector values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

Vector cholesky_solve(const Matrix& s, const Vector& rhs) {
  if (!s.is_square() || s.rows() != rhs.size()) throw InputError("cholesky_solve: dimension mismatch");
  const std::size_t n = s.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(s(i, i)));
  const double floor = std::max(max_diag, 1e-300) * 1e-14;

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!std::isfinite(d)) throw NumericalError("cholesky_solve: non-finite pivot");
    l(j, j) = std::sqrt(std::max(d, floor));
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = rhs[i];
    for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * y[k];
    y[i] = v / l(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double v = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= l(k, ii) * x[k];
    x[ii] = v / l(ii, ii);
  }
  return x;
}

}  // namespace mide::linalg
