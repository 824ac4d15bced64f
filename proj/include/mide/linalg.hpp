#pragma once

#include "mide/matrix.hpp"

namespace mide::linalg {

struct EigenOptions {
  double symmetry_tol = 1e-10;
  double off_diagonal_tol = 1e-12;  // relative to |A|_F
  int max_sweeps = 100;
};

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
// nonincreasing. Throws InputError for non-square or asymmetric input and
// NumericalError if the sweeps do not converge.
Vector eigen_symmetric(const Matrix& a, const EigenOptions& options = {});

// Solves S x = rhs for symmetric positive definite S by Cholesky
// factorization. Pivots below tiny * max diagonal are regularized.
Vector cholesky_solve(const Matrix& s, const Vector& rhs);

}  // namespace mide::linalg
