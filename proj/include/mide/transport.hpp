#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>

#include "mide/kernels.hpp"
#include "mide/matrix.hpp"

namespace mide::transport {

enum class CostVariant {
  paper_cij,     // k(a_i, a_j) + k(b_i, b_j) - 2 k(a_i, b_j), square instances only
  hilbertian_sq  // d_k^2(a_i, b_j) = k(a_i, a_i) + k(b_j, b_j) - 2 k(a_i, b_j)
};

std::string_view to_string(CostVariant variant);
CostVariant cost_variant_from_string(std::string_view name);

struct CostMatrix {
  Matrix entries;
  CostVariant variant = CostVariant::hilbertian_sq;
  std::size_t negative_entries = 0;

  std::size_t rows() const { return entries.rows(); }
  std::size_t cols() const { return entries.cols(); }
};

CostMatrix build_cost(const kernels::KernelSpec& spec, const Matrix& a, const Matrix& b, CostVariant variant);

// Wraps an arbitrary finite cost matrix (e.g. |a_i - b_j| for 1-D checks).
CostMatrix make_cost(Matrix entries);

struct TransportPlan {
  Matrix gamma;
  double cost = 0.0;
  Vector source_weights;
  Vector target_weights;

  std::size_t support(double threshold = 0.0) const;
  Vector source_marginal() const { return gamma.row_sums(); }
  Vector target_marginal() const { return gamma.col_sums(); }
  // Largest absolute deviation of the row and column sums from the weights.
  double marginal_violation() const;
};

struct DualPotentials {
  Vector u;
  Vector v;
};

struct SimplexSolution {
  TransportPlan plan;
  DualPotentials potentials;
  std::size_t pivots = 0;
};

// Transportation simplex: northwest-corner start, Bland's entering rule, and
// a 1e-12 weight perturbation against degenerate pivots that is removed before
// the plan is returned. The result is an optimal basic solution with at most
// n + m - 1 positive entries and potentials with u_i + v_j = C_ij on the basis.
SimplexSolution solve_simplex(const CostMatrix& cost, std::span<const double> w_source,
                              std::span<const double> w_target);

// Convergence is judged by a certified relative duality gap (cost - dual) /
// (1 + cost), with dual potentials made feasible before use. Near the end the
// iterate is rounded to the vertex of its heaviest spanning tree, which is
// accepted when its own certificate meets tol. If the normal equations break
// down first (degenerate optima), the best certified interior iterate is
// accepted when its gap is at most gap_tol.
struct DikinOptions {
  double tol = 1e-9;
  std::size_t max_iter = 5000;
  double step_fraction = 0.9;
  double gap_tol = 1e-6;
};

struct DikinResult {
  TransportPlan plan;
  std::size_t iterations = 0;
  bool converged = false;
  double marginal_residual = 0.0;
  double certified_gap = 0.0;
  std::string diagnostic;
};

// Primal affine scaling started at the product coupling w_source (x) w_target.
DikinResult solve_dikin(const CostMatrix& cost, std::span<const double> w_source, std::span<const double> w_target,
                        const DikinOptions& options = {});

// primal - dual with dual objective sum u_i w_i + sum v_j w'_j. Throws
// InputError when some u_i + v_j exceeds C_ij by more than 1e-9.
double duality_gap(const TransportPlan& plan, const DualPotentials& potentials, const CostMatrix& cost,
                   std::span<const double> w_source, std::span<const double> w_target);

// Largest |u_i + v_j - C_ij| over the strictly positive plan entries.
double complementary_slackness_violation(const TransportPlan& plan, const DualPotentials& potentials,
                                         const CostMatrix& cost);

// Exact optimum by enumeration: permutation matchings for square uniform
// instances, otherwise all spanning-tree bases of the transportation polytope.
// Limited to n * m <= 25.
double brute_force_ot(const CostMatrix& cost, std::span<const double> w_source, std::span<const double> w_target);

// Equal-size, equal-weight scalar samples under |a - b| cost.
double ot_1d_sorted(std::span<const double> a, std::span<const double> b);

// CSV rows i,j,gamma,cost_ij for every entry with gamma > threshold.
void write_plan_csv(std::ostream& out, const TransportPlan& plan, const CostMatrix& cost, double threshold = 0.0);

// Weights must be nonnegative and sum to one within 1e-9 of each other.
void validate_weights(std::span<const double> w_source, std::span<const double> w_target, std::size_t n,
                      std::size_t m);

}  // namespace mide::transport
