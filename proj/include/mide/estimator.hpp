#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mide/empirical.hpp"
#include "mide/kernels.hpp"
#include "mide/mmd.hpp"
#include "mide/transport.hpp"

namespace mide::estimator {

using empirical::Dataset;
using empirical::ProductMode;
using empirical::ResidualModel;
using empirical::WeightedPointCloud;
using kernels::KernelSpec;

enum class Objective { unbiased_S, biased_W, transport_LP };
enum class LpSolver { simplex, dikin };

std::string_view to_string(Objective objective);
Objective objective_from_string(std::string_view name);
std::string_view to_string(LpSolver solver);
LpSolver lp_solver_from_string(std::string_view name);

struct NelderMeadSettings {
  Vector start;
  double initial_step = 0.25;
  std::size_t max_iter = 500;
  double f_tol = 1e-6;  // stop once the simplex diameter falls below this
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
};

struct EstimationConfig {
  std::optional<KernelSpec> kernel;  // median heuristic when absent
  kernels::Family kernel_family = kernels::Family::gaussian;
  double kernel_c = 1.0;
  Objective objective = Objective::unbiased_S;
  transport::CostVariant cost_variant = transport::CostVariant::hilbertian_sq;
  std::optional<ProductMode> product_mode;  // ProductMode::automatic when absent
  std::vector<Vector> theta_grid;
  NelderMeadSettings nelder_mead;
  LpSolver lp_solver = LpSolver::simplex;
  transport::DikinOptions dikin;
  std::uint64_t seed = 0;
  // Stopping rule of the scheme: n * S_hat at or below this null quantile.
  double null_level = 0.95;
  std::size_t null_draws = 2000;
  std::size_t max_refinements = 3;

  void validate() const;
};

// The two empirical measures compared at one theta. When `grid` is set the
// product measure is the full grid {(x_i, eps_j)} and is not materialized.
struct CloudPair {
  WeightedPointCloud joint;
  std::optional<WeightedPointCloud> product;
  std::optional<mmd::GridFactors> grid;

  // Builds the n^2-point cloud from the grid factors when needed.
  const WeightedPointCloud& product_cloud();
  std::size_t product_size() const;
};

// Supplies H_n(theta) and P(theta) for the criterion. Implementations must
// be deterministic in theta (common random numbers fixed at construction).
class Problem {
 public:
  virtual ~Problem() = default;
  virtual std::size_t theta_dim() const = 0;
  virtual CloudPair clouds(std::span<const double> theta) const = 0;
  virtual std::string description() const = 0;
};

// H_n from the observed pairs (x_i, rho(z_i, theta)) and P_n as the product of
// the empirical marginals (full grid or a resample drawn once from the seed).
class DatasetProblem : public Problem {
 public:
  DatasetProblem(ResidualModel model, Dataset data, ProductMode mode);

  std::size_t theta_dim() const override { return model_.theta_dim; }
  CloudPair clouds(std::span<const double> theta) const override;
  std::string description() const override;

  const ProductMode& mode() const { return mode_; }

 private:
  ResidualModel model_;
  Dataset data_;
  ProductMode mode_;
  empirical::ProductIndices indices_;
};

struct TraceEntry {
  Vector theta;
  double value = 0.0;
};

struct Diagnostics {
  KernelSpec kernel;
  bool median_heuristic = false;
  Objective objective = Objective::unbiased_S;
  std::string problem;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = true;
  std::size_t lp_pivots = 0;
  std::size_t dikin_iterations = 0;
  std::size_t scheme_rounds = 0;
  std::optional<double> kernel_statistic;  // S_hat(theta*)
  std::optional<double> scaled_statistic;  // n * S_hat(theta*)
  std::optional<double> null_quantile;
  std::optional<bool> accepted;
  std::vector<std::string> messages;
};

struct EstimationResult {
  Vector theta_star;
  double objective_value = 0.0;
  std::vector<TraceEntry> trace;
  std::optional<transport::TransportPlan> plan;
  std::optional<transport::CostMatrix> cost;
  std::optional<std::pair<Vector, Vector>> plan_marginals;  // (dH, dP)
  Diagnostics diagnostics;
};

// Kernel used for a run: config.kernel, or the median heuristic on the pooled
// clouds at reference_theta.
KernelSpec resolve_kernel(const Problem& problem, const EstimationConfig& config,
                          std::span<const double> reference_theta);

// S_hat or W_hat between the two clouds at theta.
double objective_kernel(const Problem& problem, std::span<const double> theta, const KernelSpec& spec,
                        Objective objective);

struct TransportEvaluation {
  double cost = 0.0;
  transport::TransportPlan plan;
  transport::CostMatrix cost_matrix;
  std::size_t pivots = 0;
  std::size_t dikin_iterations = 0;
};

// Optimal transport cost between the two clouds at theta.
TransportEvaluation objective_transport(const Problem& problem, std::span<const double> theta, const KernelSpec& spec,
                                        const EstimationConfig& config);

// Convenience overloads over a dataset; the kernel is resolved at theta.
double objective_kernel(std::span<const double> theta, const ResidualModel& model, const Dataset& data,
                        const EstimationConfig& config);
TransportEvaluation objective_transport(std::span<const double> theta, const ResidualModel& model,
                                        const Dataset& data, const EstimationConfig& config);

// Argmin of the configured objective over config.theta_grid. Ties go to the
// lexicographically smallest theta; the trace follows grid order.
EstimationResult estimate_grid(const Problem& problem, const EstimationConfig& config);
EstimationResult estimate_grid(const ResidualModel& model, const Dataset& data, const EstimationConfig& config);

// Argmin over precomputed values with the same tie rule.
std::size_t grid_argmin(const std::vector<TraceEntry>& trace);

struct NelderMeadOutcome {
  Vector best;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<TraceEntry> trace;
};

NelderMeadOutcome nelder_mead(const std::function<double(std::span<const double>)>& f,
                              const NelderMeadSettings& settings);

EstimationResult estimate_nelder_mead(const Problem& problem, const EstimationConfig& config);
EstimationResult estimate_nelder_mead(const ResidualModel& model, const Dataset& data,
                                      const EstimationConfig& config);

// Outer search over theta with an LP solve per candidate, then S_hat(theta*)
// by the kernel representation. The run stops once n * S_hat(theta*) is at
// or below the simulated null quantile; otherwise the grid is refined around
// theta* (half spacing, two steps each side) up to max_refinements times.
EstimationResult run_scheme(const Problem& problem, const EstimationConfig& config);
EstimationResult run_scheme(const ResidualModel& model, const Dataset& data, const EstimationConfig& config);

// Brown-Wegkamp criterion (1/n) sum_i [H_n(x_i, eps_i) - F_n(x_i) G_n(eps_i)]^2
// with mu the empirical measure of the sample.
double bw_baseline(std::span<const double> theta, const ResidualModel& model, const Dataset& data);

// Regular grid lo, lo + step, ..., hi (inclusive within step / 2).
std::vector<Vector> linear_grid(double lo, double hi, double step);

}  // namespace mide::estimator
