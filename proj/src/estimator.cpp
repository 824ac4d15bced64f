#include "mide/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "mide/errors.hpp"
#include "mide/inference.hpp"
#include "mide/parallel.hpp"

namespace mide::estimator {

std::string_view to_string(Objective objective) {
  switch (objective) {
    case Objective::unbiased_S: return "unbiased_S";
    case Objective::biased_W: return "biased_W";
    case Objective::transport_LP: return "transport_LP";
  }
  return "unknown";
}

Objective objective_from_string(std::string_view name) {
  if (name == "unbiased_S") return Objective::unbiased_S;
  if (name == "biased_W") return Objective::biased_W;
  if (name == "transport_LP") return Objective::transport_LP;
  throw InputError("unknown objective '" + std::string(name) + "'");
}

std::string_view to_string(LpSolver solver) { return solver == LpSolver::simplex ? "simplex" : "dikin"; }

LpSolver lp_solver_from_string(std::string_view name) {
  if (name == "simplex") return LpSolver::simplex;
  if (name == "dikin") return LpSolver::dikin;
  throw InputError("unknown LP solver '" + std::string(name) + "'");
}

void EstimationConfig::validate() const {
  if (kernel) kernel->validate();
  if (!(nelder_mead.f_tol > 0.0)) throw InputError("f_tol must be positive");
  if (nelder_mead.max_iter == 0) throw InputError("max_iter must be positive");
  if (!(null_level > 0.0 && null_level < 1.0)) throw InputError("null level must lie in (0, 1)");
  if (null_draws == 0) throw InputError("null draws must be positive");
  if (!(dikin.tol > 0.0)) throw InputError("dikin tolerance must be positive");
  for (const auto& t : theta_grid)
    if (t.size() != theta_grid.front().size()) throw InputError("theta grid points have different dimensions");
  if (product_mode && product_mode->kind == ProductMode::Kind::resample && product_mode->m == 0)
    throw InputError("resample mode needs m >= 1");
}

const WeightedPointCloud& CloudPair::product_cloud() {
  if (!product) {
    if (!grid) throw InputError("cloud pair has no product measure");
    product = empirical::product_cloud(grid->x, grid->eps,
                                       empirical::product_indices(grid->x.rows(), ProductMode::full_grid()));
  }
  return *product;
}

std::size_t CloudPair::product_size() const {
  if (product) return product->size();
  return grid ? grid->x.rows() * grid->x.rows() : 0;
}

DatasetProblem::DatasetProblem(ResidualModel model, Dataset data, ProductMode mode)
    : model_(std::move(model)), data_(std::move(data)), mode_(mode) {
  if (mode_.kind == ProductMode::Kind::resample) indices_ = empirical::product_indices(data_.size(), mode_);
}

CloudPair DatasetProblem::clouds(std::span<const double> theta) const {
  Matrix eps = empirical::residuals(model_, data_, theta);
  CloudPair pair{empirical::joint_cloud(data_.x(), eps), std::nullopt, std::nullopt};
  if (mode_.kind == ProductMode::Kind::full_grid) {
    pair.grid = mmd::GridFactors{data_.x(), std::move(eps)};
  } else {
    pair.product = empirical::product_cloud(data_.x(), eps, indices_);
  }
  return pair;
}

std::string DatasetProblem::description() const {
  std::ostringstream out;
  out << "model=" << model_.name << " n=" << data_.size() << " product=";
  if (mode_.kind == ProductMode::Kind::full_grid) {
    out << "full_grid";
  } else {
    out << "resample(m=" << mode_.m << ",seed=" << mode_.seed << ")";
  }
  return out.str();
}

namespace {

constexpr std::size_t kMaxTransportCells = 250000;

ProductMode resolve_mode(const Dataset& data, const EstimationConfig& config) {
  return config.product_mode ? *config.product_mode : ProductMode::automatic(data.size(), config.seed);
}

Matrix pooled_sample(CloudPair& pair, std::size_t max_points) {
  if (pair.product) return Matrix::vconcat(pair.joint.points, pair.product->points);
  const auto& g = *pair.grid;
  const std::size_t n = g.x.rows();
  const std::size_t total = n * n;
  const std::size_t stride = std::max<std::size_t>(1, (total + max_points - 1) / max_points);
  std::vector<Vector> rows;
  for (std::size_t k = 0; k < total; k += stride) {
    Vector p(g.x.row(k / n).begin(), g.x.row(k / n).end());
    p.insert(p.end(), g.eps.row(k % n).begin(), g.eps.row(k % n).end());
    rows.push_back(std::move(p));
  }
  return Matrix::vconcat(pair.joint.points, Matrix::from_rows(rows));
}

bool lexicographically_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::size_t total_weight_check(const transport::TransportPlan& plan) {
  return plan.gamma.rows() * plan.gamma.cols();
}

void attach_plan(EstimationResult& result, TransportEvaluation evaluation) {
  result.plan_marginals = std::make_pair(evaluation.plan.source_marginal(), evaluation.plan.target_marginal());
  result.cost = std::move(evaluation.cost_matrix);
  result.plan = std::move(evaluation.plan);
}

}  // namespace

KernelSpec resolve_kernel(const Problem& problem, const EstimationConfig& config,
                          std::span<const double> reference_theta) {
  if (config.kernel) {
    config.kernel->validate();
    return *config.kernel;
  }
  CloudPair pair = problem.clouds(reference_theta);
  return kernels::with_median_heuristic(config.kernel_family, pooled_sample(pair, 400), config.kernel_c);
}

double objective_kernel(const Problem& problem, std::span<const double> theta, const KernelSpec& spec,
                        Objective objective) {
  CloudPair pair = problem.clouds(theta);
  const bool use_grid = pair.grid && !pair.product && spec.factorizes_over_blocks();
  switch (objective) {
    case Objective::unbiased_S:
      if (use_grid) return mmd::mmd_unbiased_sq_grid(spec, *pair.grid).value;
      return mmd::mmd_unbiased_sq(spec, pair.joint.points, pair.product_cloud().points).value;
    case Objective::biased_W:
      if (use_grid) return mmd::mmd_biased_grid(spec, *pair.grid).value;
      return mmd::mmd_biased(spec, pair.joint, pair.product_cloud()).value;
    case Objective::transport_LP:
      break;
  }
  throw InputError("objective_kernel: transport_LP is evaluated by objective_transport");
}

TransportEvaluation objective_transport(const Problem& problem, std::span<const double> theta, const KernelSpec& spec,
                                        const EstimationConfig& config) {
  CloudPair pair = problem.clouds(theta);
  if (pair.joint.size() * pair.product_size() > kMaxTransportCells)
    throw InputError("transport objective: " + std::to_string(pair.joint.size()) + " x " +
                     std::to_string(pair.product_size()) +
                     " plan is too large; use resample product mode for this sample size");
  const auto& product = pair.product_cloud();
  TransportEvaluation out;
  out.cost_matrix = transport::build_cost(spec, pair.joint.points, product.points, config.cost_variant);
  if (config.lp_solver == LpSolver::simplex) {
    auto solution = transport::solve_simplex(out.cost_matrix, pair.joint.weights, product.weights);
    out.plan = std::move(solution.plan);
    out.pivots = solution.pivots;
  } else {
    auto solution = transport::solve_dikin(out.cost_matrix, pair.joint.weights, product.weights, config.dikin);
    if (!solution.converged) throw NumericalError("dikin solver: " + solution.diagnostic);
    out.plan = std::move(solution.plan);
    out.dikin_iterations = solution.iterations;
  }
  out.cost = out.plan.cost;
  if (total_weight_check(out.plan) == 0) throw NumericalError("transport objective produced an empty plan");
  return out;
}

double objective_kernel(std::span<const double> theta, const ResidualModel& model, const Dataset& data,
                        const EstimationConfig& config) {
  config.validate();
  if (config.objective == Objective::transport_LP)
    return objective_transport(theta, model, data, config).cost;
  const DatasetProblem problem(model, data, resolve_mode(data, config));
  return objective_kernel(problem, theta, resolve_kernel(problem, config, theta), config.objective);
}

TransportEvaluation objective_transport(std::span<const double> theta, const ResidualModel& model,
                                        const Dataset& data, const EstimationConfig& config) {
  config.validate();
  const DatasetProblem problem(model, data, resolve_mode(data, config));
  return objective_transport(problem, theta, resolve_kernel(problem, config, theta), config);
}

std::size_t grid_argmin(const std::vector<TraceEntry>& trace) {
  std::size_t best = trace.size();
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (!std::isfinite(trace[k].value)) continue;
    if (best == trace.size() || trace[k].value < trace[best].value ||
        (trace[k].value == trace[best].value && lexicographically_less(trace[k].theta, trace[best].theta)))
      best = k;
  }
  if (best == trace.size()) throw NumericalError("objective failed at every candidate theta");
  return best;
}

namespace {

struct GridEvaluation {
  std::vector<TraceEntry> trace;
  std::vector<std::optional<TransportEvaluation>> transports;
  std::vector<std::string> failures;
};

GridEvaluation evaluate_grid(const Problem& problem, const std::vector<Vector>& grid, const KernelSpec& spec,
                             const EstimationConfig& config, Objective objective) {
  GridEvaluation out;
  out.trace.resize(grid.size());
  out.transports.resize(grid.size());
  std::vector<std::string> failure(grid.size());
  parallel_for(0, grid.size(), [&](std::size_t k) {
    out.trace[k].theta = grid[k];
    if (grid[k].size() != problem.theta_dim())
      throw InputError("theta grid dimension does not match the model");
    try {
      if (objective == Objective::transport_LP) {
        out.transports[k] = objective_transport(problem, grid[k], spec, config);
        out.trace[k].value = out.transports[k]->cost;
      } else {
        out.trace[k].value = objective_kernel(problem, grid[k], spec, objective);
      }
    } catch (const NumericalError& e) {
      out.trace[k].value = std::numeric_limits<double>::infinity();
      failure[k] = e.what();
    }
  });
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (!failure[k].empty()) out.failures.push_back("theta index " + std::to_string(k) + ": " + failure[k]);
  return out;
}

}  // namespace

EstimationResult estimate_grid(const Problem& problem, const EstimationConfig& config) {
  config.validate();
  if (config.theta_grid.empty()) throw InputError("grid search needs a nonempty theta grid");
  const Vector& reference = config.theta_grid[config.theta_grid.size() / 2];
  const KernelSpec spec = resolve_kernel(problem, config, reference);

  GridEvaluation eval = evaluate_grid(problem, config.theta_grid, spec, config, config.objective);
  const std::size_t best = grid_argmin(eval.trace);

  EstimationResult result;
  result.theta_star = eval.trace[best].theta;
  result.objective_value = eval.trace[best].value;
  result.diagnostics.kernel = spec;
  result.diagnostics.median_heuristic = !config.kernel.has_value();
  result.diagnostics.objective = config.objective;
  result.diagnostics.problem = problem.description();
  result.diagnostics.evaluations = eval.trace.size();
  result.diagnostics.messages = eval.failures;
  if (eval.transports[best]) {
    result.diagnostics.lp_pivots = eval.transports[best]->pivots;
    result.diagnostics.dikin_iterations = eval.transports[best]->dikin_iterations;
    attach_plan(result, std::move(*eval.transports[best]));
  }
  result.trace = std::move(eval.trace);
  return result;
}

EstimationResult estimate_grid(const ResidualModel& model, const Dataset& data, const EstimationConfig& config) {
  config.validate();
  const DatasetProblem problem(model, data, resolve_mode(data, config));
  return estimate_grid(problem, config);
}

NelderMeadOutcome nelder_mead(const std::function<double(std::span<const double>)>& f,
                              const NelderMeadSettings& s) {
  const std::size_t dim = s.start.size();
  if (dim == 0) throw InputError("nelder_mead needs a start point");
  if (!(s.f_tol > 0.0)) throw InputError("f_tol must be positive");

  NelderMeadOutcome out;
  auto evaluate = [&](const Vector& x) {
    const double v = f(x);
    out.trace.push_back({x, v});
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<Vector> vertex(dim + 1, s.start);
  for (std::size_t k = 0; k < dim; ++k) vertex[k + 1][k] += s.initial_step;
  Vector value(dim + 1);
  for (std::size_t k = 0; k <= dim; ++k) value[k] = evaluate(vertex[k]);

  auto combine = [&](const Vector& base, const Vector& toward, double coef) {
    Vector out_point(dim);
    for (std::size_t k = 0; k < dim; ++k) out_point[k] = base[k] + coef * (toward[k] - base[k]);
    return out_point;
  };

  std::vector<std::size_t> order(dim + 1);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[dim - 1];

    double diameter = 0.0;
    for (std::size_t k = 0; k <= dim; ++k)
      diameter = std::max(diameter, std::sqrt(squared_distance(vertex[k], vertex[best])));
    if (diameter < s.f_tol) {
      out.converged = true;
      break;
    }
    if (out.iterations >= s.max_iter) break;
    ++out.iterations;

    Vector centroid(dim, 0.0);
    for (std::size_t k = 0; k <= dim; ++k)
      if (k != worst)
        for (std::size_t c = 0; c < dim; ++c) centroid[c] += vertex[k][c] / static_cast<double>(dim);

    const Vector reflected = combine(centroid, vertex[worst], -s.reflection);
    const double fr = evaluate(reflected);
    if (fr < value[best]) {
      const Vector expanded = combine(centroid, reflected, s.expansion);
      const double fe = evaluate(expanded);
      if (fe < fr) {
        vertex[worst] = expanded;
        value[worst] = fe;
      } else {
        vertex[worst] = reflected;
        value[worst] = fr;
      }
      continue;
    }
    if (fr < value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = fr;
      continue;
    }
    const bool outside = fr < value[worst];
    const Vector contracted = outside ? combine(centroid, reflected, s.contraction)
                                      : combine(centroid, vertex[worst], s.contraction);
    const double fc = evaluate(contracted);
    if ((outside && fc <= fr) || (!outside && fc < value[worst])) {
      vertex[worst] = contracted;
      value[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= dim; ++k) {
      if (k == best) continue;
      vertex[k] = combine(vertex[best], vertex[k], s.shrink);
      value[k] = evaluate(vertex[k]);
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k <= dim; ++k)
    if (value[k] < value[best]) best = k;
  out.best = vertex[best];
  out.value = value[best];
  return out;
}

EstimationResult estimate_nelder_mead(const Problem& problem, const EstimationConfig& config) {
  config.validate();
  if (config.nelder_mead.start.size() != problem.theta_dim())
    throw InputError("Nelder-Mead start point does not match the model's parameter dimension");
  const KernelSpec spec = resolve_kernel(problem, config, config.nelder_mead.start);

  auto f = [&](std::span<const double> theta) {
    try {
      if (config.objective == Objective::transport_LP) return objective_transport(problem, theta, spec, config).cost;
      return objective_kernel(problem, theta, spec, config.objective);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  NelderMeadOutcome nm = nelder_mead(f, config.nelder_mead);
  if (!std::isfinite(nm.value)) throw NumericalError("objective failed at every Nelder-Mead vertex");

  EstimationResult result;
  result.theta_star = nm.best;
  result.objective_value = nm.value;
  result.trace = std::move(nm.trace);
  result.diagnostics.kernel = spec;
  result.diagnostics.median_heuristic = !config.kernel.has_value();
  result.diagnostics.objective = config.objective;
  result.diagnostics.problem = problem.description();
  result.diagnostics.evaluations = result.trace.size();
  result.diagnostics.iterations = nm.iterations;
  result.diagnostics.converged = nm.converged;
  if (!nm.converged)
    result.diagnostics.messages.push_back("Nelder-Mead reached max_iter before the simplex diameter fell below f_tol");
  if (config.objective == Objective::transport_LP) {
    auto evaluation = objective_transport(problem, result.theta_star, spec, config);
    result.diagnostics.lp_pivots = evaluation.pivots;
    result.diagnostics.dikin_iterations = evaluation.dikin_iterations;
    attach_plan(result, std::move(evaluation));
  }
  return result;
}

EstimationResult estimate_nelder_mead(const ResidualModel& model, const Dataset& data,
                                      const EstimationConfig& config) {
  config.validate();
  const DatasetProblem problem(model, data, resolve_mode(data, config));
  return estimate_nelder_mead(problem, config);
}

namespace {

// Candidate points at +-1 and +-2 half-steps around center in each
// coordinate, skipping points already evaluated.
std::vector<Vector> refine_grid(const Vector& center, const Vector& half_step, const std::vector<TraceEntry>& seen) {
  std::vector<Vector> out{center};
  for (std::size_t c = 0; c < center.size(); ++c) {
    std::vector<Vector> next;
    for (const auto& p : out)
      for (int t = -2; t <= 2; ++t) {
        Vector q = p;
        q[c] += t * half_step[c];
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  std::vector<Vector> fresh;
  for (auto& p : out) {
    const bool known = std::any_of(seen.begin(), seen.end(), [&](const TraceEntry& e) {
      for (std::size_t c = 0; c < p.size(); ++c)
        if (std::abs(e.theta[c] - p[c]) > 1e-12 * (1.0 + std::abs(p[c]))) return false;
      return true;
    });
    if (!known) fresh.push_back(std::move(p));
  }
  return fresh;
}

// Smallest positive gap between distinct grid values, per coordinate.
std::optional<Vector> grid_spacing(const std::vector<Vector>& grid) {
  const std::size_t dim = grid.front().size();
  Vector spacing(dim, 0.0);
  for (std::size_t c = 0; c < dim; ++c) {
    Vector values;
    for (const auto& p : grid) values.push_back(p[c]);
    std::sort(values.begin(), values.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < values.size(); ++k) {
      const double gap = values[k] - values[k - 1];
      if (gap > 1e-12 * (1.0 + std::abs(values[k]))) best = std::min(best, gap);
    }
    if (!std::isfinite(best)) return std::nullopt;
    spacing[c] = best;
  }
  return spacing;
}

}  // namespace

EstimationResult run_scheme(const Problem& problem, const EstimationConfig& config) {
  config.validate();
  EstimationConfig lp_config = config;
  lp_config.objective = Objective::transport_LP;

  // Step 1: kernel and candidate set.
  const bool use_grid = !config.theta_grid.empty();
  const Vector reference = use_grid ? config.theta_grid[config.theta_grid.size() / 2] : config.nelder_mead.start;
  if (!use_grid && reference.size() != problem.theta_dim())
    throw InputError("scheme needs a theta grid or a Nelder-Mead start point");
  const KernelSpec spec = resolve_kernel(problem, config, reference);
  lp_config.kernel = spec;

  EstimationResult result;
  result.diagnostics.kernel = spec;
  result.diagnostics.median_heuristic = !config.kernel.has_value();
  result.diagnostics.objective = Objective::transport_LP;
  result.diagnostics.problem = problem.description();

  std::vector<Vector> candidates = config.theta_grid;
  std::optional<Vector> spacing = use_grid ? grid_spacing(candidates) : std::nullopt;
  std::optional<TransportEvaluation> best_transport;
  double best_value = std::numeric_limits<double>::infinity();

  for (std::size_t round = 0;; ++round) {
    result.diagnostics.scheme_rounds = round + 1;
    // Step 2: LP per candidate theta, theta* = argmin of the transport cost.
    if (use_grid) {
      GridEvaluation eval = evaluate_grid(problem, candidates, spec, lp_config, Objective::transport_LP);
      result.diagnostics.messages.insert(result.diagnostics.messages.end(), eval.failures.begin(),
                                         eval.failures.end());
      const std::size_t offset = result.trace.size();
      for (auto& e : eval.trace) result.trace.push_back(e);
      const std::size_t best = grid_argmin(result.trace);
      if (best >= offset && eval.transports[best - offset]) best_transport = std::move(eval.transports[best - offset]);
      result.theta_star = result.trace[best].theta;
      best_value = result.trace[best].value;
    } else {
      EstimationResult nm = estimate_nelder_mead(problem, lp_config);
      result.trace.insert(result.trace.end(), nm.trace.begin(), nm.trace.end());
      result.theta_star = nm.theta_star;
      best_value = nm.objective_value;
      best_transport = objective_transport(problem, result.theta_star, spec, lp_config);
      result.diagnostics.converged = nm.diagnostics.converged;
    }
    if (!best_transport) best_transport = objective_transport(problem, result.theta_star, spec, lp_config);

    // Step 3: S_hat(theta*) by the kernel representation and the stopping rule.
    try {
      CloudPair pair = problem.clouds(result.theta_star);
      const double s_hat = objective_kernel(problem, result.theta_star, spec, Objective::unbiased_S);
      const double scaled = static_cast<double>(pair.joint.size()) * s_hat;
      const double quantile = inference::null_quantile(spec, pair.joint.points, pair.product_cloud().points,
                                                       config.null_level, config.null_draws, config.seed);
      result.diagnostics.kernel_statistic = s_hat;
      result.diagnostics.scaled_statistic = scaled;
      result.diagnostics.null_quantile = quantile;
      result.diagnostics.accepted = scaled <= quantile;
    } catch (const std::exception& e) {
      result.diagnostics.messages.push_back(std::string("stopping rule unavailable: ") + e.what());
      result.diagnostics.accepted.reset();
      break;
    }
    if (*result.diagnostics.accepted) break;
    if (!use_grid || !spacing || round >= config.max_refinements) {
      result.diagnostics.messages.push_back("search space exhausted before the statistic reached the null quantile");
      break;
    }
    Vector half = *spacing;
    for (auto& h : half) h *= 0.5;
    spacing = half;
    candidates = refine_grid(result.theta_star, half, result.trace);
    if (candidates.empty()) {
      result.diagnostics.messages.push_back("search space exhausted before the statistic reached the null quantile");
      break;
    }
  }

  result.objective_value = best_value;
  result.diagnostics.evaluations = result.trace.size();
  result.diagnostics.lp_pivots = best_transport->pivots;
  result.diagnostics.dikin_iterations = best_transport->dikin_iterations;
  attach_plan(result, std::move(*best_transport));
  return result;
}

EstimationResult run_scheme(const ResidualModel& model, const Dataset& data, const EstimationConfig& config) {
  config.validate();
  EstimationConfig adjusted = config;
  if (!adjusted.product_mode) {
    // The LP runs on a materialized product cloud, which the full grid makes
    // quadratic in n; switch to resampling once the plan gets large.
    const std::size_t n = data.size();
    adjusted.product_mode = n * n * n <= kMaxTransportCells ? ProductMode::full_grid()
                                                             : ProductMode::resample(n, config.seed);
  }
  const DatasetProblem problem(model, data, *adjusted.product_mode);
  return run_scheme(problem, adjusted);
}

double bw_baseline(std::span<const double> theta, const ResidualModel& model, const Dataset& data) {
  const Matrix eps = empirical::residuals(model, data, theta);
  const std::size_t n = data.size();
  const Matrix& x = data.x();
  auto leq = [](std::span<const double> a, std::span<const double> b) {
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k] > b[k]) return false;
    return true;
  };
  Vector terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t f = 0, g = 0, h = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool xj = leq(x.row(j), x.row(i));
      const bool ej = leq(eps.row(j), eps.row(i));
      f += xj;
      g += ej;
      h += xj && ej;
    }
    const double dn = static_cast<double>(n);
    const double diff = static_cast<double>(h) / dn - (static_cast<double>(f) / dn) * (static_cast<double>(g) / dn);
    terms[i] = diff * diff;
  }
  return pairwise_sum(terms) / static_cast<double>(n);
}

std::vector<Vector> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw InputError("grid needs step > 0 and hi >= lo");
  std::vector<Vector> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
  for (std::size_t k = 0; k <= count; ++k) {
    double v = lo + static_cast<double>(k) * step;
    v = std::round(v * 1e12) / 1e12;
    out.push_back({v});
  }
  return out;
}

}  // namespace mide::estimator
