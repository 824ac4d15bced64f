#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "mide/empirical.hpp"
#include "mide/errors.hpp"
#include "mide/estimator.hpp"
#include "mide/experiment.hpp"
#include "mide/inference.hpp"
#include "mide/mmd.hpp"
#include "mide/models.hpp"
#include "mide/parallel.hpp"
#include "mide/report.hpp"
#include "mide/rng.hpp"
#include "mide/transport.hpp"

namespace mide::cli {

namespace fs = std::filesystem;
using estimator::EstimationConfig;
using estimator::EstimationResult;
using report::format_double;

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError("config line " + std::to_string(line_no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

namespace {

struct Key {
  const char* flag;
  const char* key;
  const char* help;
};

const std::vector<Key> kCommon = {
    {"--config", "config", "key=value configuration file; flags override it"},
    {"--seed", "seed", "random seed (default 0)"},
    {"--threads", "threads", "worker threads (default: MIDE_THREADS, else all cores)"},
    {"--out", "output_dir", "output directory (default .)"},
};

const std::vector<Key> kKernel = {
    {"--kernel", "kernel.family", "gaussian | laplacian | inverse_multiquadric"},
    {"--sigma", "kernel.sigma", "kernel scale; median heuristic when absent"},
    {"--kernel-c", "kernel.c", "inverse multiquadric exponent"},
};

const std::vector<Key> kEstimate = {
    {"--data", "input_path", "dataset CSV (x1..xL,y1..yK)"},
    {"--model", "model", "linear | supply_demand | experiment52"},
    {"--objective", "objective", "unbiased_S | biased_W | transport_LP"},
    {"--method", "method", "grid | nelder_mead | scheme"},
    {"--cost", "cost_variant", "hilbertian_sq | paper_cij"},
    {"--product", "product.mode", "full_grid | resample"},
    {"--m", "product.m", "resample size"},
    {"--grid", "grid", "lo:step:hi, a comma list, or ';'-separated points"},
    {"--start", "optimizer.start", "Nelder-Mead start point (comma separated)"},
    {"--max-iter", "optimizer.max_iter", "Nelder-Mead iteration cap"},
    {"--f-tol", "optimizer.f_tol", "Nelder-Mead simplex diameter tolerance"},
    {"--step", "optimizer.step", "Nelder-Mead initial step"},
    {"--solver", "lp.solver", "simplex | dikin"},
    {"--null-level", "null.level", "stopping-rule quantile level"},
    {"--null-draws", "null.draws", "stopping-rule null draws"},
    {"--refinements", "scheme.max_refinements", "grid refinements of the scheme"},
};

const std::vector<Key> kTest = {
    {"--data", "input_path", "dataset CSV (x1..xL,y1..yK)"},
    {"--model", "model", "linear | supply_demand | experiment52"},
    {"--theta", "theta", "parameter value (comma separated)"},
    {"--method", "test.method", "spectrum_sim | gaussian_clt | hoeffding_conservative"},
    {"--draws", "test.draws", "null draws"},
};

const std::vector<Key> kTransport = {
    {"--source", "source_path", "source point cloud CSV (optional last column 'weight')"},
    {"--target", "target_path", "target point cloud CSV"},
    {"--cost", "cost_variant", "hilbertian_sq | paper_cij"},
    {"--solver", "lp.solver", "simplex | dikin"},
};

const std::vector<Key> kExperiment = {
    {"--theta0", "experiment.theta0", "true parameter of the design"},
    {"--n", "experiment.n", "joint sample size"},
    {"--m", "experiment.m", "independent sample size"},
    {"--replications", "experiment.replications", "Monte Carlo replications of the grid estimate"},
    {"--grid", "grid", "lo:step:hi or a comma list"},
    {"--method", "method", "scheme | grid"},
    {"--objective", "objective", "objective for --method grid"},
    {"--cost", "cost_variant", "hilbertian_sq | paper_cij"},
    {"--solver", "lp.solver", "simplex | dikin"},
    {"--null-level", "null.level", "stopping-rule quantile level"},
    {"--null-draws", "null.draws", "stopping-rule null draws"},
    {"--refinements", "scheme.max_refinements", "grid refinements of the scheme"},
};

const std::vector<Key> kBench = {
    {"--sizes", "bench.sizes", "comma separated sample sizes (default 50,100,200)"},
    {"--repeats", "bench.repeats", "timing repeats per size (median reported)"},
};

class Config {
 public:
  explicit Config(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string required(const std::string& key) const {
    if (!has(key)) throw InputError("missing required setting '" + key + "'");
    return values_.at(key);
  }

  double real(const std::string& key, double fallback) const {
    return has(key) ? parse_real(key, values_.at(key)) : fallback;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const std::string& text = values_.at(key);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size())
      throw InputError("setting '" + key + "' needs a nonnegative integer, got '" + text + "'");
    return static_cast<std::size_t>(v);
  }

  Vector vec(const std::string& key) const { return parse_list(key, required(key)); }

  static double parse_real(const std::string& key, const std::string& raw) {
    std::string text = raw;
    text.erase(0, text.find_first_not_of(' '));
    text.erase(text.find_last_not_of(' ') + 1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty())
      throw InputError("setting '" + key + "' needs a number, got '" + raw + "'");
    return v;
  }

  static Vector parse_list(const std::string& key, const std::string& text) {
    Vector out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_real(key, item));
    if (out.empty()) throw InputError("setting '" + key + "' is empty");
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

std::vector<Vector> parse_grid(const std::string& text, std::size_t theta_dim) {
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw InputError("grid range must read lo:step:hi");
    if (theta_dim != 1) throw InputError("grid ranges need a scalar theta; list points separated by ';'");
    return estimator::linear_grid(Config::parse_real("grid", parts[0]), Config::parse_real("grid", parts[2]),
                                  Config::parse_real("grid", parts[1]));
  }
  std::vector<Vector> out;
  if (text.find(';') != std::string::npos || theta_dim != 1) {
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) out.push_back(Config::parse_list("grid", item));
  } else {
    for (double v : Config::parse_list("grid", text)) out.push_back({v});
  }
  for (const auto& p : out)
    if (p.size() != theta_dim)
      throw InputError("grid point has dimension " + std::to_string(p.size()) + ", model expects " +
                       std::to_string(theta_dim));
  return out;
}

std::optional<kernels::KernelSpec> kernel_from(const Config& c) {
  if (!c.has("kernel.sigma")) return std::nullopt;
  kernels::KernelSpec spec{kernels::family_from_string(c.str("kernel.family", "gaussian")),
                           c.real("kernel.sigma", 1.0), c.real("kernel.c", 1.0)};
  spec.validate();
  return spec;
}

void apply_common(EstimationConfig& ec, const Config& c) {
  ec.kernel = kernel_from(c);
  ec.kernel_family = kernels::family_from_string(c.str("kernel.family", "gaussian"));
  ec.kernel_c = c.real("kernel.c", 1.0);
  if (c.has("objective")) ec.objective = estimator::objective_from_string(c.str("objective", ""));
  ec.cost_variant = transport::cost_variant_from_string(c.str("cost_variant", "hilbertian_sq"));
  ec.lp_solver = estimator::lp_solver_from_string(c.str("lp.solver", "simplex"));
  ec.null_level = c.real("null.level", ec.null_level);
  ec.null_draws = c.count("null.draws", ec.null_draws);
  ec.max_refinements = c.count("scheme.max_refinements", ec.max_refinements);
}

fs::path prepare_output(const Config& c) {
  const fs::path dir = c.str("output_dir", ".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw InputError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::string existing_file(const Config& c, const std::string& key) {
  const std::string path = c.required(key);
  if (!fs::is_regular_file(path)) throw InputError("input file '" + path + "' does not exist");
  return path;
}

void write_result(const fs::path& dir, const EstimationResult& result, const std::string& extra = {}) {
  report::write_atomic(dir / "result.txt", report::estimation_report(result) + extra);
  report::write_atomic(dir / "trace.csv", report::trace_csv(result));
  if (result.plan && result.cost) {
    std::ostringstream plan;
    transport::write_plan_csv(plan, *result.plan, *result.cost);
    report::write_atomic(dir / "plan.csv", plan.str());
  }
}

int cmd_estimate(const Config& c, std::ostream& out) {
  const std::string path = existing_file(c, "input_path");
  const auto model = models::by_name(c.required("model"));
  const fs::path dir = prepare_output(c);
  const auto data = empirical::read_dataset_csv(path);

  EstimationConfig ec;
  apply_common(ec, c);
  ec.seed = c.count("seed", 0);
  if (c.has("product.mode")) {
    const std::string mode = c.str("product.mode", "");
    if (mode == "full_grid") {
      ec.product_mode = empirical::ProductMode::full_grid();
    } else if (mode == "resample") {
      ec.product_mode = empirical::ProductMode::resample(c.count("product.m", data.size()), ec.seed);
    } else {
      throw InputError("unknown product mode '" + mode + "'");
    }
  }
  if (c.has("grid")) ec.theta_grid = parse_grid(c.str("grid", ""), model.theta_dim);
  if (c.has("optimizer.start")) ec.nelder_mead.start = c.vec("optimizer.start");
  ec.nelder_mead.max_iter = c.count("optimizer.max_iter", ec.nelder_mead.max_iter);
  ec.nelder_mead.f_tol = c.real("optimizer.f_tol", ec.nelder_mead.f_tol);
  ec.nelder_mead.initial_step = c.real("optimizer.step", ec.nelder_mead.initial_step);

  const std::string method = c.str("method", ec.theta_grid.empty() ? "nelder_mead" : "grid");
  EstimationResult result;
  if (method == "grid") {
    result = estimator::estimate_grid(model, data, ec);
  } else if (method == "nelder_mead") {
    if (ec.nelder_mead.start.empty()) throw InputError("nelder_mead needs optimizer.start");
    result = estimator::estimate_nelder_mead(model, data, ec);
  } else if (method == "scheme") {
    result = estimator::run_scheme(model, data, ec);
  } else {
    throw InputError("unknown method '" + method + "'");
  }
  write_result(dir, result);
  out << "theta_star = " << report::format_vector(result.theta_star) << '\n'
      << "objective_value = " << format_double(result.objective_value) << '\n';
  return 0;
}

int cmd_test(const Config& c, std::ostream& out) {
  const std::string path = existing_file(c, "input_path");
  const auto model = models::by_name(c.required("model"));
  const Vector theta = c.vec("theta");
  inference::TestSettings s;
  s.kernel = kernel_from(c);
  s.family = kernels::family_from_string(c.str("kernel.family", "gaussian"));
  s.method = inference::test_method_from_string(c.str("test.method", "spectrum_sim"));
  s.draws = c.count("test.draws", s.draws);
  s.seed = c.count("seed", 0);
  if (s.draws == 0) throw InputError("test.draws must be positive");
  const fs::path dir = prepare_output(c);
  const auto data = empirical::read_dataset_csv(path);

  const auto t = inference::test_independence(model, data, theta, s);
  report::write_atomic(dir / "test.txt", report::test_report(t));
  report::write_atomic(dir / "null_hist.csv", t.null ? report::null_hist_csv(*t.null) : "bin_lo,bin_hi,count\n");
  out << "statistic = " << format_double(t.statistic) << '\n' << "p_value = " << format_double(t.p_value) << '\n';
  return 0;
}

int cmd_transport(const Config& c, std::ostream& out) {
  const auto a = empirical::read_point_cloud_csv(existing_file(c, "source_path"));
  const auto b = empirical::read_point_cloud_csv(existing_file(c, "target_path"));
  const fs::path dir = prepare_output(c);
  if (a.dim() != b.dim()) throw InputError("source and target clouds have different dimensions");
  transport::validate_weights(a.weights, b.weights, a.size(), b.size());

  const auto variant = transport::cost_variant_from_string(c.str("cost_variant", "hilbertian_sq"));
  const auto solver = estimator::lp_solver_from_string(c.str("lp.solver", "simplex"));
  auto spec = kernel_from(c);
  if (!spec)
    spec = kernels::with_median_heuristic(kernels::family_from_string(c.str("kernel.family", "gaussian")),
                                          Matrix::vconcat(a.points, b.points), c.real("kernel.c", 1.0));
  const auto cost = transport::build_cost(*spec, a.points, b.points, variant);

  const auto simplex = transport::solve_simplex(cost, a.weights, b.weights);
  transport::TransportPlan plan = simplex.plan;
  std::size_t dikin_iterations = 0;
  if (solver == estimator::LpSolver::dikin) {
    auto d = transport::solve_dikin(cost, a.weights, b.weights);
    if (!d.converged) throw NumericalError("dikin solver: " + d.diagnostic);
    plan = std::move(d.plan);
    dikin_iterations = d.iterations;
  }
  // The simplex potentials give the dual bound for either primal plan.
  const double gap = transport::duality_gap(plan, simplex.potentials, cost, a.weights, b.weights);

  report::KeyValueReport r;
  r.section("transport");
  r.set("solver", std::string(estimator::to_string(solver)));
  r.set("cost_variant", std::string(transport::to_string(variant)));
  r.set("rows", plan.gamma.rows());
  r.set("cols", plan.gamma.cols());
  r.set("cost", plan.cost);
  r.set("duality_gap", gap);
  r.set("support", plan.support());
  r.set("marginal_violation", plan.marginal_violation());
  r.set("negative_cost_entries", cost.negative_entries);
  if (solver == estimator::LpSolver::simplex) {
    r.set("pivots", simplex.pivots);
  } else {
    r.set("dikin_iterations", dikin_iterations);
  }
  r.section("kernel");
  r.set("family", std::string(kernels::to_string(spec->family)));
  r.set("sigma", spec->sigma);
  if (spec->family == kernels::Family::inverse_multiquadric) r.set("c", spec->c);

  std::ostringstream csv;
  transport::write_plan_csv(csv, plan, cost);
  report::write_atomic(dir / "plan.csv", csv.str());
  report::write_atomic(dir / "transport.txt", r.render());
  out << "cost = " << format_double(plan.cost) << '\n' << "duality_gap = " << format_double(gap) << '\n';
  return 0;
}

int cmd_experiment(const Config& c, std::ostream& out) {
  experiment::ExperimentDesign design;
  design.theta = c.real("experiment.theta0", design.theta);
  design.n = c.count("experiment.n", design.n);
  design.m = c.count("experiment.m", design.m);
  design.seed = c.count("seed", 0);
  design.validate();
  const std::size_t replications = c.count("experiment.replications", 0);
  const fs::path dir = prepare_output(c);

  EstimationConfig ec = experiment::default_config(design);
  apply_common(ec, c);
  if (c.has("grid")) ec.theta_grid = parse_grid(c.str("grid", ""), 1);

  const experiment::ExperimentProblem problem(experiment::draw_sample(design));
  const std::string method = c.str("method", "scheme");
  EstimationResult result;
  if (method == "scheme") {
    result = estimator::run_scheme(problem, ec);
  } else if (method == "grid") {
    result = estimator::estimate_grid(problem, ec);
    if (!result.plan) {
      auto t = estimator::objective_transport(problem, result.theta_star, result.diagnostics.kernel, ec);
      result.diagnostics.lp_pivots = t.pivots;
      result.plan_marginals = std::make_pair(t.plan.source_marginal(), t.plan.target_marginal());
      result.cost = std::move(t.cost_matrix);
      result.plan = std::move(t.plan);
    }
  } else {
    throw InputError("unknown method '" + method + "'");
  }

  const auto joint = experiment::generate_joint(design);
  const auto independent = experiment::generate_independent(design);
  report::KeyValueReport r;
  r.section("design");
  r.set("theta0", design.theta);
  r.set("n", design.n);
  r.set("m", design.m);
  r.set("seed", std::to_string(design.seed));
  r.set("target_mean_eps2", 0.25 + design.theta);
  r.set("target_corr_x2_eps2", 1.0 - design.theta);
  auto column_mean = [](const Matrix& p, std::size_t col) {
    Vector v(p.rows());
    for (std::size_t i = 0; i < p.rows(); ++i) v[i] = p(i, col);
    return pairwise_sum(v) / static_cast<double>(p.rows());
  };
  r.set("joint_mean", format_double(column_mean(joint.points, 0)) + ' ' + format_double(column_mean(joint.points, 1)) +
                          ' ' + format_double(column_mean(joint.points, 2)) + ' ' +
                          format_double(column_mean(joint.points, 3)));
  r.set("independent_mean_eps2", column_mean(independent.points, 3));

  experiment::emit_figures(result, design, dir);
  write_result(dir, result, "\n" + r.render());

  if (replications > 0) {
    EstimationConfig rc = experiment::default_config(design);
    apply_common(rc, c);
    if (rc.objective == estimator::Objective::transport_LP) rc.objective = estimator::Objective::unbiased_S;
    if (c.has("grid")) rc.theta_grid = parse_grid(c.str("grid", ""), 1);
    const auto thetas = experiment::replicate(design, rc, replications);
    std::ostringstream csv;
    csv << "replication,seed,theta_star\n";
    for (std::size_t k = 0; k < thetas.size(); ++k)
      csv << k << ',' << design.seed + k << ',' << format_double(thetas[k]) << '\n';
    report::write_atomic(dir / "replications.csv", csv.str());
  }
  out << "theta_star = " << report::format_vector(result.theta_star) << '\n';
  return 0;
}

int cmd_bench(const Config& c, std::ostream& out) {
  std::vector<std::size_t> sizes = {50, 100, 200};
  if (c.has("bench.sizes")) {
    sizes.clear();
    for (double v : c.vec("bench.sizes")) {
      if (!(v >= 2.0) || v != std::floor(v)) throw InputError("bench sizes must be integers >= 2");
      sizes.push_back(static_cast<std::size_t>(v));
    }
  }
  const std::size_t repeats = std::max<std::size_t>(1, c.count("bench.repeats", 5));
  const std::uint64_t seed = c.count("seed", 0);
  const fs::path dir = prepare_output(c);

  std::ostringstream csv;
  csv << "operation,n,median_seconds,value\n";
  for (std::size_t n : sizes) {
    Rng rng = Rng::substream(seed, n);
    Matrix a(n, 4), b(n, 4);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < 4; ++k) a(i, k) = rng.normal(), b(i, k) = rng.normal() + 0.3;
    const auto spec = kernels::with_median_heuristic(kernels::Family::gaussian, Matrix::vconcat(a, b));
    const Vector w(n, 1.0 / static_cast<double>(n));
    const auto cost = transport::build_cost(spec, a, b, transport::CostVariant::hilbertian_sq);

    auto time = [&](const char* name, const std::function<double()>& body) {
      std::vector<double> seconds;
      double value = 0.0;
      for (std::size_t r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        value = body();
        seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      }
      std::sort(seconds.begin(), seconds.end());
      csv << name << ',' << n << ',' << format_double(seconds[seconds.size() / 2]) << ',' << format_double(value)
          << '\n';
    };
    time("gram", [&] { return kernels::gram(spec, a).entries.sum(); });
    time("s_hat", [&] { return mmd::mmd_unbiased_sq(spec, a, b).value; });
    time("simplex", [&] { return transport::solve_simplex(cost, w, w).plan.cost; });
    time("dikin", [&] {
      auto d = transport::solve_dikin(cost, w, w);
      if (!d.converged) throw NumericalError("dikin solver: " + d.diagnostic);
      return d.plan.cost;
    });
  }
  report::write_atomic(dir / "bench.csv", csv.str());
  out << csv.str();
  return 0;
}

std::set<std::string> known_keys() {
  std::set<std::string> keys;
  for (const auto* table : {&kCommon, &kKernel, &kEstimate, &kTest, &kTransport, &kExperiment, &kBench})
    for (const auto& k : *table) keys.insert(k.key);
  return keys;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimum integrated distance estimation"};
  app.require_subcommand(1);

  struct Bound {
    std::string key;
    CLI::Option* option;
    std::string* value;
  };
  std::deque<std::string> storage;
  std::vector<std::pair<CLI::App*, std::vector<Bound>>> subs;
  auto add = [&](const char* name, const char* help, std::initializer_list<const std::vector<Key>*> tables) {
    CLI::App* sub = app.add_subcommand(name, help);
    std::vector<Bound> bound;
    for (const auto* table : tables)
      for (const auto& k : *table) {
        storage.emplace_back();
        bound.push_back({k.key, sub->add_option(k.flag, storage.back(), k.help), &storage.back()});
      }
    subs.emplace_back(sub, std::move(bound));
  };
  add("estimate", "estimate theta from a dataset", {&kCommon, &kKernel, &kEstimate});
  add("test", "independence test of x and the residuals at theta", {&kCommon, &kKernel, &kTest});
  add("transport", "optimal transport between two point clouds", {&kCommon, &kKernel, &kTransport});
  add("experiment", "bivariate Gaussian experiment with figure data", {&kCommon, &kKernel, &kExperiment});
  add("bench", "timing table for the core kernels and solvers", {&kCommon, &kBench});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return 3;
  }

  try {
    for (auto& [sub, bound] : subs) {
      if (!sub->parsed()) continue;
      std::map<std::string, std::string> values;
      for (const auto& b : bound)
        if (b.key == "config" && b.option->count()) {
          std::ifstream in(*b.value);
          if (!in) throw InputError("cannot open config '" + *b.value + "'");
          std::stringstream text;
          text << in.rdbuf();
          values = parse_config_text(text.str());
          const auto keys = known_keys();
          for (const auto& [k, v] : values)
            if (!keys.count(k) || k == "config") throw InputError("unknown config key '" + k + "'");
        }
      for (const auto& b : bound)
        if (b.option->count() && b.key != "config") values[b.key] = *b.value;
      const Config config(std::move(values));

      if (config.has("threads")) {
        const std::size_t t = config.count("threads", 1);
        if (t == 0) throw InputError("threads must be positive");
        set_thread_count(t);
      } else if (!std::getenv("MIDE_THREADS")) {
        set_thread_count(std::max(1u, std::thread::hardware_concurrency()));
      }

      const std::string name = sub->get_name();
      if (name == "estimate") return cmd_estimate(config, out);
      if (name == "test") return cmd_test(config, out);
      if (name == "transport") return cmd_transport(config, out);
      if (name == "experiment") return cmd_experiment(config, out);
      return cmd_bench(config, out);
    }
  } catch (const ParseError& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  }
  return 3;
}

}  // namespace mide::cli
