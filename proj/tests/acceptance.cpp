// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "mide/experiment.hpp"
#include "mide/inference.hpp"
#include "mide/mmd.hpp"
#include "mide/models.hpp"
#include "mide/parallel.hpp"
#include "mide/transport.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace mide;
using kernels::KernelSpec;
using testing::normal_points;
using testing::random_cost;
using testing::random_weights;
using testing::uniform_weights;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

Outcome ot_oracles() {
  Rng rng(101);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.uniform_index(5), m = 1 + rng.uniform_index(5);
    const auto cost = transport::make_cost(random_cost(rng, n, m));
    const Vector ws = random_weights(rng, n), wt = random_weights(rng, m);
    const double s = transport::solve_simplex(cost, ws, wt).plan.cost;
    worst = std::max(worst, std::abs(s - transport::brute_force_ot(cost, ws, wt)));
  }
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.uniform_index(30);
    Vector a(n), b(n);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal() + 0.5;
    Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = std::abs(a[i] - b[j]);
    const double s =
        transport::solve_simplex(transport::make_cost(c), uniform_weights(n), uniform_weights(n)).plan.cost;
    worst = std::max(worst, std::abs(s - transport::ot_1d_sorted(a, b)));
  }
  return {worst <= 1e-10, "max cost difference " + fmt("%.3g", worst)};
}

Outcome duality() {
  Rng rng(102);
  double gap = 0.0, slack = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.uniform_index(49), m = 2 + rng.uniform_index(49);
    const auto cost = transport::make_cost(random_cost(rng, n, m));
    const Vector ws = random_weights(rng, n), wt = random_weights(rng, m);
    const auto s = transport::solve_simplex(cost, ws, wt);
    gap = std::max(gap, std::abs(transport::duality_gap(s.plan, s.potentials, cost, ws, wt)) /
                            std::max(1.0, std::abs(s.plan.cost)));
    slack = std::max(slack, transport::complementary_slackness_violation(s.plan, s.potentials, cost));
  }
  return {gap <= 1e-8 && slack <= 1e-9,
          "max relative gap " + fmt("%.3g", gap) + ", max slackness violation " + fmt("%.3g", slack)};
}

Outcome dikin_vs_simplex() {
  Rng rng(103);
  double worst = 0.0;
  std::size_t failures = 0;
  for (int t = 0; t < 50; ++t) {
    const auto cost = transport::build_cost(KernelSpec::gaussian(0.5), normal_points(rng, 20, 2),
                                            normal_points(rng, 20, 2, 0.3), transport::CostVariant::hilbertian_sq);
    const Vector ws = random_weights(rng, 20), wt = random_weights(rng, 20);
    const double exact = transport::solve_simplex(cost, ws, wt).plan.cost;
    const auto d = transport::solve_dikin(cost, ws, wt);
    failures += !d.converged;
    worst = std::max(worst, std::abs(d.plan.cost - exact) / std::max(std::abs(exact), 1e-300));
  }
  return {worst <= 1e-5 && failures == 0,
          "max relative gap " + fmt("%.3g", worst) + ", non-converged " + std::to_string(failures)};
}

Outcome statistics() {
  Rng rng(104);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.uniform_index(11);
    const std::size_t m = t % 2 ? n : 2 + rng.uniform_index(11);
    const auto spec = KernelSpec::gaussian(0.2 + rng.uniform());
    const Matrix a = normal_points(rng, n, 2), b = normal_points(rng, m, 2, 0.4);
    const Vector wa = random_weights(rng, n), wb = random_weights(rng, m);
    const double biased = mmd::mmd_biased(spec, {a, wa}, {b, wb}).value;
    worst = std::max(worst, std::abs(biased - testing::biased_oracle(spec, a, wa, b, wb)));
    const double unbiased = mmd::mmd_unbiased_sq(spec, a, b).value;
    const double oracle = n == m ? testing::h_form_oracle(spec, a, b) : testing::general_oracle(spec, a, b);
    worst = std::max(worst, std::abs(unbiased - oracle));
  }
  const Matrix same = normal_points(rng, 12, 3);
  const double zero = mmd::mmd_unbiased_sq(KernelSpec::gaussian(0.7), same, same).value;
  return {worst <= 1e-12 && zero == 0.0,
          "max oracle difference " + fmt("%.3g", worst) + ", h-form on equal samples " + fmt("%.3g", zero)};
}

Outcome sandwich() {
  Rng rng(105);
  double low = -1e300, high = -1e300;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng.uniform_index(29);
    const auto spec = KernelSpec::gaussian(0.1 + rng.uniform());
    const Matrix a = normal_points(rng, n, 2), b = normal_points(rng, n, 2, rng.uniform());
    auto sq = transport::build_cost(spec, a, b, transport::CostVariant::hilbertian_sq);
    for (double& v : sq.entries.data()) v = std::sqrt(std::max(v, 0.0));
    const double w = transport::solve_simplex(sq, uniform_weights(n), uniform_weights(n)).plan.cost;
    const double wh = mmd::mmd_biased(spec, empirical::WeightedPointCloud::uniform(a),
                                      empirical::WeightedPointCloud::uniform(b))
                          .value;
    low = std::max(low, wh - w);
    high = std::max(high, w - std::sqrt(wh * wh + 2.0));
  }
  return {low <= 1e-9 && high <= 1e-9,
          "max(W_H - W) " + fmt("%.3g", low) + ", max(W - upper) " + fmt("%.3g", high)};
}

Outcome null_distribution() {
  experiment::ExperimentDesign d;
  d.n = d.m = 200;
  d.seed = 50000;
  const auto ref_a = experiment::generate_joint(d).points, ref_b = experiment::generate_independent(d).points;
  const auto spec = kernels::with_median_heuristic(kernels::Family::gaussian, Matrix::vconcat(ref_a, ref_b));
  const auto null = inference::simulate_null(inference::estimate_spectrum(spec, ref_a, ref_b), 10000, 7);

  Vector stats(500);
  parallel_for(0, stats.size(), [&](std::size_t r) {
    experiment::ExperimentDesign dr = d;
    dr.seed = r;
    const auto a = experiment::generate_joint(dr).points, b = experiment::generate_independent(dr).points;
    stats[r] = 200.0 * mmd::mmd_unbiased_sq(spec, a, b, mmd::DiagonalConvention::u_statistic).value;
  });
  const double ks = inference::kolmogorov_distance(stats, null.draws);
  return {ks <= 0.1, "Kolmogorov distance " + fmt("%.4f", ks)};
}

Outcome test_size() {
  const auto model = models::experiment52();
  std::vector<int> rejected(200, 0);
  parallel_for(0, rejected.size(), [&](std::size_t s) {
    experiment::ExperimentDesign d;
    d.n = 100;
    d.seed = s;
    inference::TestSettings settings;
    settings.draws = 1000;
    settings.seed = s;
    const auto r = inference::test_independence(model, experiment::draw_sample(d).joint, Vector{1.0}, settings);
    rejected[s] = r.p_value <= 0.05;
  });
  double freq = 0.0;
  for (int r : rejected) freq += r;
  freq /= 200.0;
  return {freq >= 0.01 && freq <= 0.12, "rejection frequency " + fmt("%.3f", freq)};
}

double median_error(std::size_t n, std::size_t m) {
  experiment::ExperimentDesign d;
  d.n = n;
  d.m = m;
  const auto thetas = experiment::replicate(d, experiment::default_config(d), 50);
  std::vector<double> err;
  for (double t : thetas) err.push_back(std::abs(t - 1.0));
  return median(err);
}

Outcome recovery() {
  const double e = median_error(140, 150);
  return {e <= 0.2, "median |theta* - 1| " + fmt("%.3f", e)};
}

Outcome consistency() {
  std::vector<double> med;
  std::string detail = "median |theta* - 1| at n = 35, 70, 140:";
  for (std::size_t n : {35, 70, 140}) {
    med.push_back(median_error(n, static_cast<std::size_t>(std::lround(n * 150.0 / 140.0))));
    detail += " " + fmt("%.3f", med.back());
  }
  int hard = 0, soft = 0;
  for (std::size_t k = 1; k < med.size(); ++k) {
    if (med[k] <= med[k - 1]) continue;
    (med[k] <= 1.1 * med[k - 1] ? soft : hard) += 1;
  }
  return {hard == 0 && soft <= 1, detail};
}

Outcome plan_structure() {
  experiment::ExperimentDesign d;
  const experiment::ExperimentProblem problem(experiment::draw_sample(d));
  const auto r = estimator::run_scheme(problem, experiment::default_config(d));
  if (!r.plan || !r.plan_marginals) return {false, "no plan at theta*"};
  const std::size_t support = r.plan->support();
  const auto& [dh, dp] = *r.plan_marginals;
  double sh = 0.0, sp = 0.0, ratio = 0.0;
  for (const auto* w : {&dh, &dp}) {
    double lo = 1e300, hi = 0.0;
    for (double v : *w)
      if (v > 0.0) lo = std::min(lo, v), hi = std::max(hi, v);
    ratio = std::max(ratio, hi / lo);
  }
  sh = pairwise_sum(dh);
  sp = pairwise_sum(dp);
  const double sum_err = std::max(std::abs(sh - 1.0), std::abs(sp - 1.0));
  const bool pass = support <= d.n + d.m - 1 && sum_err <= 1e-9 && ratio > 1.5;
  return {pass, "theta* " + fmt("%g", r.theta_star[0]) + ", support " + std::to_string(support) + " (bound " +
                    std::to_string(d.n + d.m - 1) + "), marginal sum error " + fmt("%.3g", sum_err) +
                    ", max/min marginal ratio " + fmt("%.4f", ratio)};
}

Outcome concentration() {
  // H and P of the experiment design away from the true parameter.
  experiment::ExperimentDesign big;
  big.theta = 0.5;
  big.n = big.m = 100000;
  big.seed = 90000;
  const Matrix h = experiment::generate_joint(big).points, p = experiment::generate_independent(big).points;
  const auto spec = KernelSpec::gaussian(0.25);
  // Incomplete U-statistic over cyclic offsets of the reference sample.
  auto cross = [&](const Matrix& a, const Matrix& b, std::size_t first) {
    std::vector<double> terms;
    for (std::size_t s = first; s < first + 40; ++s)
      for (std::size_t i = 0; i < a.rows(); ++i)
        terms.push_back(kernels::eval_kernel(spec, a.row(i), b.row((i + s) % b.rows())));
    return pairwise_sum(terms) / static_cast<double>(terms.size());
  };
  const double ref = std::sqrt(std::max(0.0, cross(h, h, 1) + cross(p, p, 1) - 2.0 * cross(h, p, 0)));

  std::string detail = "reference W_H " + fmt("%.4f", ref);
  bool pass = true;
  for (double eps : {0.05, 0.1}) {
    const auto bound = mmd::deviation_bound(1.0, 100, 100, eps);
    std::vector<int> hit(500, 0);
    parallel_for(0, hit.size(), [&](std::size_t r) {
      experiment::ExperimentDesign d;
      d.theta = 0.5;
      d.n = d.m = 100;
      d.seed = r;
      const double w = mmd::mmd_biased(spec, experiment::generate_joint(d), experiment::generate_independent(d)).value;
      hit[r] = w - ref > bound.bias + eps;
    });
    double freq = 0.0;
    for (int v : hit) freq += v;
    freq /= 500.0;
    pass = pass && freq <= bound.tail_prob;
    detail += "; eps " + fmt("%g", eps) + ": frequency " + fmt("%.3f", freq) + " vs bound " +
              fmt("%.3g", bound.tail_prob);
  }
  return {pass, detail};
}

// ---- CLI determinism ----

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mide");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return mide::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// bench.csv carries wall-clock timings; only the other columns are compared.
std::string strip_timing(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (cells.size() == 4) cells.erase(cells.begin() + 2);
    for (const auto& c : cells) out += c + ",";
    out += "\n";
  }
  return out;
}

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == '\n' || ch == ' ' || ch == '=' || ch == '"') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Largest relative difference between numeric tokens; non-numeric tokens
// must match exactly (returns infinity otherwise).
double numeric_distance(const std::string& a, const std::string& b) {
  const auto ta = tokens(a), tb = tokens(b);
  if (ta.size() != tb.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t k = 0; k < ta.size(); ++k) {
    if (ta[k] == tb[k]) continue;
    try {
      std::size_t ia = 0, ib = 0;
      const double x = std::stod(ta[k], &ia), y = std::stod(tb[k], &ib);
      if (ia != ta[k].size() || ib != tb[k].size()) return INFINITY;
      worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::abs(x)));
    } catch (const std::exception&) {
      return INFINITY;
    }
  }
  return worst;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "mide_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    Rng rng(12);
    std::ofstream data(root / "data.csv"), src(root / "src.csv"), dst(root / "dst.csv");
    data.precision(17);
    src.precision(17);
    dst.precision(17);
    data << "x1,y1\n";
    for (int i = 0; i < 30; ++i) {
      const double x = rng.normal();
      data << x << ',' << 0.7 * x + rng.normal() << '\n';
    }
    src << "p1,p2\n";
    dst << "q1,q2\n";
    for (int i = 0; i < 12; ++i) src << rng.normal() << ',' << rng.normal() << '\n';
    for (int i = 0; i < 15; ++i) dst << rng.normal() << ',' << rng.normal() << '\n';
  }
  const std::string data = (root / "data.csv").string();
  const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
      {"estimate", {"estimate", "--data", data, "--model", "linear", "--grid", "0:0.1:1.5", "--seed", "7"}},
      {"estimate_lp",
       {"estimate", "--data", data, "--model", "linear", "--grid", "0:0.25:1.5", "--method", "scheme", "--seed", "7"}},
      {"estimate_nm",
       {"estimate", "--data", data, "--model", "linear", "--method", "nelder_mead", "--start", "0.2", "--seed", "7"}},
      {"test", {"test", "--data", data, "--model", "linear", "--theta", "0.7", "--seed", "7"}},
      {"transport",
       {"transport", "--source", (root / "src.csv").string(), "--target", (root / "dst.csv").string(), "--seed", "7"}},
      {"experiment", {"experiment", "--n", "40", "--m", "45", "--grid", "0:0.1:2", "--replications", "3", "--seed", "7"}},
      {"bench", {"bench", "--sizes", "20,40", "--repeats", "1", "--seed", "7"}},
  };

  bool pass = true;
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, args] : commands) {
    std::vector<fs::path> dirs;
    for (const char* run : {"t1a", "t1b", "t3"}) {
      const fs::path dir = root / (name + "_" + run);
      auto full = args;
      full.insert(full.end(), {"--out", dir.string(), "--threads", std::string(run) == "t3" ? "3" : "1"});
      if (cli(full) != 0) {
        pass = false;
        detail += name + " exited with an error; ";
      }
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto file = entry.path().filename();
      std::string a = slurp(dirs[0] / file), b = slurp(dirs[1] / file), c = slurp(dirs[2] / file);
      if (file == "bench.csv") {
        a = strip_timing(a);
        b = strip_timing(b);
        c = strip_timing(c);
      }
      if (a != b) {
        pass = false;
        detail += name + "/" + file.string() + " differs between identical runs; ";
      }
      const double dist = numeric_distance(a, c);
      worst = std::max(worst, dist);
      if (!(dist <= 1e-13)) {
        pass = false;
        detail += name + "/" + file.string() + " differs across thread counts; ";
      }
    }
  }
  fs::remove_all(root);
  return {pass, detail + "max cross-thread difference " + fmt("%.3g", worst)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"transport oracles", ot_oracles},
      {"duality", duality},
      {"dikin cross-check", dikin_vs_simplex},
      {"statistic oracles", statistics},
      {"metric sandwich", sandwich},
      {"null distribution", null_distribution},
      {"test size", test_size},
      {"estimation recovery", recovery},
      {"consistency trend", consistency},
      {"plan structure", plan_structure},
      {"concentration bound", concentration},
      {"determinism", determinism},
  };
  set_thread_count(std::max<std::size_t>(1, std::thread::hardware_concurrency()));
  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::printf("criterion %2zu %s: %s (%s; %.1f s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
