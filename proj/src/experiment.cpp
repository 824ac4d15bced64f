#include "mide/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mide/errors.hpp"
#include "mide/models.hpp"
#include "mide/parallel.hpp"
#include "mide/report.hpp"
#include "mide/rng.hpp"
#include "mide/svg.hpp"

namespace mide::experiment {

void ExperimentDesign::validate() const {
  if (!(std::abs(1.0 - theta) <= 1.0)) throw InputError("design theta must lie in [0, 2]");
  if (n < 1 || m < 1) throw InputError("design sizes must be positive");
}

namespace {

// Rows (x1, x2, eps1, eta) with x2 shifted to mean -0.5.
void fill(Rng& rng, Matrix& x, Matrix& y) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal() - 0.5;
    y(i, 0) = rng.normal();
    y(i, 1) = rng.normal();
  }
}

}  // namespace

ExperimentSample draw_sample(const ExperimentDesign& design) {
  design.validate();
  Matrix x(design.n, 2), y(design.n, 2);
  Rng joint_rng = Rng::substream(design.seed, 0);
  fill(joint_rng, x, y);

  Matrix xi(design.m, 2), unused(design.m, 2);
  Rng x_rng = Rng::substream(design.seed, 1);
  fill(x_rng, xi, unused);

  Matrix xs(design.m, 2), ys(design.m, 2);
  Rng eps_rng = Rng::substream(design.seed, 2);
  fill(eps_rng, xs, ys);
  return {Dataset(std::move(x), std::move(y)), std::move(xi), Dataset(std::move(xs), std::move(ys))};
}

WeightedPointCloud generate_joint(const ExperimentDesign& design) {
  ExperimentProblem problem(draw_sample(design));
  const double theta = design.theta;
  return problem.clouds(std::span<const double>(&theta, 1)).joint;
}

WeightedPointCloud generate_independent(const ExperimentDesign& design) {
  ExperimentProblem problem(draw_sample(design));
  const double theta = design.theta;
  return *problem.clouds(std::span<const double>(&theta, 1)).product;
}

ExperimentProblem::ExperimentProblem(ExperimentSample sample)
    : sample_(std::move(sample)), model_(models::experiment52()) {}

estimator::CloudPair ExperimentProblem::clouds(std::span<const double> theta) const {
  if (theta.size() != 1) throw InputError("experiment problem has a scalar theta");
  if (!(std::abs(1.0 - theta[0]) <= 1.0)) throw NumericalError("experiment theta outside [0, 2]");
  const Matrix eps = empirical::residuals(model_, sample_.joint, theta);
  const Matrix eps_ind = empirical::residuals(model_, sample_.eps_source, theta);
  return {empirical::joint_cloud(sample_.joint.x(), eps),
          WeightedPointCloud::uniform(Matrix::hconcat(sample_.x_independent, eps_ind)), std::nullopt};
}

std::string ExperimentProblem::description() const {
  std::ostringstream out;
  out << "experiment52 n=" << sample_.joint.size() << " m=" << sample_.x_independent.rows();
  return out.str();
}

estimator::EstimationConfig default_config(const ExperimentDesign& design) {
  estimator::EstimationConfig config;
  config.theta_grid = estimator::linear_grid(0.0, 2.0, 0.05);
  config.objective = estimator::Objective::unbiased_S;
  config.seed = design.seed;
  return config;
}

std::vector<double> replicate(const ExperimentDesign& design, const estimator::EstimationConfig& config,
                              std::size_t replications) {
  std::vector<double> out(replications);
  parallel_for(0, replications, [&](std::size_t r) {
    ExperimentDesign d = design;
    d.seed = design.seed + r;
    estimator::EstimationConfig c = config;
    c.seed = d.seed;
    ExperimentProblem problem(draw_sample(d));
    out[r] = estimator::estimate_grid(problem, c).theta_star.at(0);
  });
  return out;
}

Vector smooth_marginal(std::span<const double> weights) {
  const std::size_t L = weights.size();
  Vector support;
  for (std::size_t i = 0; i < L; ++i)
    if (weights[i] > 0.0) support.push_back(static_cast<double>(i));
  double h = 1.0;
  if (support.size() > 1) {
    const double mean = pairwise_sum(support) / support.size();
    double ss = 0.0;
    for (double s : support) ss += (s - mean) * (s - mean);
    const double sd = std::sqrt(ss / (support.size() - 1));
    auto at = [&](double p) {
      const double pos = p * (support.size() - 1);
      const auto lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, support.size() - 1);
      return support[lo] + (pos - lo) * (support[hi] - support[lo]);
    };
    const double iqr = at(0.75) - at(0.25);
    const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
    h = 0.9 * spread * std::pow(static_cast<double>(support.size()), -0.2);
    if (!(h > 0.0)) h = 1.0;
  }
  Vector out(L, 0.0);
  const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t t = 0; t < L; ++t) {
    Vector terms(L);
    for (std::size_t i = 0; i < L; ++i) {
      const double z = (static_cast<double>(t) - static_cast<double>(i)) / h;
      terms[i] = weights[i] * norm * std::exp(-0.5 * z * z);
    }
    out[t] = pairwise_sum(terms);
  }
  return out;
}

namespace {

using report::format_double;

void emit(std::vector<std::filesystem::path>& files, const std::filesystem::path& path, const std::string& content) {
  report::write_atomic(path, content);
  files.push_back(path);
}

}  // namespace

std::vector<std::filesystem::path> emit_figures(const estimator::EstimationResult& result,
                                                const ExperimentDesign& design, const std::filesystem::path& outdir,
                                                double start_theta) {
  if (!result.plan || !result.cost) throw InputError("emit_figures needs a result with a transport plan");
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (!std::filesystem::is_directory(outdir)) throw InputError("cannot create " + outdir.string());

  const ExperimentProblem problem(draw_sample(design));
  const auto pair = problem.clouds(result.theta_star);
  const auto& H = pair.joint;
  const auto& P = *pair.product;
  const auto& plan = *result.plan;
  if (plan.gamma.rows() != H.size() || plan.gamma.cols() != P.size())
    throw InputError("plan does not match the experiment sample sizes");
  const double t0 = start_theta;
  const auto start = problem.clouds(std::span<const double>(&t0, 1)).joint;

  std::vector<std::filesystem::path> files;

  // Figure 1: the two clouds at theta*.
  {
    std::ostringstream csv;
    csv << "cloud,index,x1,x2,eps1,eps2,weight\n";
    auto rows = [&](const char* name, const WeightedPointCloud& c) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        csv << name << ',' << i;
        for (double v : c.points.row(i)) csv << ',' << format_double(v);
        csv << ',' << format_double(c.weights[i]) << '\n';
      }
    };
    rows("H", H);
    rows("P", P);
    emit(files, outdir / "fig1_clouds.csv", csv.str());
    svg::Figure fig("Point clouds at theta* = " + format_double(result.theta_star[0]), "x2", "eps2");
    svg::Series sh{{}, "#d62728", "H (joint)", false}, sp{{}, "#1f77b4", "P (independent)", false};
    for (std::size_t i = 0; i < H.size(); ++i) sh.points.emplace_back(H.points(i, 1), H.points(i, 3));
    for (std::size_t j = 0; j < P.size(); ++j) sp.points.emplace_back(P.points(j, 1), P.points(j, 3));
    fig.add(std::move(sp));
    fig.add(std::move(sh));
    emit(files, outdir / "fig1_clouds.svg", fig.render());
  }

  // Figure 2: joint points moved from start_theta to theta*.
  {
    std::ostringstream csv;
    csv << "index,x1,x2,eps1_start,eps2_start,eps1_end,eps2_end\n";
    svg::Figure fig("Joint sample from theta = " + format_double(t0) + " to theta*", "x2", "eps2");
    svg::Series s0{{}, "#aaaaaa", "start", false}, s1{{}, "#d62728", "theta*", false};
    for (std::size_t i = 0; i < H.size(); ++i) {
      csv << i << ',' << format_double(H.points(i, 0)) << ',' << format_double(H.points(i, 1)) << ','
          << format_double(start.points(i, 2)) << ',' << format_double(start.points(i, 3)) << ','
          << format_double(H.points(i, 2)) << ',' << format_double(H.points(i, 3)) << '\n';
      fig.add(svg::Segment{H.points(i, 1), start.points(i, 3), H.points(i, 1), H.points(i, 3), "#cccccc", 0.6});
      s0.points.emplace_back(H.points(i, 1), start.points(i, 3));
      s1.points.emplace_back(H.points(i, 1), H.points(i, 3));
    }
    fig.add(std::move(s0));
    fig.add(std::move(s1));
    emit(files, outdir / "fig2_transform.csv", csv.str());
    emit(files, outdir / "fig2_transform.svg", fig.render());
  }

  // Figure 3: the full plan matrix.
  {
    std::ostringstream csv;
    csv << "i,j,gamma\n";
    for (std::size_t i = 0; i < plan.gamma.rows(); ++i)
      for (std::size_t j = 0; j < plan.gamma.cols(); ++j)
        csv << i << ',' << j << ',' << format_double(plan.gamma(i, j)) << '\n';
    emit(files, outdir / "fig3_plan.csv", csv.str());
    emit(files, outdir / "fig3_plan.svg", svg::heatmap(plan.gamma, "Transport plan gamma_ij at theta*"));
  }

  // Figure 4: plan marginals and their smoothed densities.
  {
    const Vector dh = plan.source_marginal();
    const Vector dp = plan.target_marginal();
    const Vector sh = smooth_marginal(dh);
    const Vector sp = smooth_marginal(dp);
    std::ostringstream csv;
    csv << "index,dH,dP,dH_smooth,dP_smooth\n";
    for (std::size_t k = 0; k < std::max(dh.size(), dp.size()); ++k) {
      csv << k << ',';
      if (k < dh.size()) csv << format_double(dh[k]);
      csv << ',';
      if (k < dp.size()) csv << format_double(dp[k]);
      csv << ',';
      if (k < dh.size()) csv << format_double(sh[k]);
      csv << ',';
      if (k < dp.size()) csv << format_double(sp[k]);
      csv << '\n';
    }
    emit(files, outdir / "fig4_marginals.csv", csv.str());
    svg::Figure fig("Smoothed plan marginals", "index", "density");
    svg::Series lh{{}, "#d62728", "dH", true}, lp{{}, "#1f77b4", "dP", true};
    for (std::size_t k = 0; k < sh.size(); ++k) lh.points.emplace_back(static_cast<double>(k), sh[k]);
    for (std::size_t k = 0; k < sp.size(); ++k) lp.points.emplace_back(static_cast<double>(k), sp[k]);
    fig.add(std::move(lh));
    fig.add(std::move(lp));
    emit(files, outdir / "fig4_marginals.svg", fig.render());
  }

  // Figure 5: pairs that carry cost.
  {
    const auto& C = result.cost->entries;
    std::ostringstream csv;
    csv << "i,j,gamma,cost_ij,h_x2,h_eps2,p_x2,p_eps2\n";
    svg::Figure fig("Transport connections at theta*", "x2", "eps2");
    svg::Series sh{{}, "#d62728", "H", false}, sp{{}, "#1f77b4", "P", false};
    for (std::size_t i = 0; i < H.size(); ++i) sh.points.emplace_back(H.points(i, 1), H.points(i, 3));
    for (std::size_t j = 0; j < P.size(); ++j) sp.points.emplace_back(P.points(j, 1), P.points(j, 3));
    for (std::size_t i = 0; i < plan.gamma.rows(); ++i)
      for (std::size_t j = 0; j < plan.gamma.cols(); ++j) {
        const double g = plan.gamma(i, j);
        if (!(g * C(i, j) > 1e-12)) continue;
        csv << i << ',' << j << ',' << format_double(g) << ',' << format_double(C(i, j)) << ','
            << format_double(H.points(i, 1)) << ',' << format_double(H.points(i, 3)) << ','
            << format_double(P.points(j, 1)) << ',' << format_double(P.points(j, 3)) << '\n';
        fig.add(svg::Segment{H.points(i, 1), H.points(i, 3), P.points(j, 1), P.points(j, 3), "#999999", 0.6});
      }
    fig.add(std::move(sp));
    fig.add(std::move(sh));
    emit(files, outdir / "fig5_connections.csv", csv.str());
    emit(files, outdir / "fig5_connections.svg", fig.render());
  }
  return files;
}

}  // namespace mide::experiment
