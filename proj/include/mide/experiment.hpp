#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mide/empirical.hpp"
#include "mide/estimator.hpp"

namespace mide::experiment {

using empirical::Dataset;
using empirical::WeightedPointCloud;

// Bivariate Gaussian design: x ~ N((0, -0.5), I), eps(theta) with means
// (0, 0.25 + theta), unit variances, corr(x2, eps2) = 1 - theta and every
// other cross-correlation zero.
struct ExperimentDesign {
  double theta = 1.0;
  std::size_t n = 140;  // joint sample
  std::size_t m = 150;  // independent sample
  std::uint64_t seed = 0;

  void validate() const;
};

// Stored draws. eps is rebuilt from them at any theta through the
// experiment52 residual model, with y = (eps1, eta).
struct ExperimentSample {
  Dataset joint;         // n rows
  Matrix x_independent;  // m rows
  Dataset eps_source;    // m rows, independent of x_independent
};

ExperimentSample draw_sample(const ExperimentDesign& design);

WeightedPointCloud generate_joint(const ExperimentDesign& design);
WeightedPointCloud generate_independent(const ExperimentDesign& design);

// H from the joint sample; P pairs x_independent with eps computed on
// eps_source. Both are deterministic functions of theta given the sample.
class ExperimentProblem : public estimator::Problem {
 public:
  explicit ExperimentProblem(ExperimentSample sample);

  std::size_t theta_dim() const override { return 1; }
  estimator::CloudPair clouds(std::span<const double> theta) const override;
  std::string description() const override;

  const ExperimentSample& sample() const { return sample_; }

 private:
  ExperimentSample sample_;
  empirical::ResidualModel model_;
};

// Grid 0:0.05:2 with the S_hat objective.
estimator::EstimationConfig default_config(const ExperimentDesign& design);

// theta* from estimate_grid for seeds design.seed, design.seed + 1, ...
std::vector<double> replicate(const ExperimentDesign& design, const estimator::EstimationConfig& config,
                              std::size_t replications);

// Gaussian KDE of the index positions weighted by mass, evaluated at each
// index; bandwidth by Silverman's rule on the positive-mass indices.
Vector smooth_marginal(std::span<const double> weights);

// Writes fig1..fig5 as CSV and SVG. The result must carry a plan computed on
// ExperimentProblem(draw_sample(design)).
std::vector<std::filesystem::path> emit_figures(const estimator::EstimationResult& result,
                                                const ExperimentDesign& design, const std::filesystem::path& outdir,
                                                double start_theta = 0.0);

}  // namespace mide::experiment
