#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mide/matrix.hpp"

namespace mide::empirical {

struct Observation {
  Vector x;  // exogenous, dimension L
  Vector y;  // endogenous, dimension K
};

// n observations stored as an n x L block of exogenous and an n x K block of
// endogenous coordinates.
class Dataset {
 public:
  Dataset(Matrix x, Matrix y);
  static Dataset from_observations(const std::vector<Observation>& observations);

  std::size_t size() const { return x_.rows(); }
  std::size_t x_dim() const { return x_.cols(); }
  std::size_t y_dim() const { return y_.cols(); }
  const Matrix& x() const { return x_; }
  const Matrix& y() const { return y_; }
  Observation observation(std::size_t i) const;

  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  Matrix x_;
  Matrix y_;
};

// CSV with header x1,...,xL,y1,...,yK. Throws ParseError on malformed input.
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(std::ostream& out, const Dataset& data);

struct WeightedPointCloud;

// Point cloud CSV: any header, one point per line. A last column named
// "weight" holds the weights (checked later by the consumer); otherwise the
// weights are uniform.
WeightedPointCloud read_point_cloud_csv(std::istream& in);
WeightedPointCloud read_point_cloud_csv(const std::string& path);

// Structural residual eps = rho(x, y, theta).
struct ResidualModel {
  using Function = std::function<Vector(std::span<const double> x, std::span<const double> y,
                                        std::span<const double> theta)>;
  std::string name;
  std::size_t theta_dim = 1;
  std::size_t x_dim = 1;
  std::size_t y_dim = 1;
  std::size_t eps_dim = 1;
  Function residual;
};

// Discrete probability measure over points of the joint (x, eps) space.
struct WeightedPointCloud {
  Matrix points;
  Vector weights;

  std::size_t size() const { return points.rows(); }
  std::size_t dim() const { return points.cols(); }

  // Throws InputError unless weights are nonnegative, aligned with the
  // points, and sum to one within 1e-12.
  void validate() const;
  static WeightedPointCloud uniform(Matrix points);
};

// Row i holds rho(x_i, y_i, theta).
Matrix residuals(const ResidualModel& model, const Dataset& data, std::span<const double> theta);

// H_n: point (x_i, eps_i) with weight 1/n.
WeightedPointCloud joint_cloud(const Dataset& data, const Matrix& eps);
WeightedPointCloud joint_cloud(const Matrix& x, const Matrix& eps);

struct ProductMode {
  enum class Kind { full_grid, resample };
  Kind kind = Kind::full_grid;
  std::size_t m = 0;
  std::uint64_t seed = 0;

  static ProductMode full_grid() { return {Kind::full_grid, 0, 0}; }
  static ProductMode resample(std::size_t m, std::uint64_t seed) { return {Kind::resample, m, seed}; }
  // full_grid for n <= 200, otherwise resample with m = n.
  static ProductMode automatic(std::size_t n, std::uint64_t seed);
};

// Index pairs (x index, eps index) of a product cloud.
struct ProductIndices {
  std::vector<std::size_t> x_index;
  std::vector<std::size_t> eps_index;
};

ProductIndices product_indices(std::size_t n, const ProductMode& mode);

// P_n: full grid gives n^2 points (x_i, eps_j) of weight 1/n^2; resample
// gives m points (x_a(j), eps_b(j)) of weight 1/m with a, b drawn uniformly
// with replacement from the seed.
WeightedPointCloud product_cloud(const Dataset& data, const Matrix& eps, const ProductMode& mode);
WeightedPointCloud product_cloud(const Matrix& x, const Matrix& eps, const ProductIndices& indices);

// sum_i w_i 1{point_i <= t coordinatewise}.
double empirical_cdf(const WeightedPointCloud& cloud, std::span<const double> t);

// Bootstrap of observation pairs, uniformly with replacement.
Dataset resample_dataset(const Dataset& data, std::size_t m, std::uint64_t seed);

}  // namespace mide::empirical
