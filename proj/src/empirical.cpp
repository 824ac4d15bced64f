#include "mide/empirical.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "mide/errors.hpp"
#include "mide/rng.hpp"

namespace mide::empirical {

Dataset::Dataset(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() == 0) throw InputError("dataset must contain at least one observation");
  if (x_.rows() != y_.rows()) throw InputError("dataset x and y blocks have different lengths");
  if (x_.cols() == 0 || y_.cols() == 0) throw InputError("dataset needs L >= 1 and K >= 1");
  for (double v : x_.data())
    if (!std::isfinite(v)) throw InputError("dataset contains non-finite x coordinates");
  for (double v : y_.data())
    if (!std::isfinite(v)) throw InputError("dataset contains non-finite y coordinates");
}

Dataset Dataset::from_observations(const std::vector<Observation>& observations) {
  if (observations.empty()) throw InputError("dataset must contain at least one observation");
  std::vector<Vector> xs, ys;
  for (const auto& o : observations) {
    if (o.x.size() != observations.front().x.size() || o.y.size() != observations.front().y.size())
      throw InputError("observations have inhomogeneous dimensions");
    xs.push_back(o.x);
    ys.push_back(o.y);
  }
  return Dataset(Matrix::from_rows(xs), Matrix::from_rows(ys));
}

Observation Dataset::observation(std::size_t i) const {
  return {Vector(x_.row(i).begin(), x_.row(i).end()), Vector(y_.row(i).begin(), y_.row(i).end())};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Matrix x(indices.size(), x_dim());
  Matrix y(indices.size(), y_dim());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::size_t i = indices[r];
    if (i >= size()) throw InputError("dataset subset index out of range");
    std::copy(x_.row(i).begin(), x_.row(i).end(), x.row(r).begin());
    std::copy(y_.row(i).begin(), y_.row(i).end(), y.row(r).begin());
  }
  return Dataset(std::move(x), std::move(y));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, std::size_t line_no) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (...) {
    throw ParseError("line " + std::to_string(line_no) + ": '" + t + "' is not a number");
  }
  if (used != t.size() || !std::isfinite(v))
    throw ParseError("line " + std::to_string(line_no) + ": '" + t + "' is not a finite number");
  return v;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset CSV is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  std::size_t L = 0, K = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    const std::string expected_x = "x" + std::to_string(L + 1);
    const std::string expected_y = "y" + std::to_string(K + 1);
    if (K == 0 && name == expected_x) {
      ++L;
    } else if (name == expected_y) {
      ++K;
    } else {
      throw ParseError("header column " + std::to_string(c + 1) + " ('" + name +
                       "') breaks the x1..xL,y1..yK pattern");
    }
  }
  if (L == 0 || K == 0) throw ParseError("header must name at least one x and one y column");

  std::vector<Vector> xs, ys;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != L + K)
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(L + K) + " fields");
    Vector x(L), y(K);
    for (std::size_t c = 0; c < L; ++c) x[c] = parse_number(fields[c], line_no);
    for (std::size_t c = 0; c < K; ++c) y[c] = parse_number(fields[L + c], line_no);
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
  }
  if (xs.empty()) throw ParseError("dataset CSV has no observations");
  return Dataset(Matrix::from_rows(xs), Matrix::from_rows(ys));
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset '" + path + "'");
  return read_dataset_csv(in);
}

WeightedPointCloud read_point_cloud_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("point cloud CSV is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  const bool weighted = header.size() > 1 && trim(header.back()) == "weight";
  const std::size_t dim = header.size() - (weighted ? 1 : 0);
  if (dim == 0) throw ParseError("point cloud CSV needs at least one coordinate column");

  std::vector<Vector> rows;
  Vector weights;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) + " fields");
    Vector p(dim);
    for (std::size_t c = 0; c < dim; ++c) p[c] = parse_number(fields[c], line_no);
    if (weighted) weights.push_back(parse_number(fields[dim], line_no));
    rows.push_back(std::move(p));
  }
  if (rows.empty()) throw ParseError("point cloud CSV has no points");
  if (!weighted) return WeightedPointCloud::uniform(Matrix::from_rows(rows));
  return {Matrix::from_rows(rows), std::move(weights)};
}

WeightedPointCloud read_point_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open point cloud '" + path + "'");
  return read_point_cloud_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t c = 0; c < data.x_dim(); ++c) out << (c ? "," : "") << 'x' << c + 1;
  for (std::size_t c = 0; c < data.y_dim(); ++c) out << ',' << 'y' << c + 1;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t c = 0; c < data.x_dim(); ++c) out << (c ? "," : "") << data.x()(i, c);
    for (std::size_t c = 0; c < data.y_dim(); ++c) out << ',' << data.y()(i, c);
    out << '\n';
  }
}

void WeightedPointCloud::validate() const {
  if (points.rows() == 0) throw InputError("point cloud is empty");
  if (weights.size() != points.rows()) throw InputError("point cloud weights misaligned with points");
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("point cloud weights must be nonnegative");
  if (std::abs(pairwise_sum(weights) - 1.0) > 1e-12) throw InputError("point cloud weights must sum to 1");
}

WeightedPointCloud WeightedPointCloud::uniform(Matrix points) {
  const std::size_t n = points.rows();
  if (n == 0) throw InputError("point cloud is empty");
  return {std::move(points), Vector(n, 1.0 / static_cast<double>(n))};
}

Matrix residuals(const ResidualModel& model, const Dataset& data, std::span<const double> theta) {
  if (theta.size() != model.theta_dim)
    throw InputError("model '" + model.name + "' expects " + std::to_string(model.theta_dim) +
                     " parameters, got " + std::to_string(theta.size()));
  if (data.x_dim() != model.x_dim)
    throw InputError("model '" + model.name + "' expects x dimension " + std::to_string(model.x_dim));
  if (data.y_dim() != model.y_dim)
    throw InputError("model '" + model.name + "' expects y dimension " + std::to_string(model.y_dim));
  Matrix eps(data.size(), model.eps_dim);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector e = model.residual(data.x().row(i), data.y().row(i), theta);
    if (e.size() != model.eps_dim) throw InputError("model '" + model.name + "' returned a residual of wrong size");
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (!std::isfinite(e[k]))
        throw NumericalError("model '" + model.name + "' produced a non-finite residual at observation " +
                             std::to_string(i));
      eps(i, k) = e[k];
    }
  }
  return eps;
}

WeightedPointCloud joint_cloud(const Matrix& x, const Matrix& eps) {
  if (x.rows() != eps.rows()) throw InputError("joint_cloud: residuals not aligned with data");
  return WeightedPointCloud::uniform(Matrix::hconcat(x, eps));
}

WeightedPointCloud joint_cloud(const Dataset& data, const Matrix& eps) { return joint_cloud(data.x(), eps); }

ProductMode ProductMode::automatic(std::size_t n, std::uint64_t seed) {
  return n <= 200 ? full_grid() : resample(n, seed);
}

ProductIndices product_indices(std::size_t n, const ProductMode& mode) {
  ProductIndices idx;
  if (mode.kind == ProductMode::Kind::full_grid) {
    idx.x_index.reserve(n * n);
    idx.eps_index.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        idx.x_index.push_back(i);
        idx.eps_index.push_back(j);
      }
    return idx;
  }
  if (mode.m == 0) throw InputError("resample mode needs m >= 1");
  Rng rng(mode.seed);
  idx.x_index.resize(mode.m);
  idx.eps_index.resize(mode.m);
  for (std::size_t j = 0; j < mode.m; ++j) {
    idx.x_index[j] = rng.uniform_index(n);
    idx.eps_index[j] = rng.uniform_index(n);
  }
  return idx;
}

WeightedPointCloud product_cloud(const Matrix& x, const Matrix& eps, const ProductIndices& indices) {
  if (x.rows() != eps.rows()) throw InputError("product_cloud: residuals not aligned with data");
  if (indices.x_index.size() != indices.eps_index.size() || indices.x_index.empty())
    throw InputError("product_cloud: invalid index set");
  Matrix pts(indices.x_index.size(), x.cols() + eps.cols());
  for (std::size_t r = 0; r < indices.x_index.size(); ++r) {
    auto dst = pts.row(r);
    const auto xi = x.row(indices.x_index[r]);
    const auto ej = eps.row(indices.eps_index[r]);
    std::copy(xi.begin(), xi.end(), dst.begin());
    std::copy(ej.begin(), ej.end(), dst.begin() + static_cast<std::ptrdiff_t>(x.cols()));
  }
  return WeightedPointCloud::uniform(std::move(pts));
}

WeightedPointCloud product_cloud(const Dataset& data, const Matrix& eps, const ProductMode& mode) {
  if (data.size() != eps.rows()) throw InputError("product_cloud: residuals not aligned with data");
  return product_cloud(data.x(), eps, product_indices(data.size(), mode));
}

double empirical_cdf(const WeightedPointCloud& cloud, std::span<const double> t) {
  if (t.size() != cloud.dim()) throw InputError("empirical_cdf: dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.points.row(i);
    bool below = true;
    for (std::size_t k = 0; k < p.size() && below; ++k) below = p[k] <= t[k];
    if (below) total += cloud.weights[i];
  }
  return std::min(1.0, total);
}

Dataset resample_dataset(const Dataset& data, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw InputError("resample_dataset needs m >= 1");
  Rng rng(seed);
  std::vector<std::size_t> idx(m);
  for (auto& i : idx) i = rng.uniform_index(data.size());
  return data.subset(idx);
}

}  // namespace mide::empirical
