#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mide {

using Vector = std::vector<double>;

// Dense row-major matrix. Point sets are stored one point per row.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix from_rows(const std::vector<Vector>& rows);
  static Matrix column(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Vector row_sums() const;
  Vector col_sums() const;
  double sum() const;
  double max_abs() const;
  double frobenius_norm() const;
  Matrix transposed() const;

  // Concatenate rows of two matrices with equal row count: [a | b].
  static Matrix hconcat(const Matrix& a, const Matrix& b);
  // Stack rows of two matrices with equal column count.
  static Matrix vconcat(const Matrix& a, const Matrix& b);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Pairwise (tree) summation; result is independent of how the caller
// partitions work as long as the input order is fixed.
double pairwise_sum(std::span<const double> values);

double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace mide
