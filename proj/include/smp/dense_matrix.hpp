#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace smp {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a * b
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// a^T * b
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// a * b^T
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

// Adds `bias` (length cols) to every row in place.
void add_row_vector(DenseMatrix& m, std::span<const double> bias);
// Column sums, the gradient of a broadcast bias.
std::vector<double> column_sums(const DenseMatrix& m);

// [a, b] along columns.
DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b);
// Columns [begin, begin + count).
DenseMatrix column_block(const DenseMatrix& m, std::size_t begin, std::size_t count);

DenseMatrix relu(const DenseMatrix& m);
// grad masked by (pre > 0)
DenseMatrix relu_backward(const DenseMatrix& grad, const DenseMatrix& pre);

void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y);
DenseMatrix scaled(const DenseMatrix& m, double alpha);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);

double max_abs(const DenseMatrix& m);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double dot(std::span<const double> a, std::span<const double> b);
double l2_distance(std::span<const double> a, std::span<const double> b);

}  // namespace smp
