#include "smp/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "smp/error.hpp"

namespace smp {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_, "DenseMatrix: data length must equal rows * cols");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const DenseMatrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

Eigen::Map<RowMajor> view(DenseMatrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

}  // namespace

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  if (a.cols() > 0) view(c).noalias() = view(a) * view(b);
  return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: row counts differ");
  DenseMatrix c(a.cols(), b.cols());
  if (a.rows() > 0) view(c).noalias() = view(a).transpose() * view(b);
  return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: column counts differ");
  DenseMatrix c(a.rows(), b.rows());
  if (a.cols() > 0) view(c).noalias() = view(a) * view(b).transpose();
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

void add_row_vector(DenseMatrix& m, std::span<const double> bias) {
  require(bias.size() == m.cols(), "add_row_vector: bias length mismatch");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias[j];
  }
}

std::vector<double> column_sums(const DenseMatrix& m) {
  std::vector<double> s(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) s[j] += r[j];
  }
  return s;
}

DenseMatrix hconcat(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows(), "hconcat: row counts differ");
  DenseMatrix c(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    std::copy(a.row(i).begin(), a.row(i).end(), out.begin());
    std::copy(b.row(i).begin(), b.row(i).end(), out.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return c;
}

DenseMatrix column_block(const DenseMatrix& m, std::size_t begin, std::size_t count) {
  require(begin + count <= m.cols(), "column_block: range exceeds column count");
  DenseMatrix c(m.rows(), count);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto src = m.row(i).subspan(begin, count);
    std::copy(src.begin(), src.end(), c.row(i).begin());
  }
  return c;
}

DenseMatrix relu(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

DenseMatrix relu_backward(const DenseMatrix& grad, const DenseMatrix& pre) {
  require(grad.rows() == pre.rows() && grad.cols() == pre.cols(), "relu_backward: shape mismatch");
  DenseMatrix out = grad;
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!(pre.data()[i] > 0.0)) out.data()[i] = 0.0;
  return out;
}

void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y) {
  require(x.rows() == y.rows() && x.cols() == y.cols(), "axpy: shape mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] += alpha * x.data()[i];
}

DenseMatrix scaled(const DenseMatrix& m, double alpha) {
  DenseMatrix out = m;
  for (double& v : out.data()) v *= alpha;
  return out;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out = a;
  axpy(1.0, b, out);
  return out;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out = a;
  axpy(-1.0, b, out);
  return out;
}

double max_abs(const DenseMatrix& m) {
  double best = 0.0;
  for (double v : m.data()) best = std::max(best, std::abs(v));
  return best;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff: shape mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
  return best;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "l2_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace smp
