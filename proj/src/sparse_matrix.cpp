#include "smp/sparse_matrix.hpp"

#include <algorithm>

#include "smp/error.hpp"

namespace smp {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                           std::vector<std::uint32_t> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  require(row_ptr_.size() == rows_ + 1, "SparseMatrix: row_ptr must have rows + 1 entries");
  require(row_ptr_.front() == 0, "SparseMatrix: row_ptr must start at 0");
  require(col_idx_.size() == values_.size(), "SparseMatrix: col_idx and values lengths differ");
  require(row_ptr_.back() == values_.size(), "SparseMatrix: row_ptr[rows] must equal nnz");
  for (std::size_t r = 0; r < rows_; ++r) {
    require(row_ptr_[r] <= row_ptr_[r + 1], "SparseMatrix: row_ptr must be non-decreasing");
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      require(col_idx_[k] < cols_, "SparseMatrix: column index out of range");
      if (k > row_ptr_[r])
        require(col_idx_[k - 1] < col_idx_[k], "SparseMatrix: columns must be strictly increasing");
    }
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> ptr(n + 1);
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i <= n; ++i) ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
  return SparseMatrix(n, n, std::move(ptr), std::move(idx), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  require(r < rows_ && c < cols_, "SparseMatrix::at: index out of range");
  auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
  auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
  auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
  if (it == last || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::size_t c = col_idx_[k];
      auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[c]);
      auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[c + 1]);
      auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(r));
      if (it == last || *it != r) return false;
      if (values_[static_cast<std::size_t>(it - col_idx_.begin())] != values_[k]) return false;
    }
  }
  return true;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_idx_[k]) = values_[k];
  return d;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x) {
  require(a.cols() == x.rows(), "spmm: sparse cols must equal dense rows");
  DenseMatrix out(a.rows(), x.cols());
  const auto& ptr = a.row_ptr();
  const auto& idx = a.col_idx();
  const auto& val = a.values();
  const std::size_t n = x.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double* o = out.row(r).data();
    for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) {
      const double w = val[k];
      const double* xr = x.row(idx[k]).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += w * xr[j];
    }
  }
  return out;
}

}  // namespace smp
