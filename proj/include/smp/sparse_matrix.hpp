#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "smp/dense_matrix.hpp"

namespace smp {

// CSR matrix. Column indices within a row are strictly increasing.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  // Validates the CSR invariants; throws ContractViolation on failure.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::uint32_t> col_idx, std::vector<double> values);

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::uint32_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }

  // Stored value at (r, c), 0 if absent.
  double at(std::size_t r, std::size_t c) const;
  std::size_t row_nnz(std::size_t r) const { return row_ptr_[r + 1] - row_ptr_[r]; }

  // Exact structural and value symmetry.
  bool is_symmetric() const;

  DenseMatrix to_dense() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

// a * x. Each output row accumulates in ascending column order, so the result
// is bit-reproducible.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& x);

}  // namespace smp
