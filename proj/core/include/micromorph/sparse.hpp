#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace micromorph {

/// Compressed-row sparse matrix with deterministic assembly: triplets are
/// stably sorted by (row, col) and accumulated in that order, so identical
/// input produces bit-identical entries regardless of insertion history.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols) : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

  struct Triplet {
    int row;
    int col;
    double value;
  };

  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet>&& triplets,
                                    bool symmetric_hint = false);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(values_.size()); }
  bool symmetric_hint() const { return symmetric_hint_; }

  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }

  /// y = A x
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  /// y += alpha * A x
  void apply_add(const Eigen::VectorXd& x, Eigen::VectorXd& y, double alpha = 1.0) const;

  Eigen::VectorXd diagonal() const;
  Eigen::MatrixXd to_dense() const;

  /// max_ij |A_ij - A_ji| over the stored pattern.
  double symmetry_defect() const;

  /// Entry lookup (binary search in the row); zero if absent.
  double coeff(int i, int j) const;

  /// Submatrix A(rows_sel, cols_sel), with selection given as index lists.
  SparseMatrix submatrix(const std::vector<int>& row_sel, const std::vector<int>& col_sel) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  bool symmetric_hint_ = false;
  std::vector<int> row_offsets_;
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

/// alpha A + beta B (patterns are merged).
SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0,
                 double beta = 1.0);

/// Convenience accumulation buffer for element assembly.
class TripletBuffer {
 public:
  void add(int row, int col, double value) {
    if (value != 0.0) data_.push_back({row, col, value});
  }
  std::vector<SparseMatrix::Triplet>& data() { return data_; }
  void append(TripletBuffer&& other) {
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  }

 private:
  std::vector<SparseMatrix::Triplet> data_;
};

}  // namespace micromorph
