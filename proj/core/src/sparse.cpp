#include "micromorph/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace micromorph {

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet>&& triplets,
                                         bool symmetric_hint) {
  SparseMatrix m(rows, cols);
  m.symmetric_hint_ = symmetric_hint;

  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  for (int r = 0; r < rows; ++r) {
    m.row_offsets_[r] = static_cast<int>(m.values_.size());
    while (i < triplets.size() && triplets[i].row == r) {
      const int c = triplets[i].col;
      double v = 0.0;
      while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
        v += triplets[i].value;
        ++i;
      }
      m.col_indices_.push_back(c);
      m.values_.push_back(v);
    }
  }
  m.row_offsets_[rows] = static_cast<int>(m.values_.size());
  if (i != triplets.size()) throw std::invalid_argument("sparse: triplet index out of range");
  return m;
}

Eigen::VectorXd SparseMatrix::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
  apply_add(x, y);
  return y;
}

void SparseMatrix::apply_add(const Eigen::VectorXd& x, Eigen::VectorXd& y, double alpha) const {
  for (int r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      acc += values_[k] * x[col_indices_[k]];
    y[r] += alpha * acc;
  }
}

Eigen::VectorXd SparseMatrix::diagonal() const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(rows_);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      if (col_indices_[k] == r) d[r] = values_[k];
  return d;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      m(r, col_indices_[k]) = values_[k];
  return m;
}

double SparseMatrix::coeff(int i, int j) const {
  const auto begin = col_indices_.begin() + row_offsets_[i];
  const auto end = col_indices_.begin() + row_offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[row_offsets_[i] + static_cast<int>(it - begin)];
}

double SparseMatrix::symmetry_defect() const {
  double defect = 0.0;
  for (int r = 0; r < rows_; ++r)
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
      defect = std::max(defect, std::abs(values_[k] - coeff(col_indices_[k], r)));
  return defect;
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("sparse add: shape mismatch");
  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(a.nnz() + b.nnz());
  for (int r = 0; r < a.rows(); ++r)
    for (int k = a.row_offsets()[r]; k < a.row_offsets()[r + 1]; ++k)
      triplets.push_back({r, a.col_indices()[k], alpha * a.values()[k]});
  for (int r = 0; r < b.rows(); ++r)
    for (int k = b.row_offsets()[r]; k < b.row_offsets()[r + 1]; ++k)
      triplets.push_back({r, b.col_indices()[k], beta * b.values()[k]});
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(triplets),
                                     a.symmetric_hint() && b.symmetric_hint());
}

SparseMatrix SparseMatrix::submatrix(const std::vector<int>& row_sel,
                                     const std::vector<int>& col_sel) const {
  std::vector<int> col_map(cols_, -1);
  for (std::size_t j = 0; j < col_sel.size(); ++j) col_map[col_sel[j]] = static_cast<int>(j);

  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < row_sel.size(); ++i) {
    const int r = row_sel[i];
    for (int k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const int cj = col_map[col_indices_[k]];
      if (cj >= 0) triplets.push_back({static_cast<int>(i), cj, values_[k]});
    }
  }
  return from_triplets(static_cast<int>(row_sel.size()), static_cast<int>(col_sel.size()),
                       std::move(triplets), symmetric_hint_);
}

}  // namespace micromorph
