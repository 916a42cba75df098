#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace slackcme {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Sparse CTMC generator. Off-diagonal rates are stored in CSR form with
/// columns sorted per row; the diagonal is always minus the row's off-diagonal
/// sum, so rows sum to zero by construction.
class Generator {
 public:
  Generator() = default;

  /// Duplicate (row, col) pairs are summed, zero values dropped. Diagonal
  /// entries and negative rates are rejected.
  static Generator from_triplets(std::size_t dim, std::vector<Triplet> entries);

  std::size_t dim() const { return diag_.size(); }
  std::size_t nonzeros() const { return cols_.size(); }

  std::span<const std::size_t> targets(std::size_t i) const {
    return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> rates(std::size_t i) const {
    return {vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  double diagonal(std::size_t i) const { return diag_[i]; }
  double exit_rate(std::size_t i) const { return -diag_[i]; }
  bool is_absorbing(std::size_t i) const { return row_ptr_[i] == row_ptr_[i + 1]; }

  /// A(i, j) including the diagonal.
  double rate(std::size_t i, std::size_t j) const;
  double max_exit_rate() const;
  /// Infinity norm, 2 max_i |A_ii|.
  double norm_inf() const { return 2.0 * max_exit_rate(); }
  /// Largest |sum_j A_ij| relative to the row's exit rate.
  double max_row_sum_error() const;

  /// y = p^T A.
  std::vector<double> left_multiply(std::span<const double> p) const;

  /// Copy with the listed rows made absorbing.
  Generator with_absorbing(const std::vector<bool>& rows) const;

  Eigen::SparseMatrix<double, Eigen::RowMajor> to_sparse() const;

 private:
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> vals_;
  std::vector<double> diag_;
};

/// Matrix Market coordinate, real, general; 1-based, diagonal included.
void write_matrix_market(std::ostream& out, const Generator& A);

}  // namespace slackcme
