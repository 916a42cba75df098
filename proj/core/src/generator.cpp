#include "slackcme/generator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "slackcme/types.hpp"

namespace slackcme {

Generator Generator::from_triplets(std::size_t dim, std::vector<Triplet> entries) {
  for (const auto& t : entries) {
    if (t.row >= dim || t.col >= dim) throw Error("generator entry out of range");
    if (t.row == t.col) throw Error("generator triplets must be off-diagonal");
    if (!(t.value >= 0.0) || !std::isfinite(t.value))
      throw Error("generator rates must be finite and non-negative");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  Generator g;
  g.diag_.assign(dim, 0.0);
  g.row_ptr_.assign(dim + 1, 0);
  std::size_t row = 0;
  for (std::size_t k = 0; k < entries.size();) {
    const auto& t = entries[k];
    double v = 0.0;
    std::size_t e = k;
    while (e < entries.size() && entries[e].row == t.row && entries[e].col == t.col)
      v += entries[e++].value;
    k = e;
    if (v == 0.0) continue;
    while (row < t.row) g.row_ptr_[++row] = g.cols_.size();
    g.cols_.push_back(t.col);
    g.vals_.push_back(v);
  }
  while (row < dim) g.row_ptr_[++row] = g.cols_.size();

  for (std::size_t i = 0; i < dim; ++i) {
    double s = 0.0;
    for (double v : g.rates(i)) s += v;
    g.diag_[i] = -s;
  }
  return g;
}

double Generator::rate(std::size_t i, std::size_t j) const {
  if (i == j) return diag_[i];
  const auto t = targets(i);
  const auto it = std::lower_bound(t.begin(), t.end(), j);
  if (it == t.end() || *it != j) return 0.0;
  return rates(i)[static_cast<std::size_t>(it - t.begin())];
}

double Generator::max_exit_rate() const {
  double m = 0.0;
  for (double d : diag_) m = std::max(m, -d);
  return m;
}

double Generator::max_row_sum_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    double s = diag_[i];
    for (double v : rates(i)) s += v;
    const double scale = std::max(1.0, -diag_[i]);
    worst = std::max(worst, std::abs(s) / scale);
  }
  return worst;
}

std::vector<double> Generator::left_multiply(std::span<const double> p) const {
  std::vector<double> y(dim(), 0.0);
  for (std::size_t i = 0; i < dim(); ++i) {
    const double pi = p[i];
    if (pi == 0.0) continue;
    y[i] += pi * diag_[i];
    const auto t = targets(i);
    const auto r = rates(i);
    for (std::size_t k = 0; k < t.size(); ++k) y[t[k]] += pi * r[k];
  }
  return y;
}

Generator Generator::with_absorbing(const std::vector<bool>& rows) const {
  Generator g;
  g.diag_ = diag_;
  g.row_ptr_.assign(dim() + 1, 0);
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!rows[i]) {
      const auto t = targets(i);
      const auto r = rates(i);
      g.cols_.insert(g.cols_.end(), t.begin(), t.end());
      g.vals_.insert(g.vals_.end(), r.begin(), r.end());
    } else {
      g.diag_[i] = 0.0;
    }
    g.row_ptr_[i + 1] = g.cols_.size();
  }
  return g;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> Generator::to_sparse() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(nonzeros() + dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    if (diag_[i] != 0.0) t.emplace_back(idx, idx, diag_[i]);
    const auto c = targets(i);
    const auto r = rates(i);
    for (std::size_t k = 0; k < c.size(); ++k)
      t.emplace_back(idx, static_cast<Eigen::Index>(c[k]), r[k]);
  }
  const auto n = static_cast<Eigen::Index>(dim());
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void write_matrix_market(std::ostream& out, const Generator& A) {
  std::size_t nnz = A.nonzeros();
  for (std::size_t i = 0; i < A.dim(); ++i)
    if (A.diagonal(i) != 0.0) ++nnz;
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.dim() << ' ' << A.dim() << ' ' << nnz << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < A.dim(); ++i) {
    // Entries of a row in ascending column order, diagonal in place.
    bool diag_done = A.diagonal(i) == 0.0;
    const auto c = A.targets(i);
    const auto r = A.rates(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (!diag_done && c[k] > i) {
        out << i + 1 << ' ' << i + 1 << ' ' << A.diagonal(i) << '\n';
        diag_done = true;
      }
      out << i + 1 << ' ' << c[k] + 1 << ' ' << r[k] << '\n';
    }
    if (!diag_done) out << i + 1 << ' ' << i + 1 << ' ' << A.diagonal(i) << '\n';
  }
}

}  // namespace slackcme
