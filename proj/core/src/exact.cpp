#include "slackcme/exact.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <numeric>

namespace slackcme::exact {
namespace {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;
using RMatrix = std::vector<std::vector<Rational>>;

RMatrix to_rational(const IntMatrix& m) {
  RMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i].assign(m[i].begin(), m[i].end());
  }
  return out;
}

// In-place reduced row echelon form; returns pivot columns.
std::vector<std::size_t> rref(RMatrix& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
    std::size_t pivot = row;
    while (pivot < a.size() && a[pivot][col] == 0) ++pivot;
    if (pivot == a.size()) continue;
    std::swap(a[row], a[pivot]);
    const Rational lead = a[row][col];
    for (auto& v : a[row]) v /= lead;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == row || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t c = col; c < cols; ++c) a[r][c] -= f * a[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

int rank(const IntMatrix& m) {
  if (m.empty()) return 0;
  RMatrix a = to_rational(m);
  return static_cast<int>(rref(a, m.front().size()).size());
}

IntMatrix null_space(const IntMatrix& m) {
  if (m.empty()) return {};
  const std::size_t cols = m.front().size();
  RMatrix a = to_rational(m);
  const auto pivots = rref(a, cols);

  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;

  IntMatrix basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -a[k][free];

    Integer lcm = 1;
    for (const auto& q : v) {
      const Integer d = boost::multiprecision::denominator(q);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
    std::vector<Integer> iv(cols);
    Integer g = 0;
    for (std::size_t i = 0; i < cols; ++i) {
      iv[i] = boost::multiprecision::numerator(Rational(v[i] * lcm));
      g = boost::multiprecision::gcd(g, abs(iv[i]));
    }
    std::vector<int> row(cols);
    for (std::size_t i = 0; i < cols; ++i) {
      row[i] = static_cast<int>(iv[i] / g);
    }
    basis.push_back(std::move(row));
  }
  return basis;
}

IntMatrix transpose(const IntMatrix& m) {
  if (m.empty()) return {};
  IntMatrix t(m.front().size(), std::vector<int>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.empty() || b.empty()) return IntMatrix(a.size());
  const std::size_t inner = b.size();
  const std::size_t cols = b.front().size();
  IntMatrix out(a.size(), std::vector<int>(cols, 0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

}  // namespace slackcme::exact
