#include "band_solve.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/cuthill_mckee_ordering.hpp>

#include <algorithm>
#include <numeric>

#include "slackcme/types.hpp"

namespace slackcme::detail {
namespace {

struct Band {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

Band bandwidth(const std::vector<Rate>& rates, const std::vector<std::size_t>& pos) {
  Band b;
  for (const auto& r : rates) {
    const std::size_t i = pos[r.from], j = pos[r.to];
    if (i > j) b.lo = std::max(b.lo, i - j);
    else b.hi = std::max(b.hi, j - i);
  }
  return b;
}

std::vector<std::size_t> rcm_positions(std::size_t n, const std::vector<Rate>& rates) {
  using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
  Graph g(n);
  for (const auto& r : rates) boost::add_edge(r.from, r.to, g);
  std::vector<Graph::vertex_descriptor> order(n);
  boost::cuthill_mckee_ordering(g, order.rbegin());
  std::vector<std::size_t> pos(n);
  for (std::size_t k = 0; k < n; ++k) pos[order[k]] = k;
  return pos;
}

}  // namespace

std::vector<double> solve_absorbing_banded(std::size_t n, const std::vector<Rate>& rates,
                                           std::vector<double> exit, std::vector<double> b,
                                           std::size_t max_bytes) {
  if (n == 0) return {};
  std::vector<std::size_t> pos(n);
  std::iota(pos.begin(), pos.end(), 0);
  Band band = bandwidth(rates, pos);
  if (band.lo + band.hi > 2) {
    auto alt = rcm_positions(n, rates);
    const Band alt_band = bandwidth(rates, alt);
    if (alt_band.lo + alt_band.hi < band.lo + band.hi) {
      pos = std::move(alt);
      band = alt_band;
    }
  }
  const std::size_t lo = band.lo, hi = band.hi, w = lo + hi + 1;
  if (static_cast<double>(n) * static_cast<double>(w) * sizeof(double) >
      static_cast<double>(max_bytes))
    throw Error("banded first-passage solve would exceed the memory limit");

  // a(i, j) of -Q at a[i * w + j - i + lo]; off-diagonals are <= 0.
  std::vector<double> a(n * w, 0.0);
  std::vector<double> e(n), rhs(n);
  for (const auto& r : rates) {
    const std::size_t i = pos[r.from], j = pos[r.to];
    a[i * w + j + lo - i] -= r.value;
  }
  for (std::size_t s = 0; s < n; ++s) {
    e[pos[s]] = exit[s];
    rhs[pos[s]] = b[s];
  }

  for (std::size_t k = 0; k < n; ++k) {
    double* row_k = &a[k * w + lo - k];  // row_k[j] is a(k, j)
    const std::size_t jmax = std::min(n - 1, k + hi);
    double pivot = e[k];
    for (std::size_t j = k + 1; j <= jmax; ++j) pivot -= row_k[j];
    if (!(pivot > 0.0))
      throw Error("first-passage system is singular: a state cannot reach the target");
    row_k[k] = pivot;
    const std::size_t imax = std::min(n - 1, k + lo);
    for (std::size_t i = k + 1; i <= imax; ++i) {
      double* row_i = &a[i * w + lo - i];
      const double aik = row_i[k];
      if (aik == 0.0) continue;
      const double f = -aik / pivot;
      row_i[k] = 0.0;
      for (std::size_t j = k + 1; j <= jmax; ++j)
        if (j != i) row_i[j] += f * row_k[j];
      e[i] += f * e[k];
      rhs[i] += f * rhs[k];
    }
  }

  std::vector<double> m(n);
  for (std::size_t k = n; k-- > 0;) {
    const double* row_k = &a[k * w + lo - k];
    const std::size_t jmax = std::min(n - 1, k + hi);
    double s = rhs[k];
    for (std::size_t j = k + 1; j <= jmax; ++j) s -= row_k[j] * m[j];
    m[k] = s / row_k[k];
  }
  std::vector<double> out(n);
  for (std::size_t s = 0; s < n; ++s) out[s] = m[pos[s]];
  return out;
}

}  // namespace slackcme::detail
