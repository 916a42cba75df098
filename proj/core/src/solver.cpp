#include "slackcme/solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "band_solve.hpp"

namespace slackcme {

double Distribution::mass() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

double Distribution::at(std::span<const int> x) const {
  const auto i = space->find(x);
  return i ? p[*i] : 0.0;
}

namespace {

using SparseCol = Eigen::SparseMatrix<double, Eigen::ColMajor>;

Eigen::VectorXd lu_solve_refined(const SparseCol& M, const Eigen::VectorXd& b) {
  Eigen::SparseLU<SparseCol> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success) throw Error("sparse LU factorization failed");
  Eigen::VectorXd x = lu.solve(b);
  const Eigen::VectorXd r = b - M * x;
  x += lu.solve(r);
  return x;
}

std::vector<std::size_t> pick_closed_class(const Generator& A, std::optional<std::size_t> anchor) {
  const auto classes = communication_classes(A);
  std::vector<const CommunicationClass*> closed;
  std::vector<bool> reach;
  if (anchor) {
    if (*anchor >= A.dim()) throw Error("anchor state index out of range");
    reach = reachable_from(A, *anchor);
  }
  for (const auto& c : classes) {
    if (!c.closed) continue;
    if (anchor && !reach[c.states.front()]) continue;
    closed.push_back(&c);
  }
  if (closed.size() != 1)
    throw Error(closed.empty() ? "no closed communication class"
                               : "several closed communication classes; pass an anchor state "
                                 "that reaches exactly one of them");
  return closed.front()->states;
}

}  // namespace

StationaryResult stationary(const Generator& A, std::optional<std::size_t> anchor,
                            const SolverOptions& options) {
  const std::size_t n = A.dim();
  if (n == 0) throw Error("empty generator");
  StationaryResult out;
  out.support = pick_closed_class(A, anchor);
  const auto& sup = out.support;
  const std::size_t m = sup.size();
  out.pi.assign(n, 0.0);

  if (m == 1) {
    out.pi[sup.front()] = 1.0;
  } else {
    std::vector<std::size_t> local(n, static_cast<std::size_t>(-1));
    for (std::size_t k = 0; k < m; ++k) local[sup[k]] = k;
    // Rows of A^T restricted to the class; the last row becomes sum(pi) = 1.
    std::vector<Eigen::Triplet<double>> t;
    const auto last = static_cast<Eigen::Index>(m - 1);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = sup[k];
      const auto col = static_cast<Eigen::Index>(k);
      if (k != m - 1) t.emplace_back(col, col, A.diagonal(i));
      const auto c = A.targets(i);
      const auto r = A.rates(i);
      for (std::size_t e = 0; e < c.size(); ++e) {
        const std::size_t j = local[c[e]];
        if (j != m - 1) t.emplace_back(static_cast<Eigen::Index>(j), col, r[e]);
      }
      t.emplace_back(last, col, 1.0);
    }
    SparseCol M(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    M.setFromTriplets(t.begin(), t.end());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    b[last] = 1.0;
    const Eigen::VectorXd x = lu_solve_refined(M, b);
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double v = std::max(0.0, x[static_cast<Eigen::Index>(k)]);
      out.pi[sup[k]] = v;
      total += v;
    }
    for (double& v : out.pi) v /= total;
  }

  const auto r = A.left_multiply(out.pi);
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, std::abs(v));
  const double scale = A.norm_inf();
  out.residual = scale > 0.0 ? worst / scale : worst;
  if (out.residual > options.residual_tolerance)
    throw ToleranceError("stationary residual above tolerance", out.residual);
  return out;
}

std::vector<double> transient(const Generator& A, std::span<const double> p0, double t,
                              const SolverOptions& options) {
  if (t < 0.0) throw Error("transient time must be non-negative");
  if (p0.size() != A.dim()) throw Error("initial distribution has wrong length");
  std::vector<double> p(p0.begin(), p0.end());
  const double lambda = A.max_exit_rate();
  if (t == 0.0 || lambda == 0.0) return p;

  // Poisson(L) weights in log space; L can be large.
  const double L = lambda * t;
  const double tail = options.poisson_tail;
  const std::size_t mode = static_cast<std::size_t>(std::floor(L));
  auto log_weight = [&](std::size_t k) {
    return -L + static_cast<double>(k) * std::log(L) - std::lgamma(static_cast<double>(k) + 1.0);
  };
  // Left point: drop terms whose cumulative weight is below tail / 2.
  std::size_t left = 0;
  double dropped = 0.0;
  for (std::size_t k = 0; k < mode; ++k) {
    const double w = std::exp(log_weight(k));
    if (dropped + w >= tail / 2) break;
    dropped += w;
    left = k + 1;
  }
  std::vector<double> weights;
  double cum = dropped;
  for (std::size_t k = left;; ++k) {
    const double w = std::exp(log_weight(k));
    weights.push_back(w);
    cum += w;
    if (k > mode && 1.0 - cum < tail / 2) break;
    if (k > mode && w < std::numeric_limits<double>::min()) break;
  }

  std::vector<double> v = p, next(p.size()), acc(p.size(), 0.0);
  auto step = [&] {
    // v <- v (I + A / lambda)
    const auto y = A.left_multiply(v);
    for (std::size_t i = 0; i < v.size(); ++i) next[i] = v[i] + y[i] / lambda;
    v.swap(next);
  };
  for (std::size_t k = 0; k < left; ++k) step();
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (k > 0) step();
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += weights[k] * v[i];
  }
  // Renormalize by the retained Poisson mass so that probability is conserved.
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  for (double& x : acc) x = std::max(0.0, x / wsum);

  const double in = std::accumulate(p0.begin(), p0.end(), 0.0);
  const double out = std::accumulate(acc.begin(), acc.end(), 0.0);
  if (std::abs(out - in) > options.mass_tolerance)
    throw ToleranceError("uniformization lost probability mass", std::abs(out - in));
  return acc;
}

std::vector<std::vector<double>> transient_grid(const Generator& A, std::span<const double> p0,
                                                std::span<const double> times,
                                                const SolverOptions& options) {
  std::vector<std::vector<double>> out;
  std::vector<double> p(p0.begin(), p0.end());
  double now = 0.0;
  for (double t : times) {
    if (t < now) throw Error("time grid must be non-negative and non-decreasing");
    p = transient(A, p, t - now, options);
    now = t;
    out.push_back(p);
  }
  return out;
}

namespace {

// Solve (-Q_R) m = 1 over the states flagged in `R`; returns m per state
// of A (zero outside R) and the relative residual.
std::pair<std::vector<double>, double> reduced_solve(const Generator& A,
                                                     const std::vector<bool>& R,
                                                     const std::vector<bool>& K,
                                                     const SolverOptions& options) {
  const std::size_t n = A.dim();
  std::vector<std::size_t> local(n, static_cast<std::size_t>(-1)), members;
  for (std::size_t i = 0; i < n; ++i)
    if (R[i]) {
      local[i] = members.size();
      members.push_back(i);
    }
  const std::size_t m = members.size();
  std::vector<detail::Rate> rates;
  std::vector<double> exit(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = members[k];
    const auto c = A.targets(i);
    const auto r = A.rates(i);
    for (std::size_t e = 0; e < c.size(); ++e) {
      if (R[c[e]]) {
        rates.push_back({k, local[c[e]], r[e]});
      } else if (K[c[e]]) {
        exit[k] += r[e];
      } else {
        throw Error("internal error: transition leaves the reduced first-passage system");
      }
    }
  }

  std::vector<double> sol;
  if (options.fpt_method == FptMethod::Banded) {
    sol = detail::solve_absorbing_banded(m, rates, exit, std::vector<double>(m, 1.0),
                                         options.band_memory_limit);
  } else {
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t k = 0; k < m; ++k) {
      const auto idx = static_cast<Eigen::Index>(k);
      t.emplace_back(idx, idx, A.exit_rate(members[k]));
    }
    for (const auto& r : rates)
      t.emplace_back(static_cast<Eigen::Index>(r.from), static_cast<Eigen::Index>(r.to), -r.value);
    SparseCol M(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    M.setFromTriplets(t.begin(), t.end());
    const Eigen::VectorXd x = lu_solve_refined(M, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)));
    sol.assign(x.data(), x.data() + m);
  }
  // Hitting times are at least the mean holding time; anything else means
  // the factorization broke down even if the residual looks small.
  for (std::size_t k = 0; k < m; ++k)
    if (!(sol[k] > 0.0) || !std::isfinite(sol[k]))
      throw ToleranceError("first-passage solution is not positive", sol[k]);

  // Residual in extended precision.
  std::vector<long double> res(m);
  for (std::size_t k = 0; k < m; ++k)
    res[k] = static_cast<long double>(A.exit_rate(members[k])) * sol[k] - 1.0L;
  for (const auto& r : rates) res[r.from] -= static_cast<long double>(r.value) * sol[r.to];
  long double worst = 0.0L;
  for (auto v : res) worst = std::max(worst, std::abs(v));
  double mmax = 0.0;
  for (double v : sol) mmax = std::max(mmax, std::abs(v));
  const double scale = A.norm_inf() * mmax;
  const double residual = scale > 0.0 ? static_cast<double>(worst) / scale : 0.0;

  std::vector<double> full(n, 0.0);
  for (std::size_t k = 0; k < m; ++k) full[members[k]] = sol[k];
  return {std::move(full), residual};
}

}  // namespace

FptResult mfpt(const Generator& A, const std::vector<bool>& K, std::size_t x0,
               const SolverOptions& options) {
  if (K.size() != A.dim()) throw Error("target mask has wrong length");
  if (x0 >= A.dim()) throw Error("initial state index out of range");
  FptResult out;
  out.source = x0;
  out.target_size = static_cast<std::size_t>(std::count(K.begin(), K.end(), true));
  if (out.target_size == 0) throw AccessibilityError("non-accessible target: empty target set");
  if (K[x0]) return out;

  const auto seen = reachable_from(A, x0, K);
  const auto hits = can_reach(A.with_absorbing(K), K);
  std::vector<bool> R(A.dim(), false);
  for (std::size_t i = 0; i < A.dim(); ++i) {
    if (!seen[i] || K[i]) continue;
    if (!hits[i])
      throw AccessibilityError("non-accessible target: a state reachable from the initial state "
                               "cannot reach the target set");
    R[i] = true;
  }
  out.reduced_size = static_cast<std::size_t>(std::count(R.begin(), R.end(), true));
  auto [m, residual] = reduced_solve(A, R, K, options);
  out.mean = m[x0];
  out.residual = residual;
  if (!(out.residual <= options.residual_tolerance))
    throw ToleranceError("first-passage residual above tolerance", out.residual);
  return out;
}

std::vector<double> mfpt_all(const Generator& A, const std::vector<bool>& K,
                             const SolverOptions& options) {
  if (K.size() != A.dim()) throw Error("target mask has wrong length");
  const auto absorbed = A.with_absorbing(K);
  const auto hits = can_reach(absorbed, K);
  std::vector<bool> lost(A.dim());
  for (std::size_t i = 0; i < A.dim(); ++i) lost[i] = !hits[i];
  const auto doomed = can_reach(absorbed, lost);
  std::vector<bool> R(A.dim());
  for (std::size_t i = 0; i < A.dim(); ++i) R[i] = !K[i] && !doomed[i];
  auto [m, residual] = reduced_solve(A, R, K, options);
  if (!(residual <= options.residual_tolerance))
    throw ToleranceError("first-passage residual above tolerance", residual);
  for (std::size_t i = 0; i < A.dim(); ++i)
    if (doomed[i] && !K[i]) m[i] = std::numeric_limits<double>::infinity();
  return m;
}

std::vector<std::pair<double, double>> survival(const Generator& A, const std::vector<bool>& K,
                                                std::size_t x0, std::span<const double> times,
                                                const SolverOptions& options) {
  if (K.size() != A.dim()) throw Error("target mask has wrong length");
  if (x0 >= A.dim()) throw Error("initial state index out of range");
  if (std::count(K.begin(), K.end(), true) == 0)
    throw AccessibilityError("non-accessible target: empty target set");
  if (!K[x0]) {
    const auto seen = reachable_from(A, x0, K);
    const auto hits = can_reach(A.with_absorbing(K), K);
    for (std::size_t i = 0; i < A.dim(); ++i)
      if (seen[i] && !K[i] && !hits[i])
        throw AccessibilityError("non-accessible target: a state reachable from the initial "
                                 "state cannot reach the target set");
  }
  const auto absorbing = A.with_absorbing(K);
  std::vector<double> p0(A.dim(), 0.0);
  p0[x0] = 1.0;
  const auto path = transient_grid(absorbing, p0, times, options);
  std::vector<std::pair<double, double>> out;
  double previous = 1.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < A.dim(); ++i)
      if (!K[i]) s += path[k][i];
    // Rounding may lift the curve by an ulp; keep it monotone.
    s = std::min(std::clamp(s, 0.0, 1.0), previous);
    previous = s;
    out.emplace_back(times[k], s);
  }
  return out;
}

double l1_distance(const Distribution& p, const Distribution& q) {
  if (!p.space || !q.space) throw Error("distribution without a state space");
  if (p.space->dim() != q.space->dim()) throw Error("distributions live on incomparable spaces");
  if (p.p.size() != p.space->size() || q.p.size() != q.space->size())
    throw Error("distribution length does not match its space");
  double d = 0.0;
  for (std::size_t i = 0; i < p.space->size(); ++i) {
    const auto j = q.space->find(p.space->state(i));
    d += std::abs(p.p[i] - (j ? q.p[*j] : 0.0));
  }
  for (std::size_t j = 0; j < q.space->size(); ++j)
    if (!p.space->contains(q.space->state(j))) d += std::abs(q.p[j]);
  return d;
}

}  // namespace slackcme
