#include "slackcme/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

namespace slackcme {

SsaModel SsaModel::from_network(const ReactionNetwork& net) {
  SsaModel m;
  m.d_ = net.species_count();
  for (std::size_t r = 0; r < net.reaction_count(); ++r) {
    m.rates_.push_back(net.reaction(r).rate_constant);
    m.reactants_.push_back(net.reactant(r).stoich);
    m.deltas_.push_back(net.reaction_vector(r));
  }
  return m;
}

SsaModel SsaModel::from_slack(const SlackNetwork& snet) {
  SsaModel m = from_network(snet.base());
  m.W_ = snet.spec().W;
  m.N_ = snet.spec().N;
  for (std::size_t r = 0; r < snet.base().reaction_count(); ++r)
    m.gates_.push_back(snet.reactant_slack(r));
  return m;
}

double SsaModel::propensities(std::span<const int> x, std::vector<double>& out) const {
  out.resize(rates_.size());
  long long y[16];
  std::vector<long long> y_heap;
  long long* slack = y;
  if (N_.size() > 16) {
    y_heap.resize(N_.size());
    slack = y_heap.data();
  }
  for (std::size_t i = 0; i < N_.size(); ++i) {
    long long s = N_[i];
    for (std::size_t j = 0; j < d_; ++j) s -= static_cast<long long>(W_[i][j]) * x[j];
    slack[i] = s;
  }
  double total = 0.0;
  for (std::size_t r = 0; r < rates_.size(); ++r) {
    double a = rates_[r];
    if (!gates_.empty()) {
      for (std::size_t i = 0; i < N_.size(); ++i)
        if (slack[i] < gates_[r][i]) a = 0.0;
    }
    for (std::size_t j = 0; j < d_ && a != 0.0; ++j)
      if (reactants_[r][j] != 0) a *= falling_factorial(x[j], reactants_[r][j]);
    out[r] = a;
    total += a;
  }
  return total;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

SampleRng::SampleRng(std::uint64_t seed, std::uint64_t index)
    : engine_(splitmix64(seed ^ splitmix64(index))) {}

double SampleRng::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

const State& Trajectory::state_at(double t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto k = static_cast<std::size_t>(it - times.begin());
  return states[k == 0 ? 0 : k - 1];
}

namespace {

std::size_t pick(const std::vector<double>& a, double total, double u) {
  double target = u * total, acc = 0.0;
  std::size_t last = 0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r] <= 0.0) continue;
    acc += a[r];
    last = r;
    if (target < acc) return r;
  }
  return last;
}

void apply(State& x, const std::vector<int>& delta) {
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += delta[j];
}

template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(n, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    pool.emplace_back([=, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

Trajectory simulate(const SsaModel& model, const State& x0, double t_end, std::uint64_t seed,
                    std::uint64_t sample_index) {
  if (x0.size() != model.species_count()) throw Error("initial state has wrong length");
  Trajectory tr;
  tr.seed = seed;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  SampleRng rng(seed, sample_index);
  std::vector<double> a;
  State x = x0;
  double t = 0.0;
  while (true) {
    const double total = model.propensities(x, a);
    if (!(total > 0.0)) {
      tr.absorbed = true;
      break;
    }
    t += rng.exponential(total);
    if (t > t_end) break;
    apply(x, model.delta(pick(a, total, rng.uniform())));
    tr.times.push_back(t);
    tr.states.push_back(x);
  }
  return tr;
}

MfptEstimate estimate_mfpt(const SsaModel& model, const State& x0, const StatePredicate& K,
                           std::size_t n, std::uint64_t seed, const SsaOptions& options) {
  if (n < 2) throw Error("estimate_mfpt needs at least two samples");
  if (x0.size() != model.species_count()) throw Error("initial state has wrong length");
  const double cap = options.time_cap.value_or(std::numeric_limits<double>::infinity());
  // NaN marks a censored run.
  std::vector<double> hit(n, std::numeric_limits<double>::quiet_NaN());
  parallel_for(n, options.threads, [&](std::size_t i) {
    SampleRng rng(seed, i);
    std::vector<double> a;
    State x = x0;
    double t = 0.0;
    while (!K(x)) {
      const double total = model.propensities(x, a);
      if (!(total > 0.0)) return;
      t += rng.exponential(total);
      if (t > cap) return;
      apply(x, model.delta(pick(a, total, rng.uniform())));
    }
    hit[i] = t;
  });

  MfptEstimate out;
  // Kahan sums in sample order, independent of the thread split.
  double sum = 0.0, c = 0.0;
  for (double h : hit) {
    if (std::isnan(h)) {
      ++out.n_censored;
      continue;
    }
    ++out.n_hit;
    const double y = h - c;
    const double s = sum + y;
    c = (s - sum) - y;
    sum = s;
  }
  if (out.n_hit == 0) throw Error("every SSA run was censored");
  out.mean = sum / static_cast<double>(out.n_hit);
  double ss = 0.0;
  c = 0.0;
  for (double h : hit) {
    if (std::isnan(h)) continue;
    const double y = (h - out.mean) * (h - out.mean) - c;
    const double s = ss + y;
    c = (s - ss) - y;
    ss = s;
  }
  if (out.n_hit > 1) {
    const double var = ss / static_cast<double>(out.n_hit - 1);
    out.std_error = std::sqrt(var / static_cast<double>(out.n_hit));
  }
  return out;
}

std::vector<std::pair<State, double>> empirical_density(const SsaModel& model, const State& x0,
                                                        double t, std::size_t n,
                                                        std::uint64_t seed,
                                                        const SsaOptions& options) {
  if (n == 0) throw Error("empirical_density needs at least one sample");
  if (x0.size() != model.species_count()) throw Error("initial state has wrong length");
  std::vector<State> final_state(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    SampleRng rng(seed, i);
    std::vector<double> a;
    State x = x0;
    double now = 0.0;
    while (true) {
      const double total = model.propensities(x, a);
      if (!(total > 0.0)) break;
      now += rng.exponential(total);
      if (now > t) break;
      apply(x, model.delta(pick(a, total, rng.uniform())));
    }
    final_state[i] = std::move(x);
  });
  std::map<State, std::size_t> counts;
  for (auto& s : final_state) ++counts[s];
  std::vector<std::pair<State, double>> out;
  for (auto& [s, k] : counts)
    out.emplace_back(s, static_cast<double>(k) / static_cast<double>(n));
  return out;
}

}  // namespace slackcme
