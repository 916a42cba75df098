#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "slackcme/slack.hpp"

namespace slackcme {

/// Reaction data flattened for fast propensity evaluation. Built either from
/// a plain network (mass action) or from a slack network (mass action times
/// the slack gates, with y = N - W x computed once per state).
class SsaModel {
 public:
  static SsaModel from_network(const ReactionNetwork& net);
  static SsaModel from_slack(const SlackNetwork& snet);

  std::size_t species_count() const { return d_; }
  std::size_t reaction_count() const { return rates_.size(); }
  const std::vector<int>& delta(std::size_t r) const { return deltas_[r]; }

  /// Writes all propensities at x into `out` and returns their sum.
  double propensities(std::span<const int> x, std::vector<double>& out) const;

 private:
  std::size_t d_ = 0;
  std::vector<double> rates_;
  std::vector<std::vector<int>> reactants_;
  std::vector<std::vector<int>> deltas_;
  IntMatrix W_;
  std::vector<int> N_;
  std::vector<std::vector<int>> gates_;
};

/// Per-sample random stream: std::mt19937_64 seeded with
/// splitmix64(seed ^ splitmix64(index)). Uniforms and exponentials are
/// derived by hand so results do not depend on the standard library's
/// distribution implementations.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint64_t index);
  /// Uniform on the open interval (0, 1).
  double uniform();
  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct Trajectory {
  std::vector<double> times;   ///< times[0] = 0
  std::vector<State> states;   ///< state entered at times[k]
  std::uint64_t seed = 0;
  bool absorbed = false;       ///< stopped early because the total rate was 0

  /// State occupied at time t.
  const State& state_at(double t) const;
};

/// Exact direct-method SSA until t_end (or absorption).
Trajectory simulate(const SsaModel& model, const State& x0, double t_end, std::uint64_t seed,
                    std::uint64_t sample_index = 0);

struct SsaOptions {
  /// Runs still outside K at this time are censored.
  std::optional<double> time_cap;
  /// 0 means one per hardware thread.
  std::size_t threads = 0;
};

struct MfptEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_hit = 0;
  std::size_t n_censored = 0;
};

/// Monte Carlo mean hitting time of K. Censored runs (time cap reached or an
/// absorbing state outside K) are counted separately and excluded from the
/// mean. Throws Error when every run is censored or n < 2.
MfptEstimate estimate_mfpt(const SsaModel& model, const State& x0, const StatePredicate& K,
                           std::size_t n, std::uint64_t seed, const SsaOptions& options = {});

/// Fraction of n runs occupying each state at time t, sorted by state.
std::vector<std::pair<State, double>> empirical_density(const SsaModel& model, const State& x0,
                                                        double t, std::size_t n,
                                                        std::uint64_t seed,
                                                        const SsaOptions& options = {});

}  // namespace slackcme
