#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "slackcme/statespace.hpp"

namespace slackcme {

/// Probability vector over a state space.
struct Distribution {
  std::shared_ptr<const StateSpace> space;
  std::vector<double> p;

  double mass() const;
  /// Probability of state x, zero when x is not in the space.
  double at(std::span<const int> x) const;
};

enum class FptMethod {
  Banded,    ///< subtraction-free banded elimination (default)
  SparseLU,  ///< Eigen SparseLU with one refinement step
};

struct SolverOptions {
  double residual_tolerance = 1e-10;
  double mass_tolerance = 1e-10;
  double poisson_tail = 1e-12;
  FptMethod fpt_method = FptMethod::Banded;
  std::size_t band_memory_limit = std::size_t{3} << 30;
};

struct StationaryResult {
  std::vector<double> pi;
  /// ||pi^T A||_inf / ||A||_inf.
  double residual = 0.0;
  /// The closed class the solve was restricted to.
  std::vector<std::size_t> support;
};

/// Stationary distribution on a closed communication class. With several
/// closed classes, `anchor` must pick one: the closed classes reachable from
/// the anchor state must be unique. Throws ToleranceError when the residual
/// misses the tolerance.
StationaryResult stationary(const Generator& A, std::optional<std::size_t> anchor = std::nullopt,
                            const SolverOptions& options = {});

/// p(t)^T = p0^T exp(tA) by uniformization.
std::vector<double> transient(const Generator& A, std::span<const double> p0, double t,
                              const SolverOptions& options = {});

/// p(t) on a non-decreasing grid of times, stepping from one time to the next.
std::vector<std::vector<double>> transient_grid(const Generator& A, std::span<const double> p0,
                                                std::span<const double> times,
                                                const SolverOptions& options = {});

struct FptResult {
  double mean = 0.0;
  std::size_t source = 0;
  std::size_t target_size = 0;
  /// Number of transient states in the reduced system.
  std::size_t reduced_size = 0;
  /// ||(-Q_K) m - 1||_inf / (||Q_K||_inf ||m||_inf).
  double residual = 0.0;
  /// Optional (t, P(tau > t)) samples.
  std::vector<std::pair<double, double>> survival;
};

/// Mean first passage time from x0 into K (a mask over A's states). Only the
/// states reachable from x0 before entering K take part in the solve. Throws
/// AccessibilityError ("non-accessible target") when one of them cannot
/// reach K.
FptResult mfpt(const Generator& A, const std::vector<bool>& K, std::size_t x0,
               const SolverOptions& options = {});

/// Mean first passage time from every state outside K that can reach K;
/// other entries are +infinity.
std::vector<double> mfpt_all(const Generator& A, const std::vector<bool>& K,
                             const SolverOptions& options = {});

/// P(tau > t) on a non-decreasing grid, from the chain with K made absorbing.
std::vector<std::pair<double, double>> survival(const Generator& A, const std::vector<bool>& K,
                                                std::size_t x0, std::span<const double> times,
                                                const SolverOptions& options = {});

/// Sum of |p_x - q_x| over the union of both supports. The spaces may differ
/// (states missing from one side count as zero) but must share a dimension.
double l1_distance(const Distribution& p, const Distribution& q);

}  // namespace slackcme
