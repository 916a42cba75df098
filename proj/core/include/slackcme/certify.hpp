#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slackcme/solver.hpp"

namespace slackcme {

struct ComplexBalanceCertificate {
  std::vector<double> c_star;
  double residual = 0.0;
};

enum class ComplexBalanceStatus {
  Certified,
  NotComplexBalanced,  ///< a steady state was found (or none can exist) and it is not balanced
  NoConvergence,       ///< the Newton iteration did not reach a steady state
};

struct ComplexBalanceResult {
  ComplexBalanceStatus status = ComplexBalanceStatus::NoConvergence;
  std::optional<ComplexBalanceCertificate> certificate;
  /// Deficiency zero and weakly reversible: a balanced state must exist.
  bool deficiency_zero_weakly_reversible = false;
  std::string message;
};

struct ComplexBalanceOptions {
  double tolerance = 1e-9;
  int max_iterations = 200;
};

/// Damped Newton on the mass-action steady-state equations in log
/// coordinates, restricted to the compatibility class of the all-ones
/// vector, followed by a per-complex balance check.
ComplexBalanceResult find_complex_balance(const ReactionNetwork& net,
                                          const ComplexBalanceOptions& options = {});

/// max over complexes of |inflow - outflow| at concentrations c, with
/// mass-action fluxes k c^nu (kinetics tags are ignored).
double complex_balance_residual(const ReactionNetwork& net, const std::vector<double>& c);

/// prod_i c_i^{x_i} / x_i! over the space, normalized.
Distribution product_form_stationary(std::shared_ptr<const StateSpace> space,
                                     const std::vector<double>& c_star);

/// Same, on the slack state space with bound N.
Distribution product_form_stationary(const SlackNetwork& snet, const std::vector<double>& c_star,
                                     int N, const std::optional<State>& x0 = std::nullopt);

/// Certificate for V(x) = exp(w . x): drift <= -C V + D everywhere, with
/// the box ||x_w||_inf <= M checked state by state.
struct LyapunovCertificate {
  std::vector<int> w;
  double C = 0.0;
  double D = 0.0;
  int M = 0;
};

struct DriftCoefficient {
  std::string term;  ///< "1", "X", "X*(X-1)" or "X*Z"
  double value = 0.0;
};

struct LyapunovResult {
  std::optional<LyapunovCertificate> certificate;
  std::string message;
  /// Coefficients of Q(x) = drift / V(x) in the falling-factorial basis of
  /// the weighted species, for the first configuration of the rest.
  std::vector<DriftCoefficient> coefficients;
  /// Leading coefficient per weighted species (same configuration).
  std::vector<DriftCoefficient> leading;
};

/// Weighted species (w_i > 0) span the box; species with w_i = 0 must be
/// bounded by a conservation law, with totals taken from x0. Intensities of
/// order above two, negative weights, a positive mixed coefficient or a
/// non-negative leading coefficient make the result inconclusive.
LyapunovResult lyapunov_certificate(const ReactionNetwork& net, const std::vector<int>& w,
                                    const std::optional<State>& x0 = std::nullopt);

}  // namespace slackcme
