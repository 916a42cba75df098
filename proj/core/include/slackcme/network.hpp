#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slackcme/types.hpp"

namespace slackcme {

struct Species {
  std::string name;
  std::size_t index = 0;
};

/// Stoichiometric vector of a complex; the zero vector is the empty complex.
struct Complex {
  std::vector<int> stoich;

  bool is_empty() const;
  /// Molecularity, the sum of the coefficients.
  int order() const;
  bool operator==(const Complex&) const = default;
};

enum class KineticsKind { MassAction, SlackGated };

/// Kinetics tag of a reaction. SlackGated reactions carry the slack-reactant
/// coefficients of their reactant complex; in an expanded network the slack
/// species occupy the last `slack_coefficients.size()` species slots.
struct Kinetics {
  KineticsKind kind = KineticsKind::MassAction;
  std::vector<int> slack_coefficients;

  static Kinetics mass_action() { return {}; }
  static Kinetics slack_gated(std::vector<int> coefficients) {
    return {KineticsKind::SlackGated, std::move(coefficients)};
  }
};

struct Reaction {
  std::size_t reactant = 0;
  std::size_t product = 0;
  double rate_constant = 0.0;
  Kinetics kinetics;
};

/// An immutable chemical reaction network. The constructor validates every
/// structural invariant (distinct complexes, no self loops, positive rates,
/// every complex used by some reaction).
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species_names, std::vector<Complex> complexes,
                  std::vector<Reaction> reactions);

  std::size_t species_count() const { return species_.size(); }
  std::size_t complex_count() const { return complexes_.size(); }
  std::size_t reaction_count() const { return reactions_.size(); }

  const std::vector<Species>& species() const { return species_; }
  const std::vector<Complex>& complexes() const { return complexes_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }

  const Reaction& reaction(std::size_t r) const { return reactions_.at(r); }
  const Complex& reactant(std::size_t r) const { return complexes_[reactions_.at(r).reactant]; }
  const Complex& product(std::size_t r) const { return complexes_[reactions_.at(r).product]; }

  /// Net change nu' - nu of reaction r.
  std::vector<int> reaction_vector(std::size_t r) const;

  std::optional<std::size_t> species_index(std::string_view name) const;
  std::vector<std::string> species_names() const;

 private:
  std::vector<Species> species_;
  std::vector<Complex> complexes_;
  std::vector<Reaction> reactions_;
};

/// Connectivity (S), complex (C) and stoichiometry (Gamma = C S) matrices.
struct StructuralMatrices {
  IntMatrix S;
  IntMatrix C;
  IntMatrix Gamma;
};

/// Parse the line-oriented network DSL:
///
///     # comment
///     0 <-> X @ 1.0, 2.0
///     2X1 + X2 -> X3 @ 0.5
///
/// Species are ordered by first appearance, complexes are deduplicated.
/// Throws ParseError with the offending line and column.
ReactionNetwork parse_network(std::string_view text);

/// Emit a network in the DSL, one irreversible statement per reaction.
std::string to_dsl(const ReactionNetwork& net);

StructuralMatrices build_matrices(const ReactionNetwork& net);

/// m^(n) = m (m-1) ... (m-n+1), zero when m < n.
double falling_factorial(int m, int n);

/// Stochastic mass-action intensity of reaction r at state x. For slack-gated
/// reactions of an expanded network the trailing slack species act only
/// through the indicator y_i >= coefficient_i.
double intensity(const ReactionNetwork& net, std::size_t r, std::span<const int> x);

struct WeakReversibilityReport {
  bool is_weakly_reversible = false;
  /// Complex indices of each linkage class, ordered by smallest member.
  std::vector<std::vector<std::size_t>> linkage_classes;
};

WeakReversibilityReport weak_reversibility(const ReactionNetwork& net);

/// Rank of Gamma over the rationals.
int stoichiometric_rank(const ReactionNetwork& net);

/// delta = n - l - s.
int deficiency(const ReactionNetwork& net);

/// Integer basis (reduced echelon form, scaled to integers) of the left null
/// space of Gamma: every row r satisfies r^T Gamma = 0.
IntMatrix conservation_laws(const ReactionNetwork& net);

}  // namespace slackcme
