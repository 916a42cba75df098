#pragma once

#include <memory>
#include <optional>

#include "slackcme/statespace.hpp"

namespace slackcme {

/// A finite region of the state space used by the competing truncations.
struct Region {
  enum class Kind { Rectangle, HalfSpace };
  Kind kind = Kind::HalfSpace;
  /// Rectangle: per-species upper bounds; -1 leaves the species to its
  /// intrinsic conservation law.
  std::vector<int> upper;
  /// HalfSpace: W x <= N (u is ignored).
  ConservationSpec spec;

  static Region rectangle(std::vector<int> upper);
  static Region halfspace(ConservationSpec spec);

  bool contains(std::span<const int> x) const;
};

/// Enumerate a region. Rectangles are graded by the largest coordinate among
/// the bounded species, half spaces by the total of W x.
StateSpace enumerate_region(const ReactionNetwork& net, const Region& region,
                            const std::optional<State>& x0 = std::nullopt);

/// A truncated chain: its states, its generator and, for FSP, the index of
/// the extra absorbing sink (always space->size()).
struct TruncatedChain {
  std::shared_ptr<const StateSpace> space;
  Generator A;
  std::optional<std::size_t> sink;

  /// Index of state x in the generator, throws StateSpaceError if absent.
  std::size_t index(std::span<const int> x) const;
  /// Mask over the generator's states (the sink is never in the target).
  std::vector<bool> target_mask(const StatePredicate& pred) const;
  /// Point mass at x over the generator's states.
  std::vector<double> point_mass(std::span<const int> x) const;
};

/// Slack truncation, for uniform handling next to the alternatives.
TruncatedChain build_slack_chain(const SlackNetwork& snet, const std::optional<State>& x0);

/// Finite state projection: escaping transitions go to one absorbing sink.
TruncatedChain build_fsp(const ReactionNetwork& net, const Region& region, const State& x0);

/// Stationary FSP: escaping transitions are redirected to x_star, with
/// parallel redirected rates summed into one entry.
TruncatedChain build_sfsp(const ReactionNetwork& net, const Region& region, const State& x0,
                          const State& x_star);

/// Finite buffer: states with W x <= N; a reaction whose destination breaks
/// an inequality has rate zero.
TruncatedChain build_finite_buffer(const ReactionNetwork& net, const ConservationSpec& spec,
                                   const State& x0);

}  // namespace slackcme
