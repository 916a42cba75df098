#pragma once

#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "slackcme/generator.hpp"
#include "slackcme/slack.hpp"

namespace slackcme {

/// An ordered finite set of states with an inverse index.
class StateSpace {
 public:
  /// Keeps the given order. Throws StateSpaceError on duplicates, negative
  /// entries or wrong lengths.
  StateSpace(std::size_t dim, std::vector<State> states);

  std::size_t size() const { return size_; }
  std::size_t dim() const { return dim_; }
  std::span<const int> state(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  State at(std::size_t i) const {
    const auto s = state(i);
    return {s.begin(), s.end()};
  }
  std::optional<std::size_t> find(std::span<const int> x) const;
  bool contains(std::span<const int> x) const { return find(x).has_value(); }

  /// Conservation constraints the space was enumerated from, if any.
  const std::optional<ConservationSpec>& spec() const { return spec_; }
  void set_spec(ConservationSpec spec) { spec_ = std::move(spec); }

  /// Indices of the states satisfying `pred`, ascending.
  std::vector<std::size_t> select(const StatePredicate& pred) const;
  std::vector<bool> mask(const StatePredicate& pred) const;

 private:
  std::size_t dim_ = 0;
  std::size_t size_ = 0;
  std::vector<int> data_;
  std::unordered_map<State, std::size_t, StateHash> index_;
  std::optional<ConservationSpec> spec_;
};

using GradeFn = std::function<long long(std::span<const int>)>;
/// Partial-assignment check: the first `depth` components of x are fixed.
using PruneFn = std::function<bool(std::span<const int> x, std::size_t depth)>;

/// Every x with 0 <= x <= upper that passes `accept`, ordered by grade and
/// then lexicographically. `prune` may cut partial assignments early.
StateSpace enumerate_box(const std::vector<int>& upper, const StatePredicate& accept,
                         const GradeFn& grade, const PruneFn& prune = {});

/// Per-species upper bounds and exact constraints for species that the
/// conservation rows leave unbounded but a non-negative conservation law of
/// the network bounds (gene states, for instance). Totals come from x0.
struct IntrinsicConstraints {
  std::vector<int> upper;  ///< -1 where W already bounds the species.
  std::vector<std::pair<std::vector<int>, long long>> laws;
};

/// Throws StateSpaceError naming the first species bounded neither by W nor
/// by a conservation law, or when x0 is needed and missing.
IntrinsicConstraints intrinsic_constraints(const ReactionNetwork& net,
                                           const std::vector<bool>& covered,
                                           const std::optional<State>& x0);

/// All states with W x <= N, graded by the total of W x. Species outside the
/// support of W need an intrinsic bound; those are pinned to x0's class.
StateSpace enumerate_halfspace(const ReactionNetwork& net, const ConservationSpec& spec,
                               const std::optional<State>& x0 = std::nullopt);

StateSpace enumerate_states(const SlackNetwork& snet,
                            const std::optional<State>& x0 = std::nullopt);

using IntensityFn = std::function<double(std::size_t reaction, std::span<const int> x)>;

/// What happens to a positive-rate transition whose destination is not in
/// the space.
enum class ExitPolicy {
  Forbid,    ///< internal error: the truncation should have prevented it
  Sink,      ///< sent to an extra absorbing state with index space.size()
  Redirect,  ///< added to the entry of a designated state
  Drop,      ///< rate set to zero
};

Generator assemble_generator(const StateSpace& space, const ReactionNetwork& net,
                             const IntensityFn& intensity, ExitPolicy policy,
                             std::size_t redirect_to = 0);

/// A_ij = sum of slack intensities over reactions taking state i to state j.
Generator build_generator(const StateSpace& space, const SlackNetwork& snet);

struct CommunicationClass {
  std::vector<std::size_t> states;  ///< ascending
  bool closed = false;
  bool absorbing() const { return closed && states.size() == 1; }
};

/// Strongly connected components of the positive-rate digraph, ordered by
/// smallest member.
std::vector<CommunicationClass> communication_classes(const Generator& A);

/// States reachable from `from` (including it). Expansion stops at states
/// flagged in `stop`, which are still marked reachable.
std::vector<bool> reachable_from(const Generator& A, std::size_t from,
                                 const std::vector<bool>& stop = {});

/// States from which some state of `target` is reachable.
std::vector<bool> can_reach(const Generator& A, const std::vector<bool>& target);

/// True iff a state of K is reachable from `from`.
bool accessibility(const Generator& A, std::size_t from, const std::vector<std::size_t>& K);

/// State-level form. Throws StateSpaceError when `from` is not in the space
/// or K selects no state of it.
bool accessibility(const StateSpace& space, const Generator& A, std::span<const int> from,
                   const StatePredicate& K);

}  // namespace slackcme
