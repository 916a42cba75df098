#pragma once

#include <optional>
#include <span>
#include <vector>

#include "slackcme/network.hpp"

namespace slackcme {

/// Conservation bounds W x <= N with per-row complex offsets u.
struct ConservationSpec {
  IntMatrix W;
  std::vector<int> N;
  /// Empty means "least intrusive": u_i = max entry of row i of W C.
  std::vector<int> u;

  std::size_t rows() const { return W.size(); }
  /// (W x)_i for every row.
  std::vector<long long> weigh(std::span<const int> x) const;
  /// Slack counts y_i = N_i - (W x)_i.
  std::vector<long long> slack_counts(std::span<const int> x) const;
  bool admits(std::span<const int> x) const;
  /// Same matrices with every bound replaced by `bound`.
  ConservationSpec with_bound(int bound) const;
};

enum class SlackMode { Regular, Optimized };

/// A reaction network extended by implicit slack reactants. Slack species are
/// never stored in states: y is always N - W x.
class SlackNetwork {
 public:
  const ReactionNetwork& base() const { return base_; }
  const ConservationSpec& spec() const { return spec_; }
  SlackMode mode() const { return mode_; }
  /// Slack stoichiometry per base complex, D = U - W C (m x |C|).
  const IntMatrix& D() const { return D_; }
  const std::vector<int>& u() const { return u_; }
  /// Non-fatal construction notes, e.g. an offset larger than necessary.
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Slack coefficients of the (cancellation-reduced) reactant of reaction r.
  const std::vector<int>& reactant_slack(std::size_t r) const { return reactant_slack_.at(r); }
  const std::vector<int>& product_slack(std::size_t r) const { return product_slack_.at(r); }

  std::size_t slack_count() const { return spec_.rows(); }
  /// Names of the slack species in the expanded network.
  std::vector<std::string> slack_names() const;

  /// The slack network written out as an ordinary network with the slack
  /// species appended; reactions carry SlackGated kinetics.
  ReactionNetwork expanded() const;

  /// Same network with a different bound vector N (matrices unchanged).
  SlackNetwork with_bound(std::vector<int> N) const;
  SlackNetwork with_bound(int N) const;

 private:
  friend SlackNetwork build_regular_slack(const ReactionNetwork&, const ConservationSpec&,
                                          std::optional<State>);
  friend SlackNetwork build_optimized_slack(const ReactionNetwork&, const ConservationSpec&,
                                            std::optional<State>);
  SlackNetwork(ReactionNetwork base, ConservationSpec spec) : base_(std::move(base)), spec_(std::move(spec)) {}

  ReactionNetwork base_;
  ConservationSpec spec_;
  SlackMode mode_ = SlackMode::Regular;
  IntMatrix D_;
  std::vector<int> u_;
  std::vector<std::string> warnings_;
  std::vector<std::vector<int>> reactant_slack_;
  std::vector<std::vector<int>> product_slack_;
};

/// Regular slack network: complexes extended by D = U - W C, connectivity
/// unchanged. Throws SlackError when u leaves a negative entry in D or when
/// the optional initial state violates W x0 <= N.
SlackNetwork build_regular_slack(const ReactionNetwork& net, const ConservationSpec& spec,
                                 std::optional<State> x0 = std::nullopt);

/// Regular slack with minimal u, then per reaction the slack common to both
/// sides is cancelled.
SlackNetwork build_optimized_slack(const ReactionNetwork& net, const ConservationSpec& spec,
                                   std::optional<State> x0 = std::nullopt);

/// Base intensity times prod_i 1{y_i >= reactant slack coefficient i}.
double slack_intensity(const SlackNetwork& snet, std::size_t r, std::span<const int> x);

/// Number of reactions with (nu' - nu) . w > 0, i.e. the reactions that are
/// switched off on the boundary w . x = N.
int score_conservation_vector(const ReactionNetwork& net, std::span<const int> w);

/// Lowest score wins; ties go to the smaller l1 norm, then lexicographic order.
std::vector<int> suggest_conservation_vector(const ReactionNetwork& net,
                                             const std::vector<std::vector<int>>& candidates);

/// Every w in {0,1,2}^d whose support covers the species that no
/// non-negative conservation law bounds. Limited to d <= 8.
std::vector<std::vector<int>> default_candidates(const ReactionNetwork& net);

/// Species indices bounded by a non-negative conservation law of the base
/// network, paired with the law used.
struct IntrinsicBound {
  std::size_t species;
  std::vector<int> law;
};
std::vector<IntrinsicBound> intrinsic_bounds(const ReactionNetwork& net);

}  // namespace slackcme
