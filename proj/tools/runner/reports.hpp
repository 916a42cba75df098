#pragma once

#include <optional>
#include <vector>

#include "slackcme/io.hpp"

namespace slackcme::tools {

/// Network, structural matrices, deficiency and linkage classes.
Json parse_report(const ReactionNetwork& net);

/// Slack network plus a before/after comparison of deficiency and weak
/// reversibility.
Json slack_report(const ReactionNetwork& net, const ConservationSpec& spec, SlackMode mode,
                  const std::optional<State>& x0 = std::nullopt);

/// Weight vector for V(x) = exp(w . x): one on every species that no
/// non-negative conservation law bounds, zero elsewhere.
std::vector<int> suggest_lyapunov_weights(const ReactionNetwork& net);

/// Structural report: weak reversibility, deficiency, linkage classes,
/// complex balance and a Lyapunov certificate for `w` (suggested if absent).
Json check_report(const ReactionNetwork& net, const std::optional<std::vector<int>>& w,
                  const std::optional<State>& x0 = std::nullopt);

}  // namespace slackcme::tools
