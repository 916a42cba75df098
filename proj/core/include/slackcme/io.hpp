#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "slackcme/certify.hpp"
#include "slackcme/ssa.hpp"

namespace slackcme {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

Json to_json(const ReactionNetwork& net);
Json to_json(const StructuralMatrices& m);
Json to_json(const SlackNetwork& snet);
Json to_json(const ConservationSpec& spec);
Json to_json(const ComplexBalanceCertificate& cert);
Json to_json(const LyapunovCertificate& cert);
Json to_json(const WeakReversibilityReport& report);

/// {"W": [[...]], "N": [...] | N, "u": [...] optional}; N may be omitted when
/// `default_bound` is given.
ConservationSpec conservation_spec_from_json(const Json& j, std::optional<int> default_bound = {});

/// Header "species..., probability", one row per state.
void write_distribution_csv(std::ostream& out, const StateSpace& space,
                            const std::vector<double>& p, const std::vector<std::string>& names);
/// Header "t, survival".
void write_curve_csv(std::ostream& out, const std::vector<std::pair<double, double>>& curve);
/// Header "species..., frequency".
void write_density_csv(std::ostream& out, const std::vector<std::pair<State, double>>& density,
                       const std::vector<std::string>& names);
/// Header "t, species...".
void write_trajectory_csv(std::ostream& out, const Trajectory& tr,
                          const std::vector<std::string>& names);

}  // namespace slackcme
