#include "slackcme/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace slackcme {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const ReactionNetwork& net) {
  Json j;
  j["species"] = net.species_names();
  Json complexes = Json::array();
  for (const auto& c : net.complexes()) complexes.push_back(c.stoich);
  j["complexes"] = complexes;
  Json reactions = Json::array();
  for (const auto& rx : net.reactions())
    reactions.push_back({{"reactant", rx.reactant}, {"product", rx.product}, {"rate", rx.rate_constant}});
  j["reactions"] = reactions;
  return j;
}

Json to_json(const StructuralMatrices& m) {
  return {{"S", m.S}, {"C", m.C}, {"Gamma", m.Gamma}};
}

Json to_json(const ConservationSpec& spec) {
  Json j{{"W", spec.W}, {"N", spec.N}};
  if (!spec.u.empty()) j["u"] = spec.u;
  return j;
}

Json to_json(const SlackNetwork& snet) {
  Json j;
  j["mode"] = snet.mode() == SlackMode::Regular ? "regular" : "optimized";
  j["W"] = snet.spec().W;
  j["N"] = snet.spec().N;
  j["u"] = snet.u();
  j["D"] = snet.D();
  j["slack_species"] = snet.slack_names();
  Json reactions = Json::array();
  for (std::size_t r = 0; r < snet.base().reaction_count(); ++r)
    reactions.push_back({{"reactant_slack", snet.reactant_slack(r)},
                         {"product_slack", snet.product_slack(r)}});
  j["reactions"] = reactions;
  const auto expanded = snet.expanded();
  j["network"] = to_json(expanded);
  j["dsl"] = to_dsl(expanded);
  if (!snet.warnings().empty()) j["warnings"] = snet.warnings();
  return j;
}

Json to_json(const ComplexBalanceCertificate& cert) {
  return {{"c_star", cert.c_star}, {"residual", cert.residual}};
}

Json to_json(const LyapunovCertificate& cert) {
  return {{"w", cert.w}, {"C", cert.C}, {"D", cert.D}, {"M", cert.M}};
}

Json to_json(const WeakReversibilityReport& report) {
  return {{"weakly_reversible", report.is_weakly_reversible},
          {"linkage_classes", report.linkage_classes}};
}

ConservationSpec conservation_spec_from_json(const Json& j, std::optional<int> default_bound) {
  if (!j.is_object() || !j.contains("W")) throw Error("conservation spec needs a \"W\" matrix");
  ConservationSpec spec;
  const Json& W = j.at("W");
  if (!W.is_array() || W.empty()) throw Error("\"W\" must be a non-empty matrix");
  // A flat vector is a single row.
  if (W.front().is_number()) spec.W.push_back(W.get<std::vector<int>>());
  else spec.W = W.get<IntMatrix>();
  if (j.contains("N")) {
    const Json& N = j.at("N");
    spec.N = N.is_number() ? std::vector<int>(spec.W.size(), N.get<int>()) : N.get<std::vector<int>>();
  } else if (default_bound) {
    spec.N.assign(spec.W.size(), *default_bound);
  } else {
    throw Error("conservation spec needs \"N\"");
  }
  if (j.contains("u")) spec.u = j.at("u").get<std::vector<int>>();
  return spec;
}

void write_distribution_csv(std::ostream& out, const StateSpace& space,
                            const std::vector<double>& p, const std::vector<std::string>& names) {
  for (const auto& n : names) out << n << ',';
  out << "probability\n";
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (int v : space.state(i)) out << v << ',';
    out << format_double(p[i]) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const std::vector<std::pair<double, double>>& curve) {
  out << "t,survival\n";
  for (const auto& [t, s] : curve) out << format_double(t) << ',' << format_double(s) << '\n';
}

void write_density_csv(std::ostream& out, const std::vector<std::pair<State, double>>& density,
                       const std::vector<std::string>& names) {
  for (const auto& n : names) out << n << ',';
  out << "frequency\n";
  for (const auto& [x, f] : density) {
    for (int v : x) out << v << ',';
    out << format_double(f) << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr,
                          const std::vector<std::string>& names) {
  out << 't';
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    out << format_double(tr.times[k]);
    for (int v : tr.states[k]) out << ',' << v;
    out << '\n';
  }
}

}  // namespace slackcme
