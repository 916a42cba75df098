#include "reports.hpp"

namespace slackcme::tools {

namespace {

Json structure(const ReactionNetwork& net) {
  const auto wr = weak_reversibility(net);
  return {{"complexes", net.complex_count()},
          {"linkage_classes", wr.linkage_classes.size()},
          {"rank", stoichiometric_rank(net)},
          {"deficiency", deficiency(net)},
          {"weakly_reversible", wr.is_weakly_reversible}};
}

}  // namespace

Json parse_report(const ReactionNetwork& net) {
  Json j = to_json(net);
  j["matrices"] = to_json(build_matrices(net));
  j["structure"] = structure(net);
  j["linkage_classes"] = weak_reversibility(net).linkage_classes;
  j["conservation_laws"] = conservation_laws(net);
  j["dsl"] = to_dsl(net);
  return j;
}

Json slack_report(const ReactionNetwork& net, const ConservationSpec& spec, SlackMode mode,
                  const std::optional<State>& x0) {
  const auto snet = mode == SlackMode::Regular ? build_regular_slack(net, spec, x0)
                                               : build_optimized_slack(net, spec, x0);
  Json j = to_json(snet);
  const Json before = structure(net);
  const Json after = structure(snet.expanded());
  j["structure"] = {{"original", before}, {"slack", after}};
  j["preserved"] = before["deficiency"] == after["deficiency"] &&
                   before["weakly_reversible"] == after["weakly_reversible"];
  return j;
}

std::vector<int> suggest_lyapunov_weights(const ReactionNetwork& net) {
  std::vector<int> w(net.species_count(), 1);
  for (const auto& b : intrinsic_bounds(net)) w[b.species] = 0;
  return w;
}

Json check_report(const ReactionNetwork& net, const std::optional<std::vector<int>>& w,
                  const std::optional<State>& x0) {
  Json j;
  j["species"] = net.species_names();
  const auto wr = weak_reversibility(net);
  j["weakly_reversible"] = wr.is_weakly_reversible;
  j["deficiency"] = deficiency(net);
  j["rank"] = stoichiometric_rank(net);
  j["linkage_classes"] = wr.linkage_classes;

  const auto cb = find_complex_balance(net);
  Json cbj;
  switch (cb.status) {
    case ComplexBalanceStatus::Certified: cbj["status"] = "complex_balanced"; break;
    case ComplexBalanceStatus::NotComplexBalanced: cbj["status"] = "not_complex_balanced"; break;
    case ComplexBalanceStatus::NoConvergence: cbj["status"] = "no_convergence"; break;
  }
  if (cb.certificate) {
    cbj["c_star"] = cb.certificate->c_star;
    cbj["residual"] = cb.certificate->residual;
  }
  cbj["deficiency_zero_weakly_reversible"] = cb.deficiency_zero_weakly_reversible;
  if (!cb.message.empty()) cbj["message"] = cb.message;
  j["complex_balance"] = cbj;

  Json ly;
  const auto weights = w ? *w : suggest_lyapunov_weights(net);
  ly["w"] = weights;
  ly["suggested"] = !w.has_value();
  try {
    const auto res = lyapunov_certificate(net, weights, x0);
    if (res.certificate) ly["certificate"] = to_json(*res.certificate);
    else ly["message"] = res.message;
    Json lead = Json::object();
    for (const auto& c : res.leading) lead[c.term] = c.value;
    ly["leading"] = lead;
    Json coeff = Json::object();
    for (const auto& c : res.coefficients) coeff[c.term] = c.value;
    ly["coefficients"] = coeff;
  } catch (const Error& e) {
    ly["message"] = std::string("inconclusive: ") + e.what();
  }
  j["lyapunov"] = ly;
  return j;
}

}  // namespace slackcme::tools
