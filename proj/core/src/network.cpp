#include "slackcme/network.hpp"

#include <algorithm>
#include <numeric>

#include "graph.hpp"
#include "slackcme/exact.hpp"

namespace slackcme {

bool Complex::is_empty() const {
  return std::all_of(stoich.begin(), stoich.end(), [](int v) { return v == 0; });
}

int Complex::order() const { return std::accumulate(stoich.begin(), stoich.end(), 0); }

ReactionNetwork::ReactionNetwork(std::vector<std::string> species_names,
                                 std::vector<Complex> complexes, std::vector<Reaction> reactions)
    : complexes_(std::move(complexes)), reactions_(std::move(reactions)) {
  if (reactions_.empty()) throw Error("no reactions");
  for (std::size_t i = 0; i < species_names.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (species_names[i] == species_names[j])
        throw Error("duplicate species name '" + species_names[i] + "'");
    }
    species_.push_back({std::move(species_names[i]), i});
  }
  const std::size_t d = species_.size();
  for (std::size_t c = 0; c < complexes_.size(); ++c) {
    const auto& v = complexes_[c].stoich;
    if (v.size() != d) throw Error("complex " + std::to_string(c) + " has wrong length");
    if (std::any_of(v.begin(), v.end(), [](int x) { return x < 0; }))
      throw Error("complex " + std::to_string(c) + " has a negative coefficient");
    for (std::size_t o = 0; o < c; ++o) {
      if (complexes_[o] == complexes_[c]) throw Error("duplicate complex");
    }
  }
  std::vector<bool> used(complexes_.size(), false);
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    const auto& rx = reactions_[r];
    if (rx.reactant >= complexes_.size() || rx.product >= complexes_.size())
      throw Error("reaction " + std::to_string(r) + " references a missing complex");
    if (rx.reactant == rx.product) throw Error("reactant equals product");
    if (!(rx.rate_constant > 0.0)) throw Error("rate constant must be positive");
    used[rx.reactant] = used[rx.product] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end())
    throw Error("complex not referenced by any reaction");
}

std::vector<int> ReactionNetwork::reaction_vector(std::size_t r) const {
  const auto& from = reactant(r).stoich;
  const auto& to = product(r).stoich;
  std::vector<int> delta(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) delta[i] = to[i] - from[i];
  return delta;
}

std::optional<std::size_t> ReactionNetwork::species_index(std::string_view name) const {
  for (const auto& s : species_)
    if (s.name == name) return s.index;
  return std::nullopt;
}

std::vector<std::string> ReactionNetwork::species_names() const {
  std::vector<std::string> names;
  names.reserve(species_.size());
  for (const auto& s : species_) names.push_back(s.name);
  return names;
}

StructuralMatrices build_matrices(const ReactionNetwork& net) {
  const std::size_t n = net.complex_count();
  const std::size_t d = net.species_count();
  const std::size_t R = net.reaction_count();
  StructuralMatrices m;
  m.S.assign(n, std::vector<int>(R, 0));
  for (std::size_t r = 0; r < R; ++r) {
    m.S[net.reaction(r).reactant][r] = -1;
    m.S[net.reaction(r).product][r] = 1;
  }
  m.C.assign(d, std::vector<int>(n, 0));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t i = 0; i < d; ++i) m.C[i][c] = net.complexes()[c].stoich[i];
  m.Gamma = exact::multiply(m.C, m.S);
  if (d == 0) m.Gamma.clear();
  return m;
}

double falling_factorial(int m, int n) {
  if (m < n) return 0.0;
  double v = 1.0;
  for (int k = 0; k < n; ++k) v *= static_cast<double>(m - k);
  return v;
}

double intensity(const ReactionNetwork& net, std::size_t r, std::span<const int> x) {
  const auto& rx = net.reaction(r);
  const auto& alpha = net.complexes()[rx.reactant].stoich;
  std::size_t mass_action_species = alpha.size();
  if (rx.kinetics.kind == KineticsKind::SlackGated) {
    const auto& gate = rx.kinetics.slack_coefficients;
    mass_action_species = alpha.size() - gate.size();
    for (std::size_t i = 0; i < gate.size(); ++i) {
      if (x[mass_action_species + i] < gate[i]) return 0.0;
    }
  }
  double value = rx.rate_constant;
  for (std::size_t i = 0; i < mass_action_species; ++i) {
    if (alpha[i] == 0) continue;
    value *= falling_factorial(x[i], alpha[i]);
    if (value == 0.0) return 0.0;
  }
  return value;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) v = parent[v] = parent[parent[v]];
  return v;
}

}  // namespace

WeakReversibilityReport weak_reversibility(const ReactionNetwork& net) {
  const std::size_t n = net.complex_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& rx : net.reactions()) {
    adj[rx.reactant].push_back(rx.product);
    parent[find_root(parent, rx.reactant)] = find_root(parent, rx.product);
  }

  WeakReversibilityReport report;
  std::vector<std::size_t> class_of(n, static_cast<std::size_t>(-1));
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t root = find_root(parent, c);
    if (class_of[root] == static_cast<std::size_t>(-1)) {
      class_of[root] = report.linkage_classes.size();
      report.linkage_classes.emplace_back();
    }
    report.linkage_classes[class_of[root]].push_back(c);
  }

  const auto comp = detail::strong_components(
      n, [&](std::size_t v) -> const std::vector<std::size_t>& { return adj[v]; });
  report.is_weakly_reversible = std::all_of(
      report.linkage_classes.begin(), report.linkage_classes.end(), [&](const auto& members) {
        return std::all_of(members.begin(), members.end(),
                           [&](std::size_t c) { return comp[c] == comp[members.front()]; });
      });
  return report;
}

int stoichiometric_rank(const ReactionNetwork& net) {
  return exact::rank(build_matrices(net).Gamma);
}

int deficiency(const ReactionNetwork& net) {
  const int n = static_cast<int>(net.complex_count());
  const int l = static_cast<int>(weak_reversibility(net).linkage_classes.size());
  return n - l - stoichiometric_rank(net);
}

IntMatrix conservation_laws(const ReactionNetwork& net) {
  return exact::null_space(exact::transpose(build_matrices(net).Gamma));
}

}  // namespace slackcme
