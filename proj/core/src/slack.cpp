#include "slackcme/slack.hpp"

#include <algorithm>
#include <numeric>

#include "slackcme/exact.hpp"

namespace slackcme {

std::vector<long long> ConservationSpec::weigh(std::span<const int> x) const {
  std::vector<long long> out(W.size(), 0);
  for (std::size_t i = 0; i < W.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += static_cast<long long>(W[i][j]) * x[j];
  return out;
}

std::vector<long long> ConservationSpec::slack_counts(std::span<const int> x) const {
  auto y = weigh(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = N[i] - y[i];
  return y;
}

bool ConservationSpec::admits(std::span<const int> x) const {
  const auto y = slack_counts(x);
  return std::all_of(y.begin(), y.end(), [](long long v) { return v >= 0; });
}

ConservationSpec ConservationSpec::with_bound(int bound) const {
  ConservationSpec out = *this;
  std::fill(out.N.begin(), out.N.end(), bound);
  return out;
}

std::vector<std::string> SlackNetwork::slack_names() const {
  const auto taken = base_.species_names();
  auto free_name = [&](std::string name) {
    while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += "_";
    return name;
  };
  std::vector<std::string> names;
  if (slack_count() == 1) {
    names.push_back(free_name("Y"));
  } else {
    for (std::size_t i = 0; i < slack_count(); ++i)
      names.push_back(free_name("Y" + std::to_string(i + 1)));
  }
  return names;
}

ReactionNetwork SlackNetwork::expanded() const {
  auto names = base_.species_names();
  for (auto& n : slack_names()) names.push_back(std::move(n));

  auto extend = [](const Complex& c, const std::vector<int>& slack) {
    Complex out = c;
    out.stoich.insert(out.stoich.end(), slack.begin(), slack.end());
    return out;
  };

  std::vector<Complex> complexes;
  auto index_of = [&](Complex c) {
    const auto it = std::find(complexes.begin(), complexes.end(), c);
    if (it != complexes.end()) return static_cast<std::size_t>(it - complexes.begin());
    complexes.push_back(std::move(c));
    return complexes.size() - 1;
  };
  if (mode_ == SlackMode::Regular) {
    // Keep the base complex order so that S is literally unchanged.
    for (std::size_t c = 0; c < base_.complex_count(); ++c) {
      std::vector<int> column(slack_count());
      for (std::size_t i = 0; i < slack_count(); ++i) column[i] = D_[i][c];
      complexes.push_back(extend(base_.complexes()[c], column));
    }
  }

  std::vector<Reaction> reactions;
  for (std::size_t r = 0; r < base_.reaction_count(); ++r) {
    const auto from = index_of(extend(base_.reactant(r), reactant_slack_[r]));
    const auto to = index_of(extend(base_.product(r), product_slack_[r]));
    reactions.push_back({from, to, base_.reaction(r).rate_constant,
                         Kinetics::slack_gated(reactant_slack_[r])});
  }
  return ReactionNetwork(std::move(names), std::move(complexes), std::move(reactions));
}

SlackNetwork SlackNetwork::with_bound(std::vector<int> N) const {
  if (N.size() != spec_.rows()) throw SlackError("bound vector has wrong length");
  SlackNetwork out = *this;
  out.spec_.N = std::move(N);
  return out;
}

SlackNetwork SlackNetwork::with_bound(int N) const {
  return with_bound(std::vector<int>(spec_.rows(), N));
}

namespace {

void validate_spec(const ReactionNetwork& net, const ConservationSpec& spec,
                   const std::optional<State>& x0) {
  const std::size_t d = net.species_count();
  if (spec.W.empty()) throw SlackError("conservation matrix W has no rows");
  for (const auto& row : spec.W)
    if (row.size() != d) throw SlackError("W must have one column per species");
  if (spec.N.size() != spec.W.size()) throw SlackError("N must have one entry per row of W");
  if (std::any_of(spec.N.begin(), spec.N.end(), [](int v) { return v < 0; }))
    throw SlackError("bounds N must be non-negative");
  if (!spec.u.empty() && spec.u.size() != spec.W.size())
    throw SlackError("u must have one entry per row of W");
  if (x0) {
    if (x0->size() != d) throw SlackError("initial state has wrong length");
    if (!spec.admits(*x0)) throw SlackError("N < W x0 for the initial state");
  }
}

}  // namespace

SlackNetwork build_regular_slack(const ReactionNetwork& net, const ConservationSpec& spec,
                                 std::optional<State> x0) {
  validate_spec(net, spec, x0);
  const auto C = build_matrices(net).C;
  const IntMatrix WC = exact::multiply(spec.W, C);
  const std::size_t m = spec.rows();

  SlackNetwork snet(net, spec);
  snet.mode_ = SlackMode::Regular;
  snet.u_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const int row_max = std::max(0, *std::max_element(WC[i].begin(), WC[i].end()));
    snet.u_[i] = spec.u.empty() ? row_max : spec.u[i];
    if (snet.u_[i] > row_max)
      snet.warnings_.push_back("u[" + std::to_string(i) + "] = " + std::to_string(snet.u_[i]) +
                               " exceeds the least intrusive offset " + std::to_string(row_max));
  }
  snet.D_.assign(m, std::vector<int>(net.complex_count()));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t c = 0; c < net.complex_count(); ++c) {
      snet.D_[i][c] = snet.u_[i] - WC[i][c];
      if (snet.D_[i][c] < 0)
        throw SlackError("u too small: D has a negative entry in row " + std::to_string(i));
    }
  for (std::size_t r = 0; r < net.reaction_count(); ++r) {
    std::vector<int> in(m), out(m);
    for (std::size_t i = 0; i < m; ++i) {
      in[i] = snet.D_[i][net.reaction(r).reactant];
      out[i] = snet.D_[i][net.reaction(r).product];
    }
    snet.reactant_slack_.push_back(std::move(in));
    snet.product_slack_.push_back(std::move(out));
  }
  return snet;
}

SlackNetwork build_optimized_slack(const ReactionNetwork& net, const ConservationSpec& spec,
                                   std::optional<State> x0) {
  // Raising u shifts both sides of every reaction by the same amount, which
  // the cancellation below removes again, so the minimal offset is enough.
  ConservationSpec minimal = spec;
  minimal.u.clear();
  SlackNetwork snet = build_regular_slack(net, minimal, std::move(x0));
  snet.mode_ = SlackMode::Optimized;
  for (std::size_t r = 0; r < net.reaction_count(); ++r) {
    auto& in = snet.reactant_slack_[r];
    auto& out = snet.product_slack_[r];
    for (std::size_t i = 0; i < in.size(); ++i) {
      const int common = std::min(in[i], out[i]);
      in[i] -= common;
      out[i] -= common;
    }
  }
  return snet;
}

double slack_intensity(const SlackNetwork& snet, std::size_t r, std::span<const int> x) {
  const auto y = snet.spec().slack_counts(x);
  const auto& gate = snet.reactant_slack(r);
  for (std::size_t i = 0; i < gate.size(); ++i)
    if (y[i] < gate[i]) return 0.0;
  return intensity(snet.base(), r, x);
}

int score_conservation_vector(const ReactionNetwork& net, std::span<const int> w) {
  if (w.size() != net.species_count()) throw Error("conservation vector has wrong length");
  int score = 0;
  for (std::size_t r = 0; r < net.reaction_count(); ++r) {
    const auto delta = net.reaction_vector(r);
    long long dot = 0;
    for (std::size_t i = 0; i < delta.size(); ++i) dot += static_cast<long long>(delta[i]) * w[i];
    if (dot > 0) ++score;
  }
  return score;
}

std::vector<int> suggest_conservation_vector(const ReactionNetwork& net,
                                             const std::vector<std::vector<int>>& candidates) {
  if (candidates.empty()) throw Error("empty candidate list");
  auto key = [&](const std::vector<int>& w) {
    long long l1 = 0;
    for (int v : w) l1 += std::abs(v);
    return std::make_tuple(score_conservation_vector(net, w), l1, std::cref(w));
  };
  return *std::min_element(candidates.begin(), candidates.end(),
                           [&](const auto& a, const auto& b) { return key(a) < key(b); });
}

std::vector<IntrinsicBound> intrinsic_bounds(const ReactionNetwork& net) {
  std::vector<IntrinsicBound> out;
  for (auto law : conservation_laws(net)) {
    const bool non_positive = std::all_of(law.begin(), law.end(), [](int v) { return v <= 0; });
    if (non_positive)
      for (auto& v : law) v = -v;
    if (std::any_of(law.begin(), law.end(), [](int v) { return v < 0; })) continue;
    for (std::size_t i = 0; i < law.size(); ++i) {
      if (law[i] <= 0) continue;
      const bool known = std::any_of(out.begin(), out.end(),
                                     [&](const IntrinsicBound& b) { return b.species == i; });
      if (!known) out.push_back({i, law});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const IntrinsicBound& a, const IntrinsicBound& b) { return a.species < b.species; });
  return out;
}

std::vector<std::vector<int>> default_candidates(const ReactionNetwork& net) {
  const std::size_t d = net.species_count();
  if (d > 8) throw Error("default candidate enumeration is limited to 8 species");
  std::vector<bool> bounded(d, false);
  for (const auto& b : intrinsic_bounds(net)) bounded[b.species] = true;

  std::vector<std::vector<int>> out;
  std::vector<int> w(d, 0);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t i = d; i-- > 0;) {
      w[i] = static_cast<int>(c % 3);
      c /= 3;
    }
    bool ok = std::any_of(w.begin(), w.end(), [](int v) { return v != 0; });
    for (std::size_t i = 0; i < d && ok; ++i)
      if (!bounded[i] && w[i] == 0) ok = false;
    if (ok) out.push_back(w);
  }
  return out;
}

}  // namespace slackcme
