#include "slackcme/truncation.hpp"

#include <algorithm>

namespace slackcme {

Region Region::rectangle(std::vector<int> upper) {
  Region r;
  r.kind = Kind::Rectangle;
  r.upper = std::move(upper);
  return r;
}

Region Region::halfspace(ConservationSpec spec) {
  Region r;
  r.kind = Kind::HalfSpace;
  r.spec = std::move(spec);
  return r;
}

bool Region::contains(std::span<const int> x) const {
  if (std::any_of(x.begin(), x.end(), [](int v) { return v < 0; })) return false;
  if (kind == Kind::HalfSpace) return spec.admits(x);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (upper[i] >= 0 && x[i] > upper[i]) return false;
  return true;
}

StateSpace enumerate_region(const ReactionNetwork& net, const Region& region,
                            const std::optional<State>& x0) {
  if (region.kind == Region::Kind::HalfSpace) return enumerate_halfspace(net, region.spec, x0);

  const std::size_t d = net.species_count();
  if (region.upper.size() != d) throw StateSpaceError("rectangle needs one bound per species");
  std::vector<bool> covered(d);
  for (std::size_t j = 0; j < d; ++j) covered[j] = region.upper[j] >= 0;
  const auto intrinsic = intrinsic_constraints(net, covered, x0);
  std::vector<int> upper = region.upper;
  for (std::size_t j = 0; j < d; ++j)
    if (!covered[j]) upper[j] = intrinsic.upper[j];

  auto dot = [](const std::vector<int>& w, std::span<const int> x, std::size_t depth) {
    long long s = 0;
    for (std::size_t j = 0; j < depth; ++j) s += static_cast<long long>(w[j]) * x[j];
    return s;
  };
  auto prune = [&](std::span<const int> x, std::size_t depth) {
    for (const auto& [law, total] : intrinsic.laws)
      if (dot(law, x, depth) > total) return false;
    return true;
  };
  auto accept = [&](std::span<const int> x) {
    for (const auto& [law, total] : intrinsic.laws)
      if (dot(law, x, d) != total) return false;
    return true;
  };
  auto grade = [&](std::span<const int> x) {
    long long g = 0;
    for (std::size_t j = 0; j < d; ++j)
      if (covered[j]) g = std::max<long long>(g, x[j]);
    return g;
  };
  StateSpace space = enumerate_box(upper, accept, grade, prune);
  if (x0 && !space.contains(*x0))
    throw StateSpaceError("initial state lies outside the region");
  return space;
}

std::size_t TruncatedChain::index(std::span<const int> x) const {
  const auto i = space->find(x);
  if (!i) throw StateSpaceError("state is not in the truncated state space");
  return *i;
}

std::vector<bool> TruncatedChain::target_mask(const StatePredicate& pred) const {
  auto mask = space->mask(pred);
  mask.resize(A.dim(), false);
  return mask;
}

std::vector<double> TruncatedChain::point_mass(std::span<const int> x) const {
  std::vector<double> p(A.dim(), 0.0);
  p[index(x)] = 1.0;
  return p;
}

namespace {

IntensityFn mass_action(const ReactionNetwork& net) {
  return [&net](std::size_t r, std::span<const int> x) { return intensity(net, r, x); };
}

}  // namespace

TruncatedChain build_slack_chain(const SlackNetwork& snet, const std::optional<State>& x0) {
  auto space = std::make_shared<const StateSpace>(enumerate_states(snet, x0));
  Generator A = build_generator(*space, snet);
  return {std::move(space), std::move(A), std::nullopt};
}

TruncatedChain build_fsp(const ReactionNetwork& net, const Region& region, const State& x0) {
  auto space = std::make_shared<const StateSpace>(enumerate_region(net, region, x0));
  Generator A = assemble_generator(*space, net, mass_action(net), ExitPolicy::Sink);
  const std::size_t sink = space->size();
  return {std::move(space), std::move(A), sink};
}

TruncatedChain build_sfsp(const ReactionNetwork& net, const Region& region, const State& x0,
                          const State& x_star) {
  auto space = std::make_shared<const StateSpace>(enumerate_region(net, region, x0));
  const auto star = space->find(x_star);
  if (!star) throw StateSpaceError("return state x* lies outside the region");
  Generator A = assemble_generator(*space, net, mass_action(net), ExitPolicy::Redirect, *star);
  return {std::move(space), std::move(A), std::nullopt};
}

TruncatedChain build_finite_buffer(const ReactionNetwork& net, const ConservationSpec& spec,
                                   const State& x0) {
  if (!spec.admits(x0)) throw StateSpaceError("initial state violates the buffer inequality");
  auto space = std::make_shared<const StateSpace>(enumerate_halfspace(net, spec, x0));
  Generator A = assemble_generator(*space, net, mass_action(net), ExitPolicy::Drop);
  return {std::move(space), std::move(A), std::nullopt};
}

}  // namespace slackcme
