#include "slackcme/statespace.hpp"

#include <algorithm>
#include <deque>

#include "graph.hpp"

namespace slackcme {

StateSpace::StateSpace(std::size_t dim, std::vector<State> states)
    : dim_(dim), size_(states.size()) {
  data_.reserve(states.size() * dim);
  index_.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    if (s.size() != dim) throw StateSpaceError("state has wrong length");
    if (std::any_of(s.begin(), s.end(), [](int v) { return v < 0; }))
      throw StateSpaceError("state has a negative copy number");
    data_.insert(data_.end(), s.begin(), s.end());
    if (!index_.emplace(std::move(states[i]), i).second)
      throw StateSpaceError("duplicate state in state space");
  }
}

std::optional<std::size_t> StateSpace::find(std::span<const int> x) const {
  if (x.size() != dim_) return std::nullopt;
  const auto it = index_.find(State(x.begin(), x.end()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> StateSpace::select(const StatePredicate& pred) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size_; ++i)
    if (pred(state(i))) out.push_back(i);
  return out;
}

std::vector<bool> StateSpace::mask(const StatePredicate& pred) const {
  std::vector<bool> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = pred(state(i));
  return out;
}

StateSpace enumerate_box(const std::vector<int>& upper, const StatePredicate& accept,
                         const GradeFn& grade, const PruneFn& prune) {
  const std::size_t d = upper.size();
  std::vector<std::pair<long long, State>> found;
  State x(d, 0);
  if (d == 0) throw StateSpaceError("cannot enumerate states of a network without species");

  // Odometer over the box, depth-first so that pruning cuts whole subtrees.
  std::size_t depth = 0;
  x[0] = -1;
  while (true) {
    if (++x[depth] > upper[depth] || (prune && !prune(x, depth + 1))) {
      if (depth == 0) break;
      --depth;
      continue;
    }
    if (depth + 1 == d) {
      if (accept(x)) found.emplace_back(grade(x), x);
      continue;
    }
    ++depth;
    x[depth] = -1;
  }
  std::sort(found.begin(), found.end());
  std::vector<State> states;
  states.reserve(found.size());
  for (auto& f : found) states.push_back(std::move(f.second));
  return StateSpace(d, std::move(states));
}

IntrinsicConstraints intrinsic_constraints(const ReactionNetwork& net,
                                           const std::vector<bool>& covered,
                                           const std::optional<State>& x0) {
  const std::size_t d = net.species_count();
  IntrinsicConstraints out;
  out.upper.assign(d, -1);
  std::vector<IntrinsicBound> bounds;
  bool have_bounds = false;
  for (std::size_t j = 0; j < d; ++j) {
    if (covered[j]) continue;
    if (!have_bounds) {
      bounds = intrinsic_bounds(net);
      have_bounds = true;
    }
    const auto it = std::find_if(bounds.begin(), bounds.end(),
                                 [&](const IntrinsicBound& b) { return b.species == j; });
    const std::string& name = net.species()[j].name;
    if (it == bounds.end())
      throw StateSpaceError("species '" + name +
                            "' is unbounded: no conservation row covers it and no conservation "
                            "law of the network bounds it");
    if (!x0)
      throw StateSpaceError("an initial state is required to bound species '" + name +
                            "' by its conservation law");
    long long total = 0;
    for (std::size_t i = 0; i < d; ++i) total += static_cast<long long>(it->law[i]) * (*x0)[i];
    out.upper[j] = static_cast<int>(total / it->law[j]);
    const bool known = std::any_of(out.laws.begin(), out.laws.end(),
                                   [&](const auto& l) { return l.first == it->law; });
    if (!known) out.laws.emplace_back(it->law, total);
  }
  return out;
}

StateSpace enumerate_halfspace(const ReactionNetwork& net, const ConservationSpec& spec,
                               const std::optional<State>& x0) {
  const std::size_t d = net.species_count();
  const std::size_t m = spec.rows();
  if (spec.N.size() != m) throw StateSpaceError("N must have one entry per row of W");
  for (const auto& row : spec.W) {
    if (row.size() != d) throw StateSpaceError("W must have one column per species");
    if (std::any_of(row.begin(), row.end(), [](int v) { return v < 0; }))
      throw StateSpaceError("state enumeration needs non-negative conservation coefficients");
  }
  if (x0 && x0->size() != d) throw StateSpaceError("initial state has wrong length");

  std::vector<bool> covered(d, false);
  std::vector<int> upper(d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    int best = -1;
    for (std::size_t i = 0; i < m; ++i) {
      if (spec.W[i][j] <= 0) continue;
      const int b = std::max(0, spec.N[i]) / spec.W[i][j];
      best = best < 0 ? b : std::min(best, b);
    }
    covered[j] = best >= 0;
    upper[j] = best;
  }
  const auto intrinsic = intrinsic_constraints(net, covered, x0);
  for (std::size_t j = 0; j < d; ++j)
    if (!covered[j]) upper[j] = intrinsic.upper[j];

  auto partial_dot = [](const std::vector<int>& w, std::span<const int> x, std::size_t depth) {
    long long s = 0;
    for (std::size_t j = 0; j < depth; ++j) s += static_cast<long long>(w[j]) * x[j];
    return s;
  };
  auto prune = [&](std::span<const int> x, std::size_t depth) {
    for (std::size_t i = 0; i < m; ++i)
      if (partial_dot(spec.W[i], x, depth) > spec.N[i]) return false;
    for (const auto& [law, total] : intrinsic.laws)
      if (partial_dot(law, x, depth) > total) return false;
    return true;
  };
  auto accept = [&](std::span<const int> x) {
    for (const auto& [law, total] : intrinsic.laws)
      if (partial_dot(law, x, d) != total) return false;
    return true;
  };
  auto grade = [&](std::span<const int> x) {
    long long g = 0;
    for (std::size_t i = 0; i < m; ++i) g += partial_dot(spec.W[i], x, d);
    return g;
  };
  StateSpace space = enumerate_box(upper, accept, grade, prune);
  if (x0 && !space.contains(*x0))
    throw StateSpaceError("initial state lies outside the truncated state space");
  space.set_spec(spec);
  return space;
}

StateSpace enumerate_states(const SlackNetwork& snet, const std::optional<State>& x0) {
  return enumerate_halfspace(snet.base(), snet.spec(), x0);
}

Generator assemble_generator(const StateSpace& space, const ReactionNetwork& net,
                             const IntensityFn& intensity, ExitPolicy policy,
                             std::size_t redirect_to) {
  const std::size_t n = space.size();
  if (policy == ExitPolicy::Redirect && redirect_to >= n)
    throw StateSpaceError("redirect state is not in the state space");
  std::vector<std::vector<int>> deltas;
  for (std::size_t r = 0; r < net.reaction_count(); ++r) deltas.push_back(net.reaction_vector(r));

  std::vector<Triplet> entries;
  State y(space.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = space.state(i);
    for (std::size_t r = 0; r < deltas.size(); ++r) {
      const double rate = intensity(r, x);
      if (!(rate > 0.0)) continue;
      for (std::size_t k = 0; k < y.size(); ++k) y[k] = x[k] + deltas[r][k];
      if (const auto j = space.find(y)) {
        entries.push_back({i, *j, rate});
        continue;
      }
      switch (policy) {
        case ExitPolicy::Forbid:
          throw StateSpaceError("internal error: a positive-rate transition leaves the state space");
        case ExitPolicy::Sink:
          entries.push_back({i, n, rate});
          break;
        case ExitPolicy::Redirect:
          if (redirect_to != i) entries.push_back({i, redirect_to, rate});
          break;
        case ExitPolicy::Drop:
          break;
      }
    }
  }
  return Generator::from_triplets(policy == ExitPolicy::Sink ? n + 1 : n, std::move(entries));
}

Generator build_generator(const StateSpace& space, const SlackNetwork& snet) {
  if (space.dim() != snet.base().species_count())
    throw StateSpaceError("state space and network disagree on the species count");
  return assemble_generator(
      space, snet.base(),
      [&](std::size_t r, std::span<const int> x) { return slack_intensity(snet, r, x); },
      ExitPolicy::Forbid);
}

std::vector<CommunicationClass> communication_classes(const Generator& A) {
  const std::size_t n = A.dim();
  std::size_t count = 0;
  const auto comp =
      detail::strong_components(n, [&](std::size_t v) { return A.targets(v); }, &count);

  std::vector<bool> open(count, false);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : A.targets(i))
      if (comp[j] != comp[i]) open[comp[i]] = true;

  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> order(count, unset);
  std::vector<CommunicationClass> classes;
  for (std::size_t i = 0; i < n; ++i) {
    auto& slot = order[comp[i]];
    if (slot == unset) {
      slot = classes.size();
      classes.push_back({{}, !open[comp[i]]});
    }
    classes[slot].states.push_back(i);
  }
  return classes;
}

std::vector<bool> reachable_from(const Generator& A, std::size_t from,
                                 const std::vector<bool>& stop) {
  std::vector<bool> seen(A.dim(), false);
  std::deque<std::size_t> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    if (!stop.empty() && stop[v]) continue;
    for (std::size_t w : A.targets(v)) {
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return seen;
}

std::vector<bool> can_reach(const Generator& A, const std::vector<bool>& target) {
  const std::size_t n = A.dim();
  std::vector<std::size_t> start(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : A.targets(i)) ++start[j + 1];
  for (std::size_t j = 0; j < n; ++j) start[j + 1] += start[j];
  std::vector<std::size_t> pred(start.back());
  auto fill = start;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : A.targets(i)) pred[fill[j]++] = i;

  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i)
    if (target[i]) {
      seen[i] = true;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t k = start[v]; k < start[v + 1]; ++k) {
      if (!seen[pred[k]]) {
        seen[pred[k]] = true;
        queue.push_back(pred[k]);
      }
    }
  }
  return seen;
}

bool accessibility(const Generator& A, std::size_t from, const std::vector<std::size_t>& K) {
  if (from >= A.dim()) throw StateSpaceError("source state index out of range");
  if (K.empty()) throw StateSpaceError("target set is empty");
  std::vector<bool> target(A.dim(), false);
  for (std::size_t k : K) {
    if (k >= A.dim()) throw StateSpaceError("target state index out of range");
    target[k] = true;
  }
  const auto seen = reachable_from(A, from, target);
  return std::any_of(K.begin(), K.end(), [&](std::size_t k) { return seen[k]; });
}

bool accessibility(const StateSpace& space, const Generator& A, std::span<const int> from,
                   const StatePredicate& K) {
  const auto i = space.find(from);
  if (!i) throw StateSpaceError("source state is not in the state space");
  const auto targets = space.select(K);
  if (targets.empty()) throw StateSpaceError("target set is disjoint from the state space");
  return accessibility(A, *i, targets);
}

}  // namespace slackcme
