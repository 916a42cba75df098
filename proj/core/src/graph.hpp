#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

namespace slackcme::detail {

// Iterative Tarjan. `successors(v)` returns an iterable range of node ids.
// Component ids are assigned in reverse topological order of the condensation.
template <class Successors>
std::vector<std::size_t> strong_components(std::size_t n, Successors&& successors,
                                           std::size_t* component_count = nullptr) {
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, comps = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unset) continue;
    std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, next] = work.back();
      const auto& succ = successors(v);
      if (next < std::size(succ)) {
        const std::size_t w = succ[next++];
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
        } while (w != v);
        ++comps;
      }
      const std::size_t done = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
    }
  }
  if (component_count) *component_count = comps;
  return comp;
}

}  // namespace slackcme::detail
