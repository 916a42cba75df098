#pragma once

#include <cstddef>
#include <vector>

namespace slackcme::detail {

struct Rate {
  std::size_t from;
  std::size_t to;
  double value;
};

/// Solves (-Q) m = b for a sub-generator Q of a CTMC: `rates` are the
/// non-negative off-diagonal entries among the n kept states, `exit` the
/// total rate from each state to the removed set. Every state must be able
/// to reach the removed set. Elimination is subtraction free (GTH style):
/// pivots are recomputed from tracked exit rates, so the result keeps full
/// relative accuracy even when -Q is extremely ill conditioned.
/// The states are renumbered by reverse Cuthill-McKee when that narrows the
/// band. Throws Error when the band would exceed `max_bytes`.
std::vector<double> solve_absorbing_banded(std::size_t n, const std::vector<Rate>& rates,
                                           std::vector<double> exit, std::vector<double> b,
                                           std::size_t max_bytes);

}  // namespace slackcme::detail
