#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "slackcme/types.hpp"

namespace slackcme {

/// Compile a target-set expression over species names, e.g.
///
///     X > 30 && Z > 30
///     A == 0 || B == 0
///     X1 == 1 && (X2 == 1 || X2 == 2)
///     X + 2*Z <= 10
///
/// Comparisons are ==, !=, <, <=, >, >= between integer-linear expressions;
/// they combine with !, &&, || and parentheses. Throws ParseError.
StatePredicate parse_predicate(std::string_view expression,
                               const std::vector<std::string>& species);

}  // namespace slackcme
