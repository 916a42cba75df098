#pragma once

// Exact linear algebra over the rationals for small integer matrices.

#include "slackcme/types.hpp"

namespace slackcme::exact {

int rank(const IntMatrix& m);

/// Basis of { v : m v = 0 }, one vector per free column of the reduced
/// echelon form, scaled to coprime integers with a positive free entry.
IntMatrix null_space(const IntMatrix& m);

IntMatrix transpose(const IntMatrix& m);

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);

}  // namespace slackcme::exact
