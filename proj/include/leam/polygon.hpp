// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "leam/error.hpp"

namespace leam {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

// |shoelace sum| / 2 over a closed polygon given as its distinct vertices
// (no repeated closing point). Throws degenerate_polygon for fewer than
// three vertices.
double polygon_area(std::span<const Vec2> points);

// True when the closed polygon has no zero-length edges, no fold-back
// collinear corners, and no crossing or touching non-adjacent edges.
bool polygon_is_simple(std::span<const Vec2> points);

}  // namespace leam
