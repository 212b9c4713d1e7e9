// SPDX-License-Identifier: Apache-2.0
#include "leam/polygon.hpp"

#include <algorithm>
#include <cmath>

namespace leam {

double polygon_area(std::span<const Vec2> points) {
  if (points.size() < 3)
    throw Error(Errc::degenerate_polygon, "polygon needs at least 3 vertices");
  double twice = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec2& a = points[i];
    const Vec2& b = points[(i + 1) % points.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0;
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  if (cross(a, b, p) != 0.0) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

int sign(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

bool segments_touch(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  int o1 = sign(cross(a, b, c));
  int o2 = sign(cross(a, b, d));
  int o3 = sign(cross(c, d, a));
  int o4 = sign(cross(c, d, b));
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  return on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) ||
         on_segment(b, c, d);
}

}  // namespace

bool polygon_is_simple(std::span<const Vec2> points) {
  const std::size_t n = points.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = points[i];
    const Vec2& b = points[(i + 1) % n];
    if (a == b) return false;  // zero-length edge
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& prev = points[i];
    const Vec2& v = points[(i + 1) % n];
    const Vec2& next = points[(i + 2) % n];
    // Fold-back corner: collinear with reversed direction overlaps itself.
    if (cross(prev, v, next) == 0.0) {
      double dot = (v.x - prev.x) * (next.x - v.x) + (v.y - prev.y) * (next.y - v.y);
      if (dot < 0.0) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_touch(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

}  // namespace leam
