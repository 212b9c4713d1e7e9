// SPDX-License-Identifier: Apache-2.0
#include "leam/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "text_util.hpp"

namespace leam {

using detail::split_lines;
using detail::split_ws;
using detail::strip_comment;
using detail::trim;

namespace {

constexpr std::uint64_t kCertificateSeed = 0x9e3779b97f4a7c15ull;
constexpr std::uint64_t kCertificateSamples = 4096;

double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vec3 sample_box(const Box3& box, std::mt19937_64& rng) {
  double x = box.lo.x + (box.hi.x - box.lo.x) * unit_double(rng);
  double y = box.lo.y + (box.hi.y - box.lo.y) * unit_double(rng);
  double z = box.lo.z + (box.hi.z - box.lo.z) * unit_double(rng);
  return {x, y, z};
}

void plane_coords(Plane plane, const Vec3& p, double& u, double& v, double& n) {
  switch (plane) {
    case Plane::xy: u = p.x; v = p.y; n = p.z; return;
    case Plane::yz: u = p.y; v = p.z; n = p.x; return;
    case Plane::zx: u = p.z; v = p.x; n = p.y; return;
  }
}

Vec3 from_plane(Plane plane, double u, double v, double n) {
  switch (plane) {
    case Plane::xy: return {u, v, n};
    case Plane::yz: return {n, u, v};
    case Plane::zx: return {v, n, u};
  }
  return {};
}

void cylinder_coords(Axis axis, const Vec3& p, double& u, double& v, double& n) {
  switch (axis) {
    case Axis::z: u = p.x; v = p.y; n = p.z; return;
    case Axis::x: u = p.y; v = p.z; n = p.x; return;
    case Axis::y: u = p.x; v = p.z; n = p.y; return;
  }
}

Vec3 from_cylinder(Axis axis, double u, double v, double n) {
  switch (axis) {
    case Axis::z: return {u, v, n};
    case Axis::x: return {n, u, v};
    case Axis::y: return {u, n, v};
  }
  return {};
}

bool point_on_polygon_boundary(std::span<const Vec2> poly, double u, double v) {
  auto on_segment = [&](const Vec2& a, const Vec2& b) {
    double cross = (b.x - a.x) * (v - a.y) - (b.y - a.y) * (u - a.x);
    if (cross != 0.0) return false;
    return std::min(a.x, b.x) <= u && u <= std::max(a.x, b.x) && std::min(a.y, b.y) <= v &&
           v <= std::max(a.y, b.y);
  };
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (on_segment(poly[i], poly[(i + 1) % poly.size()])) return true;
  return false;
}

bool point_in_polygon_even_odd(std::span<const Vec2> poly, double u, double v) {
  bool inside = false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    if ((a.y > v) != (b.y > v)) {
      double t = (v - a.y) / (b.y - a.y);
      double xint = a.x + t * (b.x - a.x);
      if (u < xint) inside = !inside;
    }
  }
  return inside;
}

bool contains_impl(const CsgNode& node, const Vec3& p, bool interior);

bool brick_contains(const BrickPrim& b, const Vec3& p, bool interior) {
  if (interior)
    return b.box.lo.x < p.x && p.x < b.box.hi.x && b.box.lo.y < p.y && p.y < b.box.hi.y &&
           b.box.lo.z < p.z && p.z < b.box.hi.z;
  return b.box.lo.x <= p.x && p.x <= b.box.hi.x && b.box.lo.y <= p.y && p.y <= b.box.hi.y &&
         b.box.lo.z <= p.z && p.z <= b.box.hi.z;
}

bool cylinder_contains(const CylinderPrim& c, const Vec3& p, bool interior) {
  double u = 0.0, v = 0.0, n = 0.0;
  cylinder_coords(c.axis, p, u, v, n);
  double du = u - c.center1;
  double dv = v - c.center2;
  double r2 = du * du + dv * dv;
  double ro2 = c.outer_radius * c.outer_radius;
  double ri2 = c.inner_radius * c.inner_radius;
  if (interior) {
    bool radial = c.inner_radius == 0.0 ? r2 < ro2 : (r2 > ri2 && r2 < ro2);
    return radial && c.range_min < n && n < c.range_max;
  }
  return r2 >= ri2 && r2 <= ro2 && c.range_min <= n && n <= c.range_max;
}

bool extrude_contains(const ExtrudePrim& e, const Vec3& p, bool interior) {
  double u = 0.0, v = 0.0, n = 0.0;
  plane_coords(e.plane, p, u, v, n);
  double top = e.base + e.height;
  if (interior) {
    if (!(e.base < n && n < top)) return false;
    return point_in_polygon_even_odd(e.polygon, u, v) &&
           !point_on_polygon_boundary(e.polygon, u, v);
  }
  if (!(e.base <= n && n <= top)) return false;
  return point_in_polygon_even_odd(e.polygon, u, v) || point_on_polygon_boundary(e.polygon, u, v);
}

bool contains_impl(const CsgNode& node, const Vec3& p, bool interior) {
  if (const BrickPrim* b = node.as_brick()) return brick_contains(*b, p, interior);
  if (const CylinderPrim* c = node.as_cylinder()) return cylinder_contains(*c, p, interior);
  if (const ExtrudePrim* e = node.as_extrude()) return extrude_contains(*e, p, interior);
  switch (*node.op()) {
    case CsgOp::unite:
      return contains_impl(*node.left(), p, interior) ||
             contains_impl(*node.right(), p, interior);
    case CsgOp::intersect:
      return contains_impl(*node.left(), p, interior) &&
             contains_impl(*node.right(), p, interior);
    case CsgOp::subtract:
      // Closed difference keeps the shared face: closed(A) and not
      // interior(B). Its interior is interior(A) and not closed(B).
      return contains_impl(*node.left(), p, interior) &&
             !contains_impl(*node.right(), p, !interior);
  }
  return false;
}

void collect_vertices(const CsgNode& node, std::vector<Vec3>& out) {
  if (const BrickPrim* b = node.as_brick()) {
    for (double x : {b->box.lo.x, b->box.hi.x})
      for (double y : {b->box.lo.y, b->box.hi.y})
        for (double z : {b->box.lo.z, b->box.hi.z}) out.push_back({x, y, z});
    return;
  }
  if (const CylinderPrim* c = node.as_cylinder()) {
    for (int k = 0; k < 8; ++k) {
      double ang = 2.0 * std::numbers::pi * k / 8.0;
      double u = c->center1 + c->outer_radius * std::cos(ang);
      double v = c->center2 + c->outer_radius * std::sin(ang);
      out.push_back(from_cylinder(c->axis, u, v, c->range_min));
      out.push_back(from_cylinder(c->axis, u, v, c->range_max));
    }
    out.push_back(from_cylinder(c->axis, c->center1, c->center2, c->range_min));
    out.push_back(from_cylinder(c->axis, c->center1, c->center2, c->range_max));
    return;
  }
  if (const ExtrudePrim* e = node.as_extrude()) {
    for (const Vec2& v : e->polygon) {
      out.push_back(from_plane(e->plane, v.x, v.y, e->base));
      out.push_back(from_plane(e->plane, v.x, v.y, e->base + e->height));
    }
    return;
  }
  collect_vertices(*node.left(), out);
  collect_vertices(*node.right(), out);
}

enum class Rel { disjoint, a_in_b, b_in_a, unknown };

bool contained_certificate(const CsgNode& inner, const CsgNode& outer) {
  std::vector<Vec3> verts;
  collect_vertices(inner, verts);
  for (const Vec3& v : verts)
    if (contains(inner, v) && !contains(outer, v)) return false;
  const Box3& box = inner.bbox();
  if (!box.valid()) return true;
  std::mt19937_64 rng(kCertificateSeed);
  for (std::uint64_t i = 0; i < kCertificateSamples; ++i) {
    Vec3 p = sample_box(box, rng);
    if (contains(inner, p) && !contains(outer, p)) return false;
  }
  return true;
}

Rel classify(const CsgNode& a, const CsgNode& b) {
  Box3 overlap = box_intersection(a.bbox(), b.bbox());
  if (!overlap.valid() || overlap.volume() == 0.0) return Rel::disjoint;

  std::mt19937_64 rng(kCertificateSeed);
  bool joint = false;
  for (std::uint64_t i = 0; i < kCertificateSamples; ++i) {
    Vec3 p = sample_box(overlap, rng);
    if (contains(a, p) && contains(b, p)) {
      joint = true;
      break;
    }
  }
  if (!joint) return Rel::disjoint;
  if (contained_certificate(b, a)) return Rel::b_in_a;
  if (contained_certificate(a, b)) return Rel::a_in_b;
  return Rel::unknown;
}

}  // namespace

Box3 box_union(const Box3& a, const Box3& b) {
  if (!a.valid()) return b;
  if (!b.valid()) return a;
  return {{std::min(a.lo.x, b.lo.x), std::min(a.lo.y, b.lo.y), std::min(a.lo.z, b.lo.z)},
          {std::max(a.hi.x, b.hi.x), std::max(a.hi.y, b.hi.y), std::max(a.hi.z, b.hi.z)}};
}

Box3 box_intersection(const Box3& a, const Box3& b) {
  return {{std::max(a.lo.x, b.lo.x), std::max(a.lo.y, b.lo.y), std::max(a.lo.z, b.lo.z)},
          {std::min(a.hi.x, b.hi.x), std::min(a.hi.y, b.hi.y), std::min(a.hi.z, b.hi.z)}};
}

const BrickPrim* CsgNode::as_brick() const { return brick_ ? &*brick_ : nullptr; }
const CylinderPrim* CsgNode::as_cylinder() const { return cylinder_ ? &*cylinder_ : nullptr; }
const ExtrudePrim* CsgNode::as_extrude() const { return extrude_ ? &*extrude_ : nullptr; }

CsgPtr CsgNode::brick(const BrickPrim& p) {
  for (double v : {p.box.lo.x, p.box.lo.y, p.box.lo.z, p.box.hi.x, p.box.hi.y, p.box.hi.z})
    if (!std::isfinite(v)) throw Error(Errc::format_error, "brick extent is not finite");
  if (!p.box.valid()) throw Error(Errc::format_error, "brick has min > max");
  auto node = std::shared_ptr<CsgNode>(new CsgNode());
  node->brick_ = p;
  node->bbox_ = p.box;
  return node;
}

CsgPtr CsgNode::cylinder(const CylinderPrim& p) {
  for (double v : {p.center1, p.center2, p.outer_radius, p.inner_radius, p.range_min, p.range_max})
    if (!std::isfinite(v)) throw Error(Errc::format_error, "cylinder extent is not finite");
  if (p.inner_radius < 0.0 || p.inner_radius >= p.outer_radius)
    throw Error(Errc::format_error, "cylinder radii must satisfy 0 <= inner < outer");
  if (p.range_min > p.range_max)
    throw Error(Errc::format_error, "cylinder axial range has min > max");
  auto node = std::shared_ptr<CsgNode>(new CsgNode());
  node->cylinder_ = p;
  double lo_u = p.center1 - p.outer_radius, hi_u = p.center1 + p.outer_radius;
  double lo_v = p.center2 - p.outer_radius, hi_v = p.center2 + p.outer_radius;
  Vec3 lo = from_cylinder(p.axis, lo_u, lo_v, p.range_min);
  Vec3 hi = from_cylinder(p.axis, hi_u, hi_v, p.range_max);
  node->bbox_ = {lo, hi};
  return node;
}

CsgPtr CsgNode::extrude(ExtrudePrim p) {
  if (p.polygon.size() < 3) throw Error(Errc::degenerate_polygon, "polygon needs 3+ vertices");
  if (!polygon_is_simple(p.polygon))
    throw Error(Errc::format_error, "extrusion polygon is self-intersecting");
  if (!(p.height > 0.0)) throw Error(Errc::format_error, "extrusion height must be > 0");
  for (const Vec2& v : p.polygon)
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw Error(Errc::format_error, "polygon vertex is not finite");
  if (!std::isfinite(p.base) || !std::isfinite(p.height))
    throw Error(Errc::format_error, "extrusion extent is not finite");

  double lo_u = p.polygon[0].x, hi_u = lo_u, lo_v = p.polygon[0].y, hi_v = lo_v;
  for (const Vec2& v : p.polygon) {
    lo_u = std::min(lo_u, v.x);
    hi_u = std::max(hi_u, v.x);
    lo_v = std::min(lo_v, v.y);
    hi_v = std::max(hi_v, v.y);
  }
  auto node = std::shared_ptr<CsgNode>(new CsgNode());
  Vec3 lo = from_plane(p.plane, lo_u, lo_v, p.base);
  Vec3 hi = from_plane(p.plane, hi_u, hi_v, p.base + p.height);
  node->bbox_ = {lo, hi};
  node->extrude_ = std::move(p);
  return node;
}

CsgPtr CsgNode::combine(CsgOp op, CsgPtr left, CsgPtr right) {
  if (!left || !right) throw Error(Errc::format_error, "boolean node needs two operands");
  auto node = std::shared_ptr<CsgNode>(new CsgNode());
  node->op_ = op;
  switch (op) {
    case CsgOp::unite: node->bbox_ = box_union(left->bbox(), right->bbox()); break;
    case CsgOp::subtract: node->bbox_ = left->bbox(); break;
    case CsgOp::intersect: node->bbox_ = box_intersection(left->bbox(), right->bbox()); break;
  }
  node->left_ = std::move(left);
  node->right_ = std::move(right);
  return node;
}

bool contains(const CsgNode& node, const Vec3& p) { return contains_impl(node, p, false); }

std::map<std::string, CsgPtr> build_primitives(const SolidList& list) {
  if (!list.dimensioned)
    throw Error(Errc::format_error, "geometry requires a dimensioned solid list");
  std::map<std::string, CsgPtr> out;
  for (const Solid& s : list.solids) {
    const ParamEnv& env = list.parameters;
    if (const auto* b = std::get_if<BrickSpec>(&s.shape)) {
      BrickPrim prim;
      prim.box = {{eval_expr(b->xmin, env), eval_expr(b->ymin, env), eval_expr(b->zmin, env)},
                  {eval_expr(b->xmax, env), eval_expr(b->ymax, env), eval_expr(b->zmax, env)}};
      out[s.name] = CsgNode::brick(prim);
    } else if (const auto* c = std::get_if<CylinderSpec>(&s.shape)) {
      CylinderPrim prim;
      prim.axis = c->axis;
      prim.center1 = eval_expr(c->center1, env);
      prim.center2 = eval_expr(c->center2, env);
      prim.outer_radius = eval_expr(c->outer_radius, env);
      prim.inner_radius = eval_expr(c->inner_radius, env);
      prim.range_min = eval_expr(c->range_min, env);
      prim.range_max = eval_expr(c->range_max, env);
      out[s.name] = CsgNode::cylinder(prim);
    } else if (const auto* x = std::get_if<Extrude2DSpec>(&s.shape)) {
      ExtrudePrim prim;
      prim.plane = x->plane;
      prim.base = eval_expr(x->base, env);
      prim.height = eval_expr(x->height, env);
      prim.polygon.reserve(x->points.size());
      for (const auto& [px, py] : x->points)
        prim.polygon.push_back({eval_expr(px, env), eval_expr(py, env)});
      out[s.name] = CsgNode::extrude(std::move(prim));
    }
  }
  return out;
}

std::map<std::string, CsgPtr> build_csg(const SolidList& list) {
  auto nodes = build_primitives(list);
  for (const BooleanStep& step : list.boolean_plan) {
    auto target = nodes.find(step.target);
    auto tool = nodes.find(step.tool);
    if (target == nodes.end())
      throw Error(Errc::unknown_solid, "boolean target '" + step.target + "' not available");
    if (tool == nodes.end())
      throw Error(Errc::unknown_solid, "boolean tool '" + step.tool + "' not available");
    CsgOp op = step.kind == BoolOp::add
                   ? CsgOp::unite
                   : step.kind == BoolOp::subtract ? CsgOp::subtract : CsgOp::intersect;
    target->second = CsgNode::combine(op, target->second, tool->second);
    nodes.erase(tool);
  }
  return nodes;
}

std::optional<double> exact_volume(const CsgNode& node) {
  if (const BrickPrim* b = node.as_brick()) return b->box.volume();
  if (const CylinderPrim* c = node.as_cylinder()) {
    double ring = c->outer_radius * c->outer_radius - c->inner_radius * c->inner_radius;
    return std::numbers::pi * ring * (c->range_max - c->range_min);
  }
  if (const ExtrudePrim* e = node.as_extrude())
    return polygon_area(e->polygon) * e->height;

  auto va = exact_volume(*node.left());
  auto vb = exact_volume(*node.right());
  Rel rel = classify(*node.left(), *node.right());
  switch (*node.op()) {
    case CsgOp::unite:
      if (rel == Rel::disjoint && va && vb) return *va + *vb;
      if (rel == Rel::b_in_a && va) return *va;
      if (rel == Rel::a_in_b && vb) return *vb;
      return std::nullopt;
    case CsgOp::subtract:
      if (rel == Rel::disjoint && va) return *va;
      if (rel == Rel::b_in_a && va && vb) return *va - *vb;
      if (rel == Rel::a_in_b) return 0.0;
      return std::nullopt;
    case CsgOp::intersect:
      if (rel == Rel::disjoint) return 0.0;
      if (rel == Rel::b_in_a && vb) return *vb;
      if (rel == Rel::a_in_b && va) return *va;
      return std::nullopt;
  }
  return std::nullopt;
}

McVolume mc_volume(const CsgNode& node, std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) throw Error(Errc::format_error, "sample count must be >= 1");
  const Box3& box = node.bbox();
  if (!box.valid() || box.volume() == 0.0)
    throw Error(Errc::empty_bounding_box, "bounding box has no volume");

  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  double sx = 0.0, sy = 0.0, sz = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Vec3 p = sample_box(box, rng);
    if (contains(node, p)) {
      ++hits;
      sx += p.x;
      sy += p.y;
      sz += p.z;
    }
  }
  McVolume out;
  out.samples = samples;
  out.seed = seed;
  out.hit_fraction = static_cast<double>(hits) / static_cast<double>(samples);
  double vol = box.volume();
  out.estimate = vol * out.hit_fraction;
  out.stderr_est =
      vol * std::sqrt(out.hit_fraction * (1.0 - out.hit_fraction) / static_cast<double>(samples));
  if (hits > 0) {
    out.centroid = {sx / static_cast<double>(hits), sy / static_cast<double>(hits),
                    sz / static_cast<double>(hits)};
    out.centroid_valid = true;
  }
  return out;
}

double check_mirror_symmetry(const CsgNode& node, Axis axis, double offset,
                             std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) throw Error(Errc::format_error, "sample count must be >= 1");
  Box3 box = node.bbox();
  if (!box.valid()) return 0.0;

  Box3 mirrored = box;
  auto reflect = [&](double v) { return 2.0 * offset - v; };
  switch (axis) {
    case Axis::x:
      mirrored.lo.x = reflect(box.hi.x);
      mirrored.hi.x = reflect(box.lo.x);
      break;
    case Axis::y:
      mirrored.lo.y = reflect(box.hi.y);
      mirrored.hi.y = reflect(box.lo.y);
      break;
    case Axis::z:
      mirrored.lo.z = reflect(box.hi.z);
      mirrored.hi.z = reflect(box.lo.z);
      break;
  }
  Box3 domain = box_union(box, mirrored);  // symmetric about the plane

  std::mt19937_64 rng(seed);
  std::uint64_t mismatches = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    Vec3 p = sample_box(domain, rng);
    Vec3 m = p;
    switch (axis) {
      case Axis::x: m.x = reflect(p.x); break;
      case Axis::y: m.y = reflect(p.y); break;
      case Axis::z: m.z = reflect(p.z); break;
    }
    if (contains(node, p) != contains(node, m)) ++mismatches;
  }
  return static_cast<double>(mismatches) / static_cast<double>(samples);
}

}  // namespace leam
