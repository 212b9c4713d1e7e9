// SPDX-License-Identifier: Apache-2.0
#include "leam/solid_ir.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <tuple>

#include "leam/polygon.hpp"
#include "text_util.hpp"

namespace leam {

using detail::split_lines;
using detail::split_ws;
using detail::strip_comment;
using detail::trim;

std::string_view role_name(Role r) {
  switch (r) {
    case Role::substrate: return "substrate";
    case Role::patch: return "patch";
    case Role::slot: return "slot";
    case Role::feedline: return "feedline";
    case Role::ground: return "ground";
    case Role::stub: return "stub";
    case Role::other: return "other";
  }
  return "other";
}

std::optional<Role> role_from_name(std::string_view name) {
  for (Role r : {Role::substrate, Role::patch, Role::slot, Role::feedline, Role::ground,
                 Role::stub, Role::other})
    if (role_name(r) == name) return r;
  return std::nullopt;
}

std::string_view axis_name(Axis a) {
  switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "z";
}

std::optional<Axis> axis_from_name(std::string_view name) {
  if (name == "x") return Axis::x;
  if (name == "y") return Axis::y;
  if (name == "z") return Axis::z;
  return std::nullopt;
}

std::string_view plane_name(Plane p) {
  switch (p) {
    case Plane::xy: return "xy";
    case Plane::yz: return "yz";
    case Plane::zx: return "zx";
  }
  return "xy";
}

std::optional<Plane> plane_from_name(std::string_view name) {
  if (name == "xy") return Plane::xy;
  if (name == "yz") return Plane::yz;
  if (name == "zx") return Plane::zx;
  return std::nullopt;
}

std::string_view bool_op_name(BoolOp op) {
  switch (op) {
    case BoolOp::add: return "add";
    case BoolOp::subtract: return "subtract";
    case BoolOp::intersect: return "intersect";
  }
  return "subtract";
}

std::set<std::string> SolidList::materials_used() const {
  std::set<std::string> out;
  for (const Solid& s : solids) out.insert(s.material);
  return out;
}

const Solid* SolidList::find(std::string_view name) const {
  for (const Solid& s : solids)
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

[[noreturn]] void fail(Errc code, long line, const std::string& message) {
  throw Error(code, "line " + std::to_string(line) + ": " + message, line);
}

double parse_decimal(std::string_view text, long line) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    fail(Errc::format_error, line, "malformed decimal '" + std::string(text) + "'");
  if (!std::isfinite(v)) fail(Errc::format_error, line, "non-finite decimal");
  return v;
}

Expr parse_field_expr(std::string_view text, long line) {
  try {
    return parse_expr(text);
  } catch (const Error& e) {
    fail(Errc::format_error, line, std::string("bad expression: ") + e.what());
  }
}

std::pair<Expr, Expr> parse_expr_range(std::string_view text, long line) {
  std::size_t sep = text.find("..");
  if (sep == std::string_view::npos)
    fail(Errc::format_error, line, "expected '<expr> .. <expr>'");
  return {parse_field_expr(trim(text.substr(0, sep)), line),
          parse_field_expr(trim(text.substr(sep + 2)), line)};
}

std::pair<Expr, Expr> parse_expr_pair(std::string_view text, long line) {
  std::size_t sep = text.find(',');
  if (sep == std::string_view::npos)
    fail(Errc::format_error, line, "expected '<expr> , <expr>'");
  return {parse_field_expr(trim(text.substr(0, sep)), line),
          parse_field_expr(trim(text.substr(sep + 1)), line)};
}

// One solid block under construction.
struct SolidDraft {
  long line = 0;
  Solid solid;
  bool has_role = false, has_material = false;
  std::string shape_kind;
  std::map<std::string, std::pair<Expr, Expr>> ranges;  // xrange/yrange/zrange/range/center
  std::map<std::string, Expr> exprs;                    // outer_radius/inner_radius/base/height
  std::optional<Axis> axis;
  std::optional<Plane> plane;
  std::vector<std::pair<Expr, Expr>> points;
};

Solid finish_solid(SolidDraft& d) {
  auto require_range = [&](const char* key) -> std::pair<Expr, Expr> {
    auto it = d.ranges.find(key);
    if (it == d.ranges.end())
      fail(Errc::format_error, d.line, "solid '" + d.solid.name + "' is missing '" + key + "'");
    return it->second;
  };
  auto require_expr = [&](const char* key) -> Expr {
    auto it = d.exprs.find(key);
    if (it == d.exprs.end())
      fail(Errc::format_error, d.line, "solid '" + d.solid.name + "' is missing '" + key + "'");
    return it->second;
  };

  if (!d.has_role) fail(Errc::format_error, d.line, "solid '" + d.solid.name + "' has no role");
  if (!d.has_material || d.solid.material.empty())
    fail(Errc::format_error, d.line, "solid '" + d.solid.name + "' has no material");
  if (d.shape_kind.empty())
    fail(Errc::format_error, d.line, "solid '" + d.solid.name + "' has no shape");

  if (d.shape_kind == "brick") {
    BrickSpec b;
    std::tie(b.xmin, b.xmax) = require_range("xrange");
    std::tie(b.ymin, b.ymax) = require_range("yrange");
    std::tie(b.zmin, b.zmax) = require_range("zrange");
    d.solid.shape = std::move(b);
  } else if (d.shape_kind == "cylinder") {
    CylinderSpec c;
    if (!d.axis) fail(Errc::format_error, d.line, "cylinder is missing 'axis'");
    c.axis = *d.axis;
    std::tie(c.center1, c.center2) = require_range("center");
    c.outer_radius = require_expr("outer_radius");
    c.inner_radius = require_expr("inner_radius");
    std::tie(c.range_min, c.range_max) = require_range("range");
    d.solid.shape = std::move(c);
  } else {  // extrude2d, enforced at the 'shape:' line
    Extrude2DSpec e;
    if (!d.plane) fail(Errc::format_error, d.line, "extrude2d is missing 'plane'");
    e.plane = *d.plane;
    e.base = require_expr("base");
    e.height = require_expr("height");
    if (d.points.size() < 4)
      fail(Errc::format_error, d.line, "extrude2d needs at least 3 distinct points plus closure");
    if (!(d.points.front() == d.points.back()))
      throw Error(Errc::open_polygon,
                  "solid '" + d.solid.name + "': polygon is not explicitly closed");
    d.points.pop_back();
    e.points = std::move(d.points);
    d.solid.shape = std::move(e);
  }
  return std::move(d.solid);
}

}  // namespace

SolidList parse_solid_list(std::string_view text, bool dimensioned) {
  SolidList list;
  list.dimensioned = dimensioned;

  std::optional<SolidDraft> draft;
  auto close_draft = [&] {
    if (!draft) return;
    for (const Solid& s : list.solids)
      if (s.name == draft->solid.name)
        throw Error(Errc::duplicate_solid, "duplicate solid '" + draft->solid.name + "'");
    list.solids.push_back(finish_solid(*draft));
    draft.reset();
  };

  const auto lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const long lineno = static_cast<long>(idx + 1);
    std::string_view line = trim(strip_comment(lines[idx]));
    if (line.empty()) continue;

    if (line.starts_with("param ")) {
      close_draft();
      if (!dimensioned)
        fail(Errc::format_error, lineno, "'param' lines are only valid in dimensioned lists");
      std::string_view rest = trim(line.substr(6));
      std::size_t eq = rest.find('=');
      if (eq == std::string_view::npos) fail(Errc::format_error, lineno, "expected 'param <name> = <decimal>'");
      std::string name(trim(rest.substr(0, eq)));
      if (!is_identifier(name)) fail(Errc::format_error, lineno, "bad parameter name '" + name + "'");
      double value = parse_decimal(trim(rest.substr(eq + 1)), lineno);
      try {
        list.parameters.define(name, value);
      } catch (const Error& e) {
        fail(e.code(), lineno, e.what());
      }
      continue;
    }

    if (line.starts_with("solid ")) {
      close_draft();
      std::string name(trim(line.substr(6)));
      if (!is_identifier(name)) fail(Errc::format_error, lineno, "bad solid name '" + name + "'");
      draft.emplace();
      draft->line = lineno;
      draft->solid.name = std::move(name);
      continue;
    }

    if (line.starts_with("boolean:")) {
      close_draft();
      if (!dimensioned)
        fail(Errc::format_error, lineno, "'boolean' lines are only valid in dimensioned lists");
      auto parts = split_ws(trim(line.substr(8)));
      if (parts.size() != 3)
        fail(Errc::format_error, lineno, "expected 'boolean: <kind> <target> <tool>'");
      BooleanStep step;
      if (parts[0] == "add") step.kind = BoolOp::add;
      else if (parts[0] == "subtract") step.kind = BoolOp::subtract;
      else if (parts[0] == "intersect") step.kind = BoolOp::intersect;
      else fail(Errc::format_error, lineno, "unknown boolean kind '" + std::string(parts[0]) + "'");
      step.target = std::string(parts[1]);
      step.tool = std::string(parts[2]);
      list.boolean_plan.push_back(std::move(step));
      continue;
    }

    // Anything else must be a 'key: value' field inside a solid block.
    std::size_t colon = line.find(':');
    if (!draft || colon == std::string_view::npos)
      fail(Errc::format_error, lineno, "unexpected line '" + std::string(line) + "'");
    std::string key(trim(line.substr(0, colon)));
    std::string_view value = trim(line.substr(colon + 1));

    if (key == "role") {
      auto r = role_from_name(value);
      if (!r) throw Error(Errc::unknown_role, "line " + std::to_string(lineno) + ": unknown role '" + std::string(value) + "'", lineno);
      draft->solid.role = *r;
      draft->has_role = true;
    } else if (key == "material") {
      draft->solid.material = std::string(value);
      draft->has_material = true;
    } else if (key == "component") {
      draft->solid.component = std::string(value);
    } else if (key == "position") {
      draft->solid.position_hint = std::string(value);
    } else if (key == "shape") {
      if (value != "brick" && value != "cylinder" && value != "extrude2d")
        throw Error(Errc::unknown_shape, "line " + std::to_string(lineno) + ": unknown shape '" + std::string(value) + "'", lineno);
      draft->shape_kind = std::string(value);
    } else if (key == "xrange" || key == "yrange" || key == "zrange" || key == "range") {
      draft->ranges[key] = parse_expr_range(value, lineno);
    } else if (key == "center") {
      draft->ranges[key] = parse_expr_pair(value, lineno);
    } else if (key == "outer_radius" || key == "inner_radius" || key == "base" || key == "height") {
      draft->exprs[key] = parse_field_expr(value, lineno);
    } else if (key == "axis") {
      draft->axis = axis_from_name(value);
      if (!draft->axis) fail(Errc::format_error, lineno, "bad axis '" + std::string(value) + "'");
    } else if (key == "plane") {
      draft->plane = plane_from_name(value);
      if (!draft->plane) fail(Errc::format_error, lineno, "bad plane '" + std::string(value) + "'");
    } else if (key == "point") {
      draft->points.push_back(parse_expr_pair(value, lineno));
    } else {
      fail(Errc::format_error, lineno, "unknown field '" + key + "'");
    }
  }
  close_draft();

  validate_solid_list(list);
  return list;
}

namespace {

void for_each_shape_expr(const Solid& s, const std::function<void(const Expr&)>& fn) {
  if (const auto* b = std::get_if<BrickSpec>(&s.shape)) {
    for (const Expr* e : {&b->xmin, &b->xmax, &b->ymin, &b->ymax, &b->zmin, &b->zmax}) fn(*e);
  } else if (const auto* c = std::get_if<CylinderSpec>(&s.shape)) {
    for (const Expr* e : {&c->center1, &c->center2, &c->outer_radius, &c->inner_radius,
                          &c->range_min, &c->range_max})
      fn(*e);
  } else if (const auto* x = std::get_if<Extrude2DSpec>(&s.shape)) {
    fn(x->base);
    fn(x->height);
    for (const auto& [px, py] : x->points) {
      fn(px);
      fn(py);
    }
  }
}

}  // namespace

void validate_solid_list(const SolidList& list) {
  if (list.solids.empty())
    throw Error(Errc::format_error, "solid list has no solids");

  std::set<std::string> names;
  for (const Solid& s : list.solids) {
    if (!is_identifier(s.name))
      throw Error(Errc::format_error, "bad solid name '" + s.name + "'");
    if (!names.insert(s.name).second)
      throw Error(Errc::duplicate_solid, "duplicate solid '" + s.name + "'");
    if (s.material.empty())
      throw Error(Errc::format_error, "solid '" + s.name + "' has no material");
    if (s.component.empty())
      throw Error(Errc::format_error, "solid '" + s.name + "' has an empty component");
    if (const auto* x = std::get_if<Extrude2DSpec>(&s.shape)) {
      if (x->points.size() < 3)
        throw Error(Errc::format_error, "solid '" + s.name + "' polygon has fewer than 3 points");
    }
  }

  if (!list.dimensioned) {
    if (!list.parameters.empty())
      throw Error(Errc::format_error, "stage-1 list must not carry parameters");
    if (!list.boolean_plan.empty())
      throw Error(Errc::format_error, "stage-1 list must not carry a boolean plan");
    return;
  }

  // Every referenced parameter must be declared.
  for (const Solid& s : list.solids) {
    for_each_shape_expr(s, [&](const Expr& e) {
      for (const std::string& p : free_params(e))
        if (!list.parameters.contains(p))
          throw Error(Errc::unbound_parameter,
                      "solid '" + s.name + "' references undeclared parameter '" + p + "'");
    });
  }

  // Numeric shape invariants under the active environment.
  for (const Solid& s : list.solids) {
    if (const auto* b = std::get_if<BrickSpec>(&s.shape)) {
      auto check = [&](const Expr& lo, const Expr& hi, const char* ax) {
        if (eval_expr(lo, list.parameters) > eval_expr(hi, list.parameters))
          throw Error(Errc::format_error,
                      "solid '" + s.name + "': " + ax + " range has min > max");
      };
      check(b->xmin, b->xmax, "x");
      check(b->ymin, b->ymax, "y");
      check(b->zmin, b->zmax, "z");
    } else if (const auto* c = std::get_if<CylinderSpec>(&s.shape)) {
      double ri = eval_expr(c->inner_radius, list.parameters);
      double ro = eval_expr(c->outer_radius, list.parameters);
      if (ri < 0.0)
        throw Error(Errc::format_error, "solid '" + s.name + "': inner radius is negative");
      if (ri >= ro)
        throw Error(Errc::format_error, "solid '" + s.name + "': inner radius >= outer radius");
      if (eval_expr(c->range_min, list.parameters) > eval_expr(c->range_max, list.parameters))
        throw Error(Errc::format_error, "solid '" + s.name + "': axial range has min > max");
    } else if (const auto* x = std::get_if<Extrude2DSpec>(&s.shape)) {
      if (eval_expr(x->height, list.parameters) <= 0.0)
        throw Error(Errc::format_error, "solid '" + s.name + "': extrusion height must be > 0");
      std::vector<Vec2> pts;
      pts.reserve(x->points.size());
      for (const auto& [px, py] : x->points)
        pts.push_back({eval_expr(px, list.parameters), eval_expr(py, list.parameters)});
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
          if (pts[i] == pts[j])
            throw Error(Errc::format_error,
                        "solid '" + s.name + "': polygon points are not distinct");
      if (!polygon_is_simple(pts))
        throw Error(Errc::format_error,
                    "solid '" + s.name + "': polygon is self-intersecting");
    }
  }

  // Boolean plan: names resolve, applied sequentially, tools consumed.
  std::set<std::string> alive = names;
  for (const BooleanStep& step : list.boolean_plan) {
    if (step.target == step.tool)
      throw Error(Errc::format_error, "boolean step uses the same solid as target and tool");
    for (const std::string* n : {&step.target, &step.tool}) {
      if (!names.count(*n))
        throw Error(Errc::unknown_solid, "boolean step references unknown solid '" + *n + "'");
      if (!alive.count(*n))
        throw Error(Errc::unknown_solid,
                    "boolean step references already-consumed solid '" + *n + "'");
    }
    alive.erase(step.tool);
  }

  // Slot solids must be removed by some subtract step.
  for (const Solid& s : list.solids) {
    if (s.role != Role::slot) continue;
    bool used = std::any_of(list.boolean_plan.begin(), list.boolean_plan.end(),
                            [&](const BooleanStep& st) {
                              return st.kind == BoolOp::subtract && st.tool == s.name;
                            });
    if (!used)
      throw Error(Errc::format_error,
                  "slot solid '" + s.name + "' is never subtracted in the boolean plan");
  }
}

std::string serialize_solid_list(const SolidList& list) {
  validate_solid_list(list);
  std::string out;
  bool first_block = true;
  auto block_break = [&] {
    if (!first_block) out += '\n';
    first_block = false;
  };

  if (list.dimensioned && !list.parameters.empty()) {
    block_break();
    for (const auto& [name, value] : list.parameters.items())
      out += "param " + name + " = " + format_number(value) + "\n";
  }

  for (const Solid& s : list.solids) {
    block_break();
    out += "solid " + s.name + "\n";
    out += "  role: " + std::string(role_name(s.role)) + "\n";
    out += "  material: " + s.material + "\n";
    if (s.component != "component1") out += "  component: " + s.component + "\n";
    if (!s.position_hint.empty()) out += "  position: " + s.position_hint + "\n";
    if (const auto* b = std::get_if<BrickSpec>(&s.shape)) {
      out += "  shape: brick\n";
      out += "  xrange: " + to_text(b->xmin) + " .. " + to_text(b->xmax) + "\n";
      out += "  yrange: " + to_text(b->ymin) + " .. " + to_text(b->ymax) + "\n";
      out += "  zrange: " + to_text(b->zmin) + " .. " + to_text(b->zmax) + "\n";
    } else if (const auto* c = std::get_if<CylinderSpec>(&s.shape)) {
      out += "  shape: cylinder\n";
      out += "  axis: " + std::string(axis_name(c->axis)) + "\n";
      out += "  center: " + to_text(c->center1) + ", " + to_text(c->center2) + "\n";
      out += "  outer_radius: " + to_text(c->outer_radius) + "\n";
      out += "  inner_radius: " + to_text(c->inner_radius) + "\n";
      out += "  range: " + to_text(c->range_min) + " .. " + to_text(c->range_max) + "\n";
    } else if (const auto* x = std::get_if<Extrude2DSpec>(&s.shape)) {
      out += "  shape: extrude2d\n";
      out += "  plane: " + std::string(plane_name(x->plane)) + "\n";
      out += "  base: " + to_text(x->base) + "\n";
      out += "  height: " + to_text(x->height) + "\n";
      for (const auto& [px, py] : x->points)
        out += "  point: " + to_text(px) + ", " + to_text(py) + "\n";
      out += "  point: " + to_text(x->points.front().first) + ", " +
             to_text(x->points.front().second) + "\n";
    }
  }

  if (list.dimensioned && !list.boolean_plan.empty()) {
    block_break();
    for (const BooleanStep& step : list.boolean_plan)
      out += "boolean: " + std::string(bool_op_name(step.kind)) + " " + step.target + " " +
             step.tool + "\n";
  }
  return out;
}

std::vector<ConstraintResult> validate_constraints(
    const SolidList& list, const std::vector<std::pair<std::string, Expr>>& constraints,
    double tolerance) {
  if (!list.dimensioned)
    throw Error(Errc::format_error, "constraints require a dimensioned list");
  std::vector<ConstraintResult> out;
  out.reserve(constraints.size());
  for (const auto& [name, rhs] : constraints) {
    ConstraintResult r;
    r.name = name;
    r.rhs = rhs;
    r.lhs_value = list.parameters.get(name);
    r.rhs_value = eval_expr(rhs, list.parameters);
    r.residual = std::abs(r.lhs_value - r.rhs_value);
    r.pass = r.residual <= tolerance;
    out.push_back(std::move(r));
  }
  return out;
}

std::pair<std::string, Expr> parse_constraint(std::string_view text) {
  std::size_t eq = text.find('=');
  if (eq == std::string_view::npos)
    throw Error(Errc::format_error, "constraint must look like 'NAME = EXPR'");
  std::string name(trim(text.substr(0, eq)));
  if (!is_identifier(name))
    throw Error(Errc::format_error, "bad constraint parameter name '" + name + "'");
  return {std::move(name), parse_expr(trim(text.substr(eq + 1)))};
}

}  // namespace leam
