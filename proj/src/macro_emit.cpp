// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "leam/macro.hpp"

namespace leam {

namespace {

std::string quote_arg(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  out += s;
  out += '"';
  return out;
}

std::string solid_path(const std::string& component, const std::string& name) {
  return component + ":" + name;
}

const char* boolean_word(BoolOp op) {
  switch (op) {
    case BoolOp::add: return "Solid.Add";
    case BoolOp::subtract: return "Solid.Subtract";
    case BoolOp::intersect: return "Solid.Intersect";
  }
  return "Solid.Subtract";
}

void member(std::string& out, std::string_view name) {
  out += "     .";
  out += name;
  out += '\n';
}

void member1(std::string& out, std::string_view name, std::string_view arg) {
  out += "     .";
  out += name;
  out += ' ';
  out += quote_arg(arg);
  out += '\n';
}

void member2(std::string& out, std::string_view name, std::string_view a, std::string_view b) {
  out += "     .";
  out += name;
  out += ' ';
  out += quote_arg(a);
  out += ", ";
  out += quote_arg(b);
  out += '\n';
}

struct Renderer {
  std::string& out;

  void operator()(const ParamDecl& p) const {
    out += "MakeSureParameterExists " + quote_arg(p.name) + ", " + quote_arg(to_text(p.value)) + "\n";
  }

  void operator()(const MaterialBlock& m) const {
    out += "With Material\n";
    member(out, "Reset");
    member1(out, "Name", m.record.name);
    if (m.record.kind == MaterialKind::normal) {
      member1(out, "Type", "Normal");
      member1(out, "Epsilon", format_number(m.record.epsilon_r));
      member1(out, "TanD", format_number(m.record.tan_delta));
    } else {
      member1(out, "Type", "Lossy metal");
      member1(out, "Sigma", format_number(m.record.conductivity));
    }
    member(out, "Create");
    out += "End With\n";
  }

  void operator()(const BrickBlock& b) const {
    out += "With Brick\n";
    member(out, "Reset");
    member1(out, "Name", b.name);
    member1(out, "Component", b.component);
    member1(out, "Material", b.material);
    member2(out, "Xrange", to_text(b.xmin), to_text(b.xmax));
    member2(out, "Yrange", to_text(b.ymin), to_text(b.ymax));
    member2(out, "Zrange", to_text(b.zmin), to_text(b.zmax));
    member(out, "Create");
    out += "End With\n";
  }

  void operator()(const CylinderBlock& c) const {
    out += "With Cylinder\n";
    member(out, "Reset");
    member1(out, "Name", c.name);
    member1(out, "Component", c.component);
    member1(out, "Material", c.material);
    member1(out, "Axis", axis_name(c.axis));
    member1(out, "Outerradius", to_text(c.outer_radius));
    member1(out, "Innerradius", to_text(c.inner_radius));
    switch (c.axis) {
      case Axis::z:
        member1(out, "Xcenter", to_text(c.center1));
        member1(out, "Ycenter", to_text(c.center2));
        member2(out, "Zrange", to_text(c.range_min), to_text(c.range_max));
        break;
      case Axis::x:
        member1(out, "Ycenter", to_text(c.center1));
        member1(out, "Zcenter", to_text(c.center2));
        member2(out, "Xrange", to_text(c.range_min), to_text(c.range_max));
        break;
      case Axis::y:
        member1(out, "Xcenter", to_text(c.center1));
        member1(out, "Zcenter", to_text(c.center2));
        member2(out, "Yrange", to_text(c.range_min), to_text(c.range_max));
        break;
    }
    member(out, "Create");
    out += "End With\n";
  }

  void operator()(const PolygonBlock& p) const {
    out += "With Polygon\n";
    member(out, "Reset");
    member1(out, "Name", p.name);
    member1(out, "Curve", p.curve_folder);
    for (std::size_t i = 0; i < p.points.size(); ++i)
      member2(out, i == 0 ? "Point" : "LineTo", to_text(p.points[i].first),
              to_text(p.points[i].second));
    member(out, "Create");
    out += "End With\n";
  }

  void operator()(const ExtrudeBlock& e) const {
    out += "With ExtrudeCurve\n";
    member(out, "Reset");
    member1(out, "Name", e.name);
    member1(out, "Component", e.component);
    member1(out, "Material", e.material);
    member1(out, "Thickness", to_text(e.thickness));
    member1(out, "Curve", e.curve_ref);
    member(out, "Create");
    out += "End With\n";
  }

  void operator()(const BooleanCmd& b) const {
    out += std::string(boolean_word(b.kind)) + " " + quote_arg(b.target) + ", " + quote_arg(b.tool) +
           "\n";
  }

  void operator()(const StoreParam& s) const {
    out += "StoreParameter " + quote_arg(s.name) + ", " + quote_arg(to_text(s.value)) + "\n";
  }

  void operator()(const RebuildCmd&) const { out += "Rebuild\n"; }
};

// Statement grouping for blank-line placement.
enum class Group { params, booleans, update, block };

Group group_of(const MacroStatement& st) {
  if (std::holds_alternative<ParamDecl>(st)) return Group::params;
  if (std::holds_alternative<BooleanCmd>(st)) return Group::booleans;
  if (std::holds_alternative<StoreParam>(st) || std::holds_alternative<RebuildCmd>(st))
    return Group::update;
  return Group::block;
}

bool blank_between(const MacroStatement& prev, const MacroStatement& cur) {
  if (std::holds_alternative<PolygonBlock>(prev) && std::holds_alternative<ExtrudeBlock>(cur))
    return false;  // a 2D+ pair stays together
  Group a = group_of(prev), b = group_of(cur);
  if (a == b && a != Group::block) return false;
  return true;
}

}  // namespace

std::string emit_macro_text(const MacroDoc& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.statements.size(); ++i) {
    if (i > 0 && blank_between(doc.statements[i - 1], doc.statements[i])) out += '\n';
    std::visit(Renderer{out}, doc.statements[i]);
  }
  return out;
}

MacroDoc emit_para(const ParamEnv& params) {
  if (params.empty())
    throw Error(Errc::format_error, "cannot emit a parameter file from an empty environment");
  MacroDoc doc;
  for (const auto& [name, value] : params.items())
    doc.statements.push_back(ParamDecl{name, Expr::number(value)});
  return doc;
}

MacroDoc emit_materials(const std::set<std::string>& used, const MaterialCatalog& catalog) {
  MacroDoc doc;
  for (const std::string& name : used) catalog.lookup(name);  // unknown names fail early
  for (const MaterialRecord& record : catalog.records())
    if (used.count(record.name)) doc.statements.push_back(MaterialBlock{record});
  return doc;
}

MacroDoc emit_3d(const SolidList& list) {
  if (!list.dimensioned)
    throw Error(Errc::format_error, "3D model emission requires a dimensioned list");
  MacroDoc doc;
  for (const Solid& s : list.solids) {
    if (const auto* b = std::get_if<BrickSpec>(&s.shape)) {
      doc.statements.push_back(BrickBlock{s.name, s.component, s.material, b->xmin, b->xmax,
                                          b->ymin, b->ymax, b->zmin, b->zmax});
    } else if (const auto* c = std::get_if<CylinderSpec>(&s.shape)) {
      doc.statements.push_back(CylinderBlock{s.name, s.component, s.material, c->axis,
                                             c->outer_radius, c->inner_radius, c->center1,
                                             c->center2, c->range_min, c->range_max});
    }
  }
  return doc;
}

MacroDoc emit_2dplus(const SolidList& list) {
  if (!list.dimensioned)
    throw Error(Errc::format_error, "2D+ model emission requires a dimensioned list");
  MacroDoc doc;
  for (const Solid& s : list.solids) {
    const auto* x = std::get_if<Extrude2DSpec>(&s.shape);
    if (!x) continue;
    if (x->points.size() < 3)
      throw Error(Errc::open_polygon, "solid '" + s.name + "': polygon has fewer than 3 points");
    // The macro grammar draws curves on the global XY plane; other planes
    // and offset bases have no representation in it.
    if (x->plane != Plane::xy)
      throw Error(Errc::unsupported_shape,
                  "solid '" + s.name + "': only xy-plane extrusions can be scripted");
    if (eval_expr(x->base, list.parameters) != 0.0)
      throw Error(Errc::unsupported_shape,
                  "solid '" + s.name + "': extrusion base must evaluate to 0 for scripting");

    PolygonBlock poly;
    poly.name = s.name + "curve";
    poly.curve_folder = "curve1";
    poly.points = x->points;
    poly.points.push_back(x->points.front());  // explicit closure
    doc.statements.push_back(std::move(poly));
    doc.statements.push_back(ExtrudeBlock{s.name, s.component, s.material, x->height,
                                          "curve1:" + s.name + "curve"});
  }
  return doc;
}

MacroDoc emit_boolean(std::span<const BooleanStep> plan, const SolidList& list) {
  MacroDoc doc;
  for (const BooleanStep& step : plan) {
    const Solid* target = list.find(step.target);
    const Solid* tool = list.find(step.tool);
    if (!target) throw Error(Errc::unknown_solid, "unknown boolean target '" + step.target + "'");
    if (!tool) throw Error(Errc::unknown_solid, "unknown boolean tool '" + step.tool + "'");
    doc.statements.push_back(BooleanCmd{step.kind, solid_path(target->component, target->name),
                                        solid_path(tool->component, tool->name)});
  }
  return doc;
}

MacroDoc emit_update_para(const ParamEnv& new_values, const ParamEnv& known) {
  MacroDoc doc;
  for (const auto& [name, value] : new_values.items()) {
    if (!known.contains(name))
      throw Error(Errc::unknown_parameter, "unknown parameter '" + name + "'");
    doc.statements.push_back(StoreParam{name, Expr::number(value)});
  }
  doc.statements.push_back(RebuildCmd{});
  return doc;
}

}  // namespace leam
