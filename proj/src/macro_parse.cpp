// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "leam/macro.hpp"
#include "text_util.hpp"

namespace leam {

using detail::split_lines;
using detail::trim;

namespace {

[[noreturn]] void syntax(long line, const std::string& message) {
  throw Error(Errc::syntax_error, "line " + std::to_string(line) + ": " + message, line);
}

// Parses `"a", "b", ...` — double-quoted, comma-separated, no escapes.
std::vector<std::string> parse_quoted_args(std::string_view rest, long line) {
  std::vector<std::string> args;
  std::size_t i = 0;
  auto skip_ws = [&] { while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t')) ++i; };
  skip_ws();
  while (i < rest.size()) {
    if (rest[i] != '"') syntax(line, "expected a double-quoted argument");
    std::size_t close = rest.find('"', i + 1);
    if (close == std::string_view::npos) syntax(line, "unterminated string");
    args.emplace_back(rest.substr(i + 1, close - i - 1));
    i = close + 1;
    skip_ws();
    if (i == rest.size()) break;
    if (rest[i] != ',') syntax(line, "expected ',' between arguments");
    ++i;
    skip_ws();
    if (i == rest.size()) syntax(line, "trailing ',' without an argument");
  }
  return args;
}

Expr arg_expr(const std::string& text, long line) {
  try {
    return parse_expr(text);
  } catch (const Error& e) {
    syntax(line, std::string("bad expression: ") + e.what());
  }
}

double arg_number(const std::string& text, long line) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
    syntax(line, "expected a plain number, got '" + text + "'");
  return v;
}

std::string arg_path(const std::string& text, long line) {
  std::size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    syntax(line, "expected a 'component:name' path, got '" + text + "'");
  return text;
}

struct Member {
  std::string name;
  std::vector<std::string> args;
  long line = 0;
};

class BlockReader {
 public:
  BlockReader(std::vector<Member> members, std::string kind, long block_line)
      : members_(std::move(members)), kind_(std::move(kind)), line_(block_line) {
    if (members_.empty() || members_.front().name != "Reset")
      syntax(line_, "With " + kind_ + ": first member must be .Reset");
    if (members_.back().name != "Create")
      syntax(members_.empty() ? line_ : members_.back().line,
             "With " + kind_ + ": missing .Create");
    if (!members_.front().args.empty()) syntax(members_.front().line, ".Reset takes no arguments");
    if (!members_.back().args.empty()) syntax(members_.back().line, ".Create takes no arguments");
  }

  // Interior members, excluding Reset and Create.
  std::vector<Member> interior() const {
    return {members_.begin() + 1, members_.end() - 1};
  }

  long line() const { return line_; }
  const std::string& kind() const { return kind_; }

 private:
  std::vector<Member> members_;
  std::string kind_;
  long line_;
};

// Collects single-occurrence members by name; rejects duplicates and, at
// the end, anything left unclaimed.
class MemberMap {
 public:
  MemberMap(const BlockReader& block, std::set<std::string> known)
      : kind_(block.kind()), known_(std::move(known)) {
    for (const Member& m : block.interior()) {
      if (!known_.count(m.name))
        throw Error(Errc::unknown_member,
                    "line " + std::to_string(m.line) + ": unknown member ." + m.name +
                        " in With " + kind_,
                    m.line);
      if (!by_name_.emplace(m.name, m).second)
        syntax(m.line, "duplicate member ." + m.name);
    }
  }

  const Member& require(const std::string& name, std::size_t arity, long block_line) {
    auto it = by_name_.find(name);
    if (it == by_name_.end())
      syntax(block_line, "With " + kind_ + ": missing ." + name);
    if (it->second.args.size() != arity)
      syntax(it->second.line, "." + name + " expects " + std::to_string(arity) + " argument(s)");
    claimed_.insert(name);
    return it->second;
  }

  const Member* optional(const std::string& name) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return nullptr;
    claimed_.insert(name);
    return &it->second;
  }

  void finish() const {
    for (const auto& [name, m] : by_name_)
      if (!claimed_.count(name))
        syntax(m.line, "member ." + name + " is not valid here");
  }

 private:
  std::string kind_;
  std::set<std::string> known_;
  std::map<std::string, Member> by_name_;
  std::set<std::string> claimed_;
};

MacroStatement parse_material_block(const BlockReader& block) {
  MemberMap mm(block, {"Name", "Type", "Epsilon", "TanD", "Sigma"});
  MaterialBlock out;
  out.record.name = mm.require("Name", 1, block.line()).args[0];
  if (out.record.name.empty()) syntax(block.line(), ".Name must not be empty");
  const Member& type = mm.require("Type", 1, block.line());
  if (type.args[0] == "Normal") {
    out.record.kind = MaterialKind::normal;
    out.record.epsilon_r = arg_number(mm.require("Epsilon", 1, block.line()).args[0],
                                      block.line());
    out.record.tan_delta = arg_number(mm.require("TanD", 1, block.line()).args[0], block.line());
  } else if (type.args[0] == "Lossy metal") {
    out.record.kind = MaterialKind::conductor;
    out.record.conductivity = arg_number(mm.require("Sigma", 1, block.line()).args[0],
                                         block.line());
  } else {
    syntax(type.line, "unknown material type '" + type.args[0] + "'");
  }
  mm.finish();
  return out;
}

void read_common(MemberMap& mm, long line, std::string& name, std::string& component,
                 std::string& material) {
  name = mm.require("Name", 1, line).args[0];
  component = mm.require("Component", 1, line).args[0];
  material = mm.require("Material", 1, line).args[0];
  if (name.empty() || component.empty() || material.empty())
    syntax(line, ".Name, .Component and .Material must not be empty");
}

MacroStatement parse_brick_block(const BlockReader& block) {
  MemberMap mm(block, {"Name", "Component", "Material", "Xrange", "Yrange", "Zrange"});
  BrickBlock out;
  read_common(mm, block.line(), out.name, out.component, out.material);
  const Member& xr = mm.require("Xrange", 2, block.line());
  const Member& yr = mm.require("Yrange", 2, block.line());
  const Member& zr = mm.require("Zrange", 2, block.line());
  out.xmin = arg_expr(xr.args[0], xr.line);
  out.xmax = arg_expr(xr.args[1], xr.line);
  out.ymin = arg_expr(yr.args[0], yr.line);
  out.ymax = arg_expr(yr.args[1], yr.line);
  out.zmin = arg_expr(zr.args[0], zr.line);
  out.zmax = arg_expr(zr.args[1], zr.line);
  mm.finish();
  return out;
}

MacroStatement parse_cylinder_block(const BlockReader& block) {
  MemberMap mm(block, {"Name", "Component", "Material", "Axis", "Outerradius", "Innerradius",
                       "Xcenter", "Ycenter", "Zcenter", "Xrange", "Yrange", "Zrange"});
  CylinderBlock out;
  read_common(mm, block.line(), out.name, out.component, out.material);
  const Member& axis = mm.require("Axis", 1, block.line());
  auto ax = axis_from_name(axis.args[0]);
  if (!ax) syntax(axis.line, "bad axis '" + axis.args[0] + "'");
  out.axis = *ax;
  const Member& ro = mm.require("Outerradius", 1, block.line());
  const Member& ri = mm.require("Innerradius", 1, block.line());
  out.outer_radius = arg_expr(ro.args[0], ro.line);
  out.inner_radius = arg_expr(ri.args[0], ri.line);

  const char* c1 = nullptr;
  const char* c2 = nullptr;
  const char* range = nullptr;
  switch (*ax) {
    case Axis::z: c1 = "Xcenter"; c2 = "Ycenter"; range = "Zrange"; break;
    case Axis::x: c1 = "Ycenter"; c2 = "Zcenter"; range = "Xrange"; break;
    case Axis::y: c1 = "Xcenter"; c2 = "Zcenter"; range = "Yrange"; break;
  }
  const Member& m1 = mm.require(c1, 1, block.line());
  const Member& m2 = mm.require(c2, 1, block.line());
  const Member& mr = mm.require(range, 2, block.line());
  out.center1 = arg_expr(m1.args[0], m1.line);
  out.center2 = arg_expr(m2.args[0], m2.line);
  out.range_min = arg_expr(mr.args[0], mr.line);
  out.range_max = arg_expr(mr.args[1], mr.line);
  mm.finish();  // rejects center/range members that contradict the axis
  return out;
}

MacroStatement parse_polygon_block(const BlockReader& block) {
  PolygonBlock out;
  bool seen_point = false;
  for (const Member& m : block.interior()) {
    if (m.name == "Name") {
      if (m.args.size() != 1) syntax(m.line, ".Name expects 1 argument");
      if (!out.name.empty()) syntax(m.line, "duplicate member .Name");
      out.name = m.args[0];
    } else if (m.name == "Curve") {
      if (m.args.size() != 1) syntax(m.line, ".Curve expects 1 argument");
      if (!out.curve_folder.empty()) syntax(m.line, "duplicate member .Curve");
      out.curve_folder = m.args[0];
    } else if (m.name == "Point") {
      if (m.args.size() != 2) syntax(m.line, ".Point expects 2 arguments");
      if (seen_point) syntax(m.line, "a polygon has exactly one .Point");
      seen_point = true;
      out.points.emplace_back(arg_expr(m.args[0], m.line), arg_expr(m.args[1], m.line));
    } else if (m.name == "LineTo") {
      if (m.args.size() != 2) syntax(m.line, ".LineTo expects 2 arguments");
      if (!seen_point) syntax(m.line, ".LineTo before .Point");
      out.points.emplace_back(arg_expr(m.args[0], m.line), arg_expr(m.args[1], m.line));
    } else {
      throw Error(Errc::unknown_member,
                  "line " + std::to_string(m.line) + ": unknown member ." + m.name +
                      " in With Polygon",
                  m.line);
    }
  }
  if (out.name.empty()) syntax(block.line(), "With Polygon: missing .Name");
  if (out.curve_folder.empty()) syntax(block.line(), "With Polygon: missing .Curve");
  if (!seen_point) syntax(block.line(), "With Polygon: missing .Point");
  if (out.points.size() < 2) syntax(block.line(), "With Polygon: needs at least one .LineTo");
  return out;
}

MacroStatement parse_extrude_block(const BlockReader& block) {
  MemberMap mm(block, {"Name", "Component", "Material", "Thickness", "Curve"});
  ExtrudeBlock out;
  read_common(mm, block.line(), out.name, out.component, out.material);
  const Member& th = mm.require("Thickness", 1, block.line());
  out.thickness = arg_expr(th.args[0], th.line);
  const Member& cv = mm.require("Curve", 1, block.line());
  out.curve_ref = arg_path(cv.args[0], cv.line);
  mm.finish();
  return out;
}

}  // namespace

MacroDoc parse_macro(std::string_view text) {
  MacroDoc doc;
  const auto lines = split_lines(text);
  std::size_t idx = 0;

  auto line_no = [&](std::size_t i) { return static_cast<long>(i + 1); };

  while (idx < lines.size()) {
    std::string_view line = trim(lines[idx]);
    if (line.empty()) {
      ++idx;
      continue;
    }
    const long lineno = line_no(idx);

    if (line.starts_with("With ")) {
      std::string kind(trim(line.substr(5)));
      if (kind != "Material" && kind != "Brick" && kind != "Cylinder" && kind != "Polygon" &&
          kind != "ExtrudeCurve")
        throw Error(Errc::unknown_block_kind, "line " + std::to_string(lineno) +
                                                  ": unknown block kind '" + kind + "'",
                    lineno);
      ++idx;
      std::vector<Member> members;
      bool closed = false;
      while (idx < lines.size()) {
        std::string_view body = trim(lines[idx]);
        if (body.empty()) {
          ++idx;
          continue;
        }
        if (body == "End With") {
          closed = true;
          ++idx;
          break;
        }
        if (body[0] != '.') syntax(line_no(idx), "expected a .member line or End With");
        std::size_t name_end = 1;
        while (name_end < body.size() && body[name_end] != ' ' && body[name_end] != '\t')
          ++name_end;
        Member m;
        m.name = std::string(body.substr(1, name_end - 1));
        m.line = line_no(idx);
        if (m.name.empty()) syntax(m.line, "empty member name");
        m.args = parse_quoted_args(body.substr(name_end), m.line);
        members.push_back(std::move(m));
        ++idx;
      }
      if (!closed) syntax(line_no(lines.size() - 1), "With " + kind + ": missing End With");

      BlockReader block(std::move(members), kind, lineno);
      if (kind == "Material") doc.statements.push_back(parse_material_block(block));
      else if (kind == "Brick") doc.statements.push_back(parse_brick_block(block));
      else if (kind == "Cylinder") doc.statements.push_back(parse_cylinder_block(block));
      else if (kind == "Polygon") doc.statements.push_back(parse_polygon_block(block));
      else doc.statements.push_back(parse_extrude_block(block));
      doc.source_lines.push_back(lineno);
      continue;
    }

    auto keyword_rest = [&](std::string_view keyword) -> std::optional<std::string_view> {
      if (!line.starts_with(keyword)) return std::nullopt;
      std::string_view rest = line.substr(keyword.size());
      if (!rest.empty() && rest[0] != ' ' && rest[0] != '\t') return std::nullopt;
      return rest;
    };

    if (auto rest = keyword_rest("MakeSureParameterExists")) {
      auto args = parse_quoted_args(*rest, lineno);
      if (args.size() != 2) syntax(lineno, "MakeSureParameterExists expects 2 arguments");
      if (!is_identifier(args[0])) syntax(lineno, "bad parameter name '" + args[0] + "'");
      doc.statements.push_back(ParamDecl{args[0], arg_expr(args[1], lineno)});
      doc.source_lines.push_back(lineno);
    } else if (auto rest2 = keyword_rest("StoreParameter")) {
      auto args = parse_quoted_args(*rest2, lineno);
      if (args.size() != 2) syntax(lineno, "StoreParameter expects 2 arguments");
      if (!is_identifier(args[0])) syntax(lineno, "bad parameter name '" + args[0] + "'");
      doc.statements.push_back(StoreParam{args[0], arg_expr(args[1], lineno)});
      doc.source_lines.push_back(lineno);
    } else if (line == "Rebuild") {
      doc.statements.push_back(RebuildCmd{});
      doc.source_lines.push_back(lineno);
    } else if (line.starts_with("Solid.")) {
      BoolOp op = BoolOp::add;
      std::string_view rest;
      if (auto r = keyword_rest("Solid.Add")) { op = BoolOp::add; rest = *r; }
      else if (auto r2 = keyword_rest("Solid.Subtract")) { op = BoolOp::subtract; rest = *r2; }
      else if (auto r3 = keyword_rest("Solid.Intersect")) { op = BoolOp::intersect; rest = *r3; }
      else syntax(lineno, "unknown Solid.* command");
      auto args = parse_quoted_args(rest, lineno);
      if (args.size() != 2) syntax(lineno, "boolean command expects 2 arguments");
      doc.statements.push_back(BooleanCmd{op, arg_path(args[0], lineno), arg_path(args[1], lineno)});
      doc.source_lines.push_back(lineno);
    } else {
      syntax(lineno, "expected a statement, got '" + std::string(line) + "'");
    }
    ++idx;
  }
  return doc;
}

std::string to_text(const Diagnostic& d) {
  std::string out;
  if (!d.file.empty()) out += d.file + ":";
  if (d.line > 0) out += "line " + std::to_string(d.line) + ": ";
  else if (!out.empty()) out += " ";
  out += d.message;
  return out;
}

ParamEnv params_from_macro(const MacroDoc& doc) {
  ParamEnv env;
  for (const MacroStatement& st : doc.statements) {
    if (const auto* p = std::get_if<ParamDecl>(&st))
      env.define(p->name, eval_expr(p->value, env));
  }
  return env;
}

namespace {

class Linter {
 public:
  Linter(const ParamEnv& ambient, const MaterialCatalog& catalog)
      : params_(ambient), catalog_(catalog) {}

  void run(const MacroDoc& doc, const std::string& label) {
    label_ = label;
    for (std::size_t i = 0; i < doc.statements.size(); ++i) {
      line_ = i < doc.source_lines.size() ? doc.source_lines[i] : 0;
      std::visit([this](const auto& st) { check(st); }, doc.statements[i]);
    }
  }

  std::vector<Diagnostic> take() { return std::move(diags_); }

 private:
  void report(const std::string& message) { diags_.push_back({label_, line_, message}); }

  void check_expr(const Expr& e) {
    for (const std::string& p : free_params(e))
      if (!params_.contains(p)) report("unbound parameter '" + p + "'");
  }

  void check_material_name(const std::string& name) {
    if (!catalog_.contains(name)) report("material '" + name + "' is not in the catalog");
  }

  void create_solid(const std::string& component, const std::string& name) {
    std::string path = component + ":" + name;
    if (!created_.insert(path).second) report("solid '" + path + "' already created");
  }

  void check(const ParamDecl& p) {
    if (params_.contains(p.name)) {
      report("parameter '" + p.name + "' shadows an earlier declaration");
      return;
    }
    check_expr(p.value);
    try {
      params_.define(p.name, eval_expr(p.value, params_));
    } catch (const Error&) {
      // unbound refs already reported; leave the name undefined
    }
  }

  void check(const MaterialBlock& m) {
    check_material_name(m.record.name);
    if (!defined_materials_.insert(m.record.name).second)
      report("material '" + m.record.name + "' defined twice");
    if (m.record.kind == MaterialKind::normal) {
      if (m.record.epsilon_r < 1.0) report("epsilon_r must be >= 1");
      if (m.record.tan_delta < 0.0) report("tan_delta must be >= 0");
    } else if (m.record.conductivity <= 0.0) {
      report("conductivity must be > 0");
    }
  }

  void check(const BrickBlock& b) {
    check_material_name(b.material);
    for (const Expr* e : {&b.xmin, &b.xmax, &b.ymin, &b.ymax, &b.zmin, &b.zmax}) check_expr(*e);
    create_solid(b.component, b.name);
  }

  void check(const CylinderBlock& c) {
    check_material_name(c.material);
    for (const Expr* e : {&c.outer_radius, &c.inner_radius, &c.center1, &c.center2,
                          &c.range_min, &c.range_max})
      check_expr(*e);
    create_solid(c.component, c.name);
  }

  void check(const PolygonBlock& p) {
    for (const auto& [x, y] : p.points) {
      check_expr(x);
      check_expr(y);
    }
    if (p.points.size() < 4 || !(p.points.front() == p.points.back()))
      report("polygon '" + p.name + "' is not closed (first point must repeat last)");
    std::string key = p.curve_folder + ":" + p.name;
    if (!curves_.insert(key).second) report("curve '" + key + "' already created");
  }

  void check(const ExtrudeBlock& e) {
    check_material_name(e.material);
    check_expr(e.thickness);
    bool unbound = false;
    for (const std::string& p : free_params(e.thickness))
      if (!params_.contains(p)) unbound = true;
    if (!unbound) {
      try {
        if (eval_expr(e.thickness, params_) <= 0.0)
          report("non-positive extrusion thickness");
      } catch (const Error& err) {
        report(std::string("thickness does not evaluate: ") + err.what());
      }
    }
    if (!curves_.count(e.curve_ref))
      report("extrusion references unknown curve '" + e.curve_ref + "'");
    create_solid(e.component, e.name);
  }

  void check(const BooleanCmd& b) {
    if (b.target == b.tool) report("boolean command uses the same solid twice");
    for (const std::string* path : {&b.target, &b.tool}) {
      if (consumed_.count(*path)) report("solid '" + *path + "' was already consumed");
      else if (!created_.count(*path)) report("solid '" + *path + "' is not created yet");
    }
    consumed_.insert(b.tool);
  }

  void check(const StoreParam& s) {
    if (!params_.contains(s.name)) report("unknown parameter '" + s.name + "'");
    check_expr(s.value);
  }

  void check(const RebuildCmd&) {}

  ParamEnv params_;
  const MaterialCatalog& catalog_;
  std::string label_;
  long line_ = 0;
  std::set<std::string> created_, consumed_, curves_, defined_materials_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> lint_macros(std::span<const MacroDoc> docs, const ParamEnv& ambient_params,
                                    const MaterialCatalog& catalog,
                                    std::span<const std::string> labels) {
  Linter linter(ambient_params, catalog);
  for (std::size_t i = 0; i < docs.size(); ++i)
    linter.run(docs[i], i < labels.size() ? labels[i] : std::string());
  return linter.take();
}

std::vector<Diagnostic> lint_macro(const MacroDoc& doc, const ParamEnv& ambient_params,
                                   const MaterialCatalog& catalog) {
  return lint_macros(std::span<const MacroDoc>(&doc, 1), ambient_params, catalog);
}

}  // namespace leam
