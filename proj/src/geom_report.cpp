// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "leam/geom.hpp"
#include "text_util.hpp"

namespace leam {

using detail::split_lines;
using detail::split_ws;
using detail::strip_comment;
using detail::trim;

namespace {

double parse_number(std::string_view text, long line) {
  try {
    Expr e = parse_expr(text);
    return eval_expr(e, ParamEnv{});
  } catch (const Error& e) {
    throw Error(Errc::format_error,
                "line " + std::to_string(line) + ": bad number: " + e.what(), line);
  }
}

}  // namespace

VerifySpec parse_verify_spec(std::string_view text) {
  VerifySpec spec;
  const auto lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const long lineno = static_cast<long>(idx + 1);
    std::string_view line = trim(strip_comment(lines[idx]));
    if (line.empty()) continue;

    if (line.starts_with("symmetry:")) {
      std::string_view rest = trim(line.substr(9));
      std::size_t eq = rest.find('=');
      if (eq == std::string_view::npos)
        throw Error(Errc::format_error, "expected 'symmetry: <axis> = <offset>'", lineno);
      auto axis = axis_from_name(trim(rest.substr(0, eq)));
      if (!axis) throw Error(Errc::format_error, "bad symmetry axis", lineno);
      spec.symmetries.push_back({*axis, parse_number(trim(rest.substr(eq + 1)), lineno)});
    } else if (line.starts_with("ascending:")) {
      std::string_view rest = trim(line.substr(10));
      std::size_t colon = rest.find(':');
      std::size_t dots = rest.find("..");
      if (colon == std::string_view::npos || dots == std::string_view::npos || dots > colon)
        throw Error(Errc::format_error, "expected 'ascending: <lo> .. <hi> : names...'", lineno);
      AscendingCheck check;
      check.lo = parse_number(trim(rest.substr(0, dots)), lineno);
      check.hi = parse_number(trim(rest.substr(dots + 2, colon - dots - 2)), lineno);
      for (std::string_view name : split_ws(rest.substr(colon + 1)))
        check.params.emplace_back(name);
      if (check.params.empty())
        throw Error(Errc::format_error, "ascending check names no parameters", lineno);
      spec.ascendings.push_back(std::move(check));
    } else if (line.starts_with("constraint:")) {
      spec.constraints.push_back(parse_constraint(trim(line.substr(11))));
    } else {
      throw Error(Errc::format_error,
                  "line " + std::to_string(lineno) + ": unknown verify entry", lineno);
    }
  }
  return spec;
}

std::string serialize_verify_spec(const VerifySpec& spec) {
  std::string out;
  for (const SymmetryCheck& s : spec.symmetries)
    out += "symmetry: " + std::string(axis_name(s.axis)) + " = " + format_number(s.offset) + "\n";
  for (const AscendingCheck& a : spec.ascendings) {
    out += "ascending: " + format_number(a.lo) + " .. " + format_number(a.hi) + " :";
    for (const std::string& p : a.params) out += " " + p;
    out += "\n";
  }
  for (const auto& [name, rhs] : spec.constraints)
    out += "constraint: " + name + " = " + to_text(rhs) + "\n";
  return out;
}

bool GeomReport::all_checks_pass() const {
  return std::all_of(symmetries.begin(), symmetries.end(),
                     [](const SymmetryResult& s) { return s.pass; }) &&
         std::all_of(ascendings.begin(), ascendings.end(),
                     [](const AscendingResult& a) { return a.pass; }) &&
         std::all_of(constraints.begin(), constraints.end(),
                     [](const ConstraintResult& c) { return c.pass; });
}

GeomReport build_geom_report(const SolidList& list, const VerifySpec& spec,
                             std::uint64_t samples, std::uint64_t seed) {
  GeomReport report;
  report.samples = samples;
  report.seed = seed;

  // Ascending checks run before any geometry is built.
  for (const AscendingCheck& check : spec.ascendings) {
    AscendingResult res;
    res.check = check;
    res.pass = true;
    double prev = check.lo;
    for (const std::string& name : check.params) {
      if (!list.parameters.contains(name)) {
        res.pass = false;
        res.detail = "parameter '" + name + "' is not declared";
        break;
      }
      double v = list.parameters.get(name);
      if (!(v > check.lo && v < check.hi)) {
        res.pass = false;
        res.detail = "parameter '" + name + "' = " + format_number(v) + " is outside (" +
                     format_number(check.lo) + ", " + format_number(check.hi) + ")";
        break;
      }
      if (!(v > prev) && name != check.params.front()) {
        res.pass = false;
        res.detail = "parameter '" + name + "' breaks strict ascent";
        break;
      }
      prev = v;
    }
    report.ascendings.push_back(std::move(res));
  }

  report.constraints = validate_constraints(list, spec.constraints);

  bool geometry_ok = std::all_of(report.ascendings.begin(), report.ascendings.end(),
                                 [](const AscendingResult& a) { return a.pass; });
  if (!geometry_ok) return report;

  auto primitives = build_primitives(list);
  auto results = build_csg(list);

  auto entry_for = [&](const std::string& name, const CsgPtr& node) {
    SolidReportEntry e;
    e.name = name;
    e.bbox = node->bbox();
    e.exact = exact_volume(*node);
    e.mc = mc_volume(*node, samples, seed);
    return e;
  };

  for (const Solid& s : list.solids) {
    report.primitives.push_back(entry_for(s.name, primitives.at(s.name)));
    auto it = results.find(s.name);
    if (it != results.end()) report.results.push_back(entry_for(s.name, it->second));
  }

  for (const SymmetryCheck& check : spec.symmetries) {
    for (const SolidReportEntry& e : report.results) {
      SymmetryResult res;
      res.check = check;
      res.node = e.name;
      res.samples = samples;
      res.asymmetry =
          check_mirror_symmetry(*results.at(e.name), check.axis, check.offset, samples, seed);
      res.pass = res.asymmetry == 0.0;
      report.symmetries.push_back(res);
    }
  }
  return report;
}

namespace {

std::string box_text(const Box3& box) {
  return format_number(box.lo.x) + " .. " + format_number(box.hi.x) + ", " +
         format_number(box.lo.y) + " .. " + format_number(box.hi.y) + ", " +
         format_number(box.lo.z) + " .. " + format_number(box.hi.z);
}

void render_entry_record(std::string& out, const char* kind, const SolidReportEntry& e) {
  out += std::string(kind) + " " + e.name + "\n";
  if (e.exact) out += "  exact_volume: " + format_number(*e.exact) + "\n";
  out += "  mc_volume: " + format_number(e.mc.estimate) + "\n";
  out += "  mc_stderr: " + format_number(e.mc.stderr_est) + "\n";
  out += "  bbox: " + box_text(e.bbox) + "\n";
  if (e.mc.centroid_valid)
    out += "  centroid: " + format_number(e.mc.centroid.x) + ", " +
           format_number(e.mc.centroid.y) + ", " + format_number(e.mc.centroid.z) + "\n";
}

}  // namespace

std::string render_geom_report_record(const GeomReport& r) {
  std::string out;
  out += "report\n";
  out += "  samples: " + std::to_string(r.samples) + "\n";
  out += "  seed: " + std::to_string(r.seed) + "\n";
  for (const SolidReportEntry& e : r.primitives) {
    out += "\n";
    render_entry_record(out, "primitive", e);
  }
  for (const SolidReportEntry& e : r.results) {
    out += "\n";
    render_entry_record(out, "result", e);
  }
  for (const SymmetryResult& s : r.symmetries) {
    out += "\nsymmetry " + std::string(axis_name(s.check.axis)) + " = " +
           format_number(s.check.offset) + "\n";
    out += "  node: " + s.node + "\n";
    out += "  asymmetry: " + format_number(s.asymmetry) + "\n";
    out += "  samples: " + std::to_string(s.samples) + "\n";
    out += std::string("  status: ") + (s.pass ? "pass" : "fail") + "\n";
  }
  for (const AscendingResult& a : r.ascendings) {
    out += "\nascending " + format_number(a.check.lo) + " .. " + format_number(a.check.hi) + "\n";
    out += "  params:";
    for (const std::string& p : a.check.params) out += " " + p;
    out += "\n";
    out += std::string("  status: ") + (a.pass ? "pass" : "fail") + "\n";
    if (!a.detail.empty()) out += "  detail: " + a.detail + "\n";
  }
  for (const ConstraintResult& c : r.constraints) {
    out += "\nconstraint " + c.name + " = " + to_text(c.rhs) + "\n";
    out += "  lhs: " + format_number(c.lhs_value) + "\n";
    out += "  rhs: " + format_number(c.rhs_value) + "\n";
    out += "  residual: " + format_number(c.residual) + "\n";
    out += std::string("  status: ") + (c.pass ? "pass" : "fail") + "\n";
  }
  return out;
}

std::string render_geom_report_text(const GeomReport& r) {
  std::string out;
  out += "Geometry report (samples=" + std::to_string(r.samples) +
         ", seed=" + std::to_string(r.seed) + ")\n";

  auto entry_line = [](const SolidReportEntry& e) {
    std::string line = "  " + e.name + ": ";
    if (e.exact) line += "exact " + format_number(*e.exact) + " mm^3, ";
    line += "mc " + format_number(e.mc.estimate) + " +/- " + format_number(e.mc.stderr_est) +
            " mm^3";
    return line + "\n";
  };

  out += "\nsolids:\n";
  for (const SolidReportEntry& e : r.primitives) out += entry_line(e);
  out += "\nresults after boolean plan:\n";
  for (const SolidReportEntry& e : r.results) out += entry_line(e);

  if (!r.symmetries.empty() || !r.ascendings.empty() || !r.constraints.empty())
    out += "\nchecks:\n";
  for (const SymmetryResult& s : r.symmetries)
    out += "  symmetry plane " + std::string(axis_name(s.check.axis)) + " = " +
           format_number(s.check.offset) + " on " + s.node + ": asymmetry " +
           format_number(s.asymmetry) + (s.pass ? " (pass)" : " (fail)") + "\n";
  for (const AscendingResult& a : r.ascendings) {
    out += "  ascending in (" + format_number(a.check.lo) + ", " + format_number(a.check.hi) +
           "): " + std::to_string(a.check.params.size()) + " parameters" +
           (a.pass ? " (pass)" : " (fail: " + a.detail + ")") + "\n";
  }
  for (const ConstraintResult& c : r.constraints)
    out += "  constraint " + c.name + " = " + to_text(c.rhs) + ": residual " +
           format_number(c.residual) + (c.pass ? " (pass)" : " (fail)") + "\n";
  return out;
}

}  // namespace leam
