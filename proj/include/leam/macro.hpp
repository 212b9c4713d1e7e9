// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "leam/materials.hpp"
#include "leam/solid_ir.hpp"

namespace leam {

// Structured model of one macro file. The concrete grammar is frozen:
//
//   MakeSureParameterExists "PatchW", "10"
//
//   With Material | Brick | Cylinder | Polygon | ExtrudeCurve
//        .Reset
//        .Member "arg"[, "arg"]      (5-space indentation, one per line)
//        .Create
//   End With
//
//   Solid.Add | Solid.Subtract | Solid.Intersect "comp:target", "comp:tool"
//   StoreParameter "PatchW", "12"
//   Rebuild
//
// Canonical emission uses LF line endings and places a blank line between
// statements except inside runs of parameter declarations, boolean
// commands, parameter-store updates, and between a Polygon block and the
// ExtrudeCurve block that consumes it. The parser accepts CRLF and loose
// whitespace; everything it returns re-emits in canonical form.

struct ParamDecl {
  std::string name;
  Expr value;
  friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

struct MaterialBlock {
  MaterialRecord record;
  friend bool operator==(const MaterialBlock&, const MaterialBlock&) = default;
};

struct BrickBlock {
  std::string name, component, material;
  Expr xmin, xmax, ymin, ymax, zmin, zmax;
  friend bool operator==(const BrickBlock&, const BrickBlock&) = default;
};

struct CylinderBlock {
  std::string name, component, material;
  Axis axis = Axis::z;
  Expr outer_radius, inner_radius;
  Expr center1, center2;  // in-plane centers for the chosen axis
  Expr range_min, range_max;
  friend bool operator==(const CylinderBlock&, const CylinderBlock&) = default;
};

// Coordinate list as written: the first pair is `.Point`, the rest are
// `.LineTo`, and a closed curve repeats the first pair at the end.
struct PolygonBlock {
  std::string name;
  std::string curve_folder;
  std::vector<std::pair<Expr, Expr>> points;
  friend bool operator==(const PolygonBlock&, const PolygonBlock&) = default;
};

struct ExtrudeBlock {
  std::string name, component, material;
  Expr thickness;
  std::string curve_ref;  // "folder:curvename"
  friend bool operator==(const ExtrudeBlock&, const ExtrudeBlock&) = default;
};

struct BooleanCmd {
  BoolOp kind = BoolOp::subtract;
  std::string target;  // "component:name"
  std::string tool;
  friend bool operator==(const BooleanCmd&, const BooleanCmd&) = default;
};

struct StoreParam {
  std::string name;
  Expr value;
  friend bool operator==(const StoreParam&, const StoreParam&) = default;
};

struct RebuildCmd {
  friend bool operator==(const RebuildCmd&, const RebuildCmd&) = default;
};

using MacroStatement = std::variant<ParamDecl, MaterialBlock, BrickBlock, CylinderBlock,
                                    PolygonBlock, ExtrudeBlock, BooleanCmd, StoreParam,
                                    RebuildCmd>;

struct MacroDoc {
  std::vector<MacroStatement> statements;
  // 1-based source line per statement when parsed from text; empty for
  // emitted documents. Not part of equality.
  std::vector<long> source_lines;

  friend bool operator==(const MacroDoc& a, const MacroDoc& b) {
    return a.statements == b.statements;
  }
};

// ---- emission (macro-codegen) ----

std::string emit_macro_text(const MacroDoc& doc);

MacroDoc emit_para(const ParamEnv& params);
MacroDoc emit_materials(const std::set<std::string>& used, const MaterialCatalog& catalog);
MacroDoc emit_3d(const SolidList& list);
MacroDoc emit_2dplus(const SolidList& list);
MacroDoc emit_boolean(std::span<const BooleanStep> plan, const SolidList& list);
MacroDoc emit_update_para(const ParamEnv& new_values, const ParamEnv& known);

// ---- parsing and validation (macro-parse) ----

MacroDoc parse_macro(std::string_view text);

struct Diagnostic {
  std::string file;  // label supplied by the caller; may be empty
  long line = 0;     // statement's source line when known
  std::string message;
};

std::string to_text(const Diagnostic& d);

// Cross-file lint: documents are checked as one concatenated sequence so
// later files may reference solids and parameters created earlier.
std::vector<Diagnostic> lint_macros(std::span<const MacroDoc> docs,
                                    const ParamEnv& ambient_params,
                                    const MaterialCatalog& catalog,
                                    std::span<const std::string> labels = {});

std::vector<Diagnostic> lint_macro(const MacroDoc& doc, const ParamEnv& ambient_params,
                                   const MaterialCatalog& catalog);

// Sequentially evaluates the document's parameter declarations.
ParamEnv params_from_macro(const MacroDoc& doc);

}  // namespace leam
