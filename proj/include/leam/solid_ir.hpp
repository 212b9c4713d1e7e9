// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "leam/expr.hpp"

namespace leam {

// Intermediate representation shared by the pipeline stages: the stage-1
// solid list (shapes and materials, no values) and the stage-2 dimensioned
// list (adds the parameter store and the boolean plan).

enum class Role { substrate, patch, slot, feedline, ground, stub, other };
enum class Axis { x, y, z };
enum class Plane { xy, yz, zx };

std::string_view role_name(Role r);
std::optional<Role> role_from_name(std::string_view name);
std::string_view axis_name(Axis a);
std::optional<Axis> axis_from_name(std::string_view name);
std::string_view plane_name(Plane p);
std::optional<Plane> plane_from_name(std::string_view name);

struct BrickSpec {
  Expr xmin, xmax, ymin, ymax, zmin, zmax;
  friend bool operator==(const BrickSpec&, const BrickSpec&) = default;
};

// center1/center2 are the two in-plane coordinates for the chosen axis:
// axis z -> (x, y), axis x -> (y, z), axis y -> (x, z).
struct CylinderSpec {
  Axis axis = Axis::z;
  Expr center1, center2;
  Expr outer_radius, inner_radius;
  Expr range_min, range_max;
  friend bool operator==(const CylinderSpec&, const CylinderSpec&) = default;
};

// `points` holds the distinct vertices only; serialization repeats the
// first point at the end to close the polygon explicitly.
struct Extrude2DSpec {
  Plane plane = Plane::xy;
  std::vector<std::pair<Expr, Expr>> points;
  Expr base, height;
  friend bool operator==(const Extrude2DSpec&, const Extrude2DSpec&) = default;
};

using ShapeSpec = std::variant<BrickSpec, CylinderSpec, Extrude2DSpec>;

struct Solid {
  std::string name;
  std::string component = "component1";
  Role role = Role::other;
  std::string material;
  std::string position_hint;  // stage-1 free-text placement note
  ShapeSpec shape;
  friend bool operator==(const Solid&, const Solid&) = default;
};

enum class BoolOp { add, subtract, intersect };
std::string_view bool_op_name(BoolOp op);

struct BooleanStep {
  BoolOp kind = BoolOp::subtract;
  std::string target;
  std::string tool;
  friend bool operator==(const BooleanStep&, const BooleanStep&) = default;
};

struct SolidList {
  bool dimensioned = false;
  ParamEnv parameters;                    // dimensioned lists only
  std::vector<Solid> solids;
  std::vector<BooleanStep> boolean_plan;  // dimensioned lists only

  std::set<std::string> materials_used() const;
  const Solid* find(std::string_view name) const;

  friend bool operator==(const SolidList&, const SolidList&) = default;
};

// Parses the Solid_List / Solids_Dims block format. All structural and,
// for dimensioned lists, numeric invariants are checked before returning.
SolidList parse_solid_list(std::string_view text, bool dimensioned);

// Canonical text form; byte-stable and the identity under parse_solid_list.
// Throws if the list violates its invariants.
std::string serialize_solid_list(const SolidList& list);

// Runs every invariant check parse_solid_list would apply.
void validate_solid_list(const SolidList& list);

struct ConstraintResult {
  std::string name;      // left-hand parameter
  Expr rhs;
  double lhs_value = 0.0;
  double rhs_value = 0.0;
  double residual = 0.0;
  bool pass = false;
};

// Checks `name = expr` identities against the list's parameter store.
std::vector<ConstraintResult> validate_constraints(
    const SolidList& list, const std::vector<std::pair<std::string, Expr>>& constraints,
    double tolerance = 1e-9);

// Parses "NAME = EXPR" into a constraint pair.
std::pair<std::string, Expr> parse_constraint(std::string_view text);

}  // namespace leam
