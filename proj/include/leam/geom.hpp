// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "leam/polygon.hpp"
#include "leam/solid_ir.hpp"

namespace leam {

// Point-membership CSG kernel used to verify generated models
// independently of the macro path. Primitives are closed point sets;
// Difference removes the open interior of its tool, so subtracting an
// abutting solid leaves the shared face. Verification samples interior
// points only, never closer than ~1e-6 to a face.

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

struct Box3 {
  Vec3 lo, hi;
  bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
  double volume() const {
    return valid() ? (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z) : 0.0;
  }
};

Box3 box_union(const Box3& a, const Box3& b);
Box3 box_intersection(const Box3& a, const Box3& b);

struct BrickPrim {
  Box3 box;
};

struct CylinderPrim {
  Axis axis = Axis::z;
  double center1 = 0.0, center2 = 0.0;  // in-plane coordinates for the axis
  double outer_radius = 0.0, inner_radius = 0.0;
  double range_min = 0.0, range_max = 0.0;
};

struct ExtrudePrim {
  Plane plane = Plane::xy;
  std::vector<Vec2> polygon;  // distinct vertices, evaluated
  double base = 0.0, height = 0.0;
};

enum class CsgOp { unite, subtract, intersect };

class CsgNode;
using CsgPtr = std::shared_ptr<const CsgNode>;

class CsgNode {
 public:
  static CsgPtr brick(const BrickPrim& p);
  static CsgPtr cylinder(const CylinderPrim& p);
  static CsgPtr extrude(ExtrudePrim p);
  static CsgPtr combine(CsgOp op, CsgPtr left, CsgPtr right);

  bool is_primitive() const { return op_ == std::nullopt; }
  std::optional<CsgOp> op() const { return op_; }
  const CsgPtr& left() const { return left_; }
  const CsgPtr& right() const { return right_; }
  const BrickPrim* as_brick() const;
  const CylinderPrim* as_cylinder() const;
  const ExtrudePrim* as_extrude() const;
  const Box3& bbox() const { return bbox_; }

 private:
  CsgNode() = default;
  std::optional<CsgOp> op_;
  CsgPtr left_, right_;
  std::optional<BrickPrim> brick_;
  std::optional<CylinderPrim> cylinder_;
  std::optional<ExtrudePrim> extrude_;
  Box3 bbox_;
};

// Evaluates each solid's shape under the list's parameters; no booleans.
std::map<std::string, CsgPtr> build_primitives(const SolidList& list);

// Applies the boolean plan: each step folds the tool into the target and
// removes the tool from the map.
std::map<std::string, CsgPtr> build_csg(const SolidList& list);

// Closed-set membership ("contains"); boundary points count as inside.
bool contains(const CsgNode& node, const Vec3& p);

// Exact volume where the tree decomposes: primitives directly; boolean
// nodes when the operands are certified disjoint or nested by the vertex
// and sampling certificates. Returns nullopt otherwise.
std::optional<double> exact_volume(const CsgNode& node);

struct McVolume {
  double estimate = 0.0;
  double stderr_est = 0.0;
  double hit_fraction = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  Vec3 centroid;        // mean of hit points
  bool centroid_valid = false;
};

// Uniform sampling over the node's bounding box; deterministic for a
// fixed seed. Throws empty_bounding_box when the box has zero volume.
McVolume mc_volume(const CsgNode& node, std::uint64_t samples, std::uint64_t seed);

// Fraction of sampled points p with contains(p) != contains(mirror(p)).
// Sampling covers the symmetric hull of the bounding box and its mirror
// image, so a perfectly symmetric solid scores exactly 0.
double check_mirror_symmetry(const CsgNode& node, Axis axis, double offset,
                             std::uint64_t samples, std::uint64_t seed);

// ---- verification checks and reports ----

struct SymmetryCheck {
  Axis axis = Axis::x;
  double offset = 0.0;
};

struct AscendingCheck {
  double lo = 0.0, hi = 0.0;  // exclusive bounds
  std::vector<std::string> params;
};

struct VerifySpec {
  std::vector<SymmetryCheck> symmetries;
  std::vector<AscendingCheck> ascendings;
  std::vector<std::pair<std::string, Expr>> constraints;
};

VerifySpec parse_verify_spec(std::string_view text);
std::string serialize_verify_spec(const VerifySpec& spec);

struct SolidReportEntry {
  std::string name;
  std::optional<double> exact;
  McVolume mc;
  Box3 bbox;
};

struct SymmetryResult {
  SymmetryCheck check;
  std::string node;
  double asymmetry = 0.0;
  std::uint64_t samples = 0;
  bool pass = false;  // asymmetry == 0
};

struct AscendingResult {
  AscendingCheck check;
  bool pass = false;
  std::string detail;
};

struct GeomReport {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<SolidReportEntry> primitives;
  std::vector<SolidReportEntry> results;
  std::vector<SymmetryResult> symmetries;
  std::vector<AscendingResult> ascendings;
  std::vector<ConstraintResult> constraints;

  bool all_checks_pass() const;
};

GeomReport build_geom_report(const SolidList& list, const VerifySpec& spec,
                             std::uint64_t samples, std::uint64_t seed);

std::string render_geom_report_text(const GeomReport& report);
std::string render_geom_report_record(const GeomReport& report);

}  // namespace leam
