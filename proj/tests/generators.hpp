// SPDX-License-Identifier: Apache-2.0
//
// Seeded random builders shared by the property tests and the acceptance
// suite. Everything is deterministic for a fixed seed.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "leam/macro.hpp"
#include "leam/solid_ir.hpp"

namespace leam::testgen {

inline int pick(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

inline double pick_value(std::mt19937_64& rng) {
  return static_cast<double>(pick(rng, 20000) + 1) / 100.0;  // 0.01 .. 200
}

inline Expr random_dim_expr(std::mt19937_64& rng, const std::vector<std::string>& params,
                            int depth = 2) {
  if (depth <= 0 || pick(rng, 3) == 0) {
    if (!params.empty() && pick(rng, 2) == 0)
      return Expr::param(params[static_cast<std::size_t>(pick(rng, static_cast<int>(params.size())))]);
    return Expr::number(pick_value(rng));
  }
  switch (pick(rng, 4)) {
    case 0:
      return Expr::binary(Expr::Kind::add, random_dim_expr(rng, params, depth - 1),
                          random_dim_expr(rng, params, depth - 1));
    case 1:
      return Expr::binary(Expr::Kind::sub, random_dim_expr(rng, params, depth - 1),
                          random_dim_expr(rng, params, depth - 1));
    case 2:
      return Expr::binary(Expr::Kind::mul, random_dim_expr(rng, params, depth - 1),
                          Expr::number(pick_value(rng)));
    default:
      return Expr::neg(random_dim_expr(rng, params, depth - 1));
  }
}

// A dimensioned list that satisfies every IR invariant: ranges ordered,
// polygons convex, slot solids subtracted.
inline SolidList random_solid_list(std::mt19937_64& rng) {
  SolidList list;
  list.dimensioned = true;
  int nparams = 2 + pick(rng, 4);
  std::vector<std::string> params;
  for (int i = 0; i < nparams; ++i) {
    std::string name = "p" + std::to_string(i);
    list.parameters.define(name, pick_value(rng));
    params.push_back(name);
  }

  int nsolids = 2 + pick(rng, 3);
  std::vector<std::string> slot_names;
  for (int i = 0; i < nsolids; ++i) {
    Solid s;
    s.name = "s" + std::to_string(i);
    s.material = pick(rng, 2) == 0 ? "Copper (pure)" : "FR-4 (lossy)";
    if (pick(rng, 3) == 0) s.position_hint = "near solid " + std::to_string(pick(rng, nsolids));
    if (pick(rng, 4) == 0) s.component = "antenna";

    Role roles[] = {Role::substrate, Role::patch, Role::feedline, Role::ground, Role::stub,
                    Role::other};
    bool is_slot = i > 0 && pick(rng, 4) == 0;
    s.role = is_slot ? Role::slot : roles[pick(rng, 6)];
    if (is_slot) slot_names.push_back(s.name);

    int shape = pick(rng, 3);
    if (shape == 0) {
      auto lo = [&] { return random_dim_expr(rng, params); };
      Expr x0 = lo(), y0 = lo(), z0 = lo();
      BrickSpec b;
      b.xmin = x0;
      b.xmax = Expr::binary(Expr::Kind::add, x0, Expr::number(pick_value(rng)));
      b.ymin = y0;
      b.ymax = Expr::binary(Expr::Kind::add, y0, Expr::number(pick_value(rng)));
      b.zmin = z0;
      b.zmax = Expr::binary(Expr::Kind::add, z0, Expr::number(pick_value(rng)));
      s.shape = std::move(b);
    } else if (shape == 1) {
      CylinderSpec c;
      c.axis = static_cast<Axis>(pick(rng, 3));
      c.center1 = random_dim_expr(rng, params);
      c.center2 = random_dim_expr(rng, params);
      double inner = pick(rng, 2) == 0 ? 0.0 : pick_value(rng);
      c.inner_radius = Expr::number(inner);
      c.outer_radius = Expr::number(inner + pick_value(rng));
      Expr zlo = random_dim_expr(rng, params);
      c.range_min = zlo;
      c.range_max = Expr::binary(Expr::Kind::add, zlo, Expr::number(pick_value(rng)));
      s.shape = std::move(c);
    } else {
      Extrude2DSpec e;
      e.plane = static_cast<Plane>(pick(rng, 3));
      e.base = Expr::number(pick_value(rng));
      e.height = Expr::number(pick_value(rng));
      int npts = 3 + pick(rng, 5);
      double cx = 50.0 + pick_value(rng), cy = 50.0 + pick_value(rng);
      for (int k = 0; k < npts; ++k) {
        double ang = 2.0 * 3.14159265358979 * k / npts;
        double r = 5.0 + static_cast<double>(pick(rng, 400)) / 100.0;
        e.points.emplace_back(Expr::number(cx + r * std::cos(ang)),
                              Expr::number(cy + r * std::sin(ang)));
      }
      s.shape = std::move(e);
    }
    list.solids.push_back(std::move(s));
  }

  for (const std::string& slot : slot_names)
    list.boolean_plan.push_back({BoolOp::subtract, list.solids.front().name, slot});
  return list;
}

inline MacroDoc random_macro_doc(std::mt19937_64& rng, const MaterialCatalog& catalog) {
  MacroDoc doc;
  std::vector<std::string> params{"p0", "p1", "w"};
  int nstmt = 1 + pick(rng, 6);
  for (int i = 0; i < nstmt; ++i) {
    switch (pick(rng, 7)) {
      case 0:
        doc.statements.push_back(
            ParamDecl{"q" + std::to_string(i), Expr::number(pick_value(rng))});
        break;
      case 1: {
        const auto& records = catalog.records();
        doc.statements.push_back(
            MaterialBlock{records[static_cast<std::size_t>(pick(rng, static_cast<int>(records.size())))]});
        break;
      }
      case 2: {
        BrickBlock b;
        b.name = "b" + std::to_string(i);
        b.component = "component1";
        b.material = "Copper (pure)";
        b.xmin = random_dim_expr(rng, params);
        b.xmax = random_dim_expr(rng, params);
        b.ymin = random_dim_expr(rng, params);
        b.ymax = random_dim_expr(rng, params);
        b.zmin = random_dim_expr(rng, params);
        b.zmax = random_dim_expr(rng, params);
        doc.statements.push_back(std::move(b));
        break;
      }
      case 3: {
        CylinderBlock c;
        c.name = "c" + std::to_string(i);
        c.component = "component1";
        c.material = "Copper (pure)";
        c.axis = static_cast<Axis>(pick(rng, 3));
        c.outer_radius = random_dim_expr(rng, params);
        c.inner_radius = Expr::number(0.0);
        c.center1 = random_dim_expr(rng, params);
        c.center2 = random_dim_expr(rng, params);
        c.range_min = random_dim_expr(rng, params);
        c.range_max = random_dim_expr(rng, params);
        doc.statements.push_back(std::move(c));
        break;
      }
      case 4: {
        PolygonBlock p;
        p.name = "poly" + std::to_string(i);
        p.curve_folder = "curve1";
        int npts = 3 + pick(rng, 4);
        for (int k = 0; k < npts; ++k)
          p.points.emplace_back(random_dim_expr(rng, params), random_dim_expr(rng, params));
        p.points.push_back(p.points.front());
        ExtrudeBlock e;
        e.name = "x" + std::to_string(i);
        e.component = "component1";
        e.material = "Copper (pure)";
        e.thickness = Expr::number(pick_value(rng));
        e.curve_ref = "curve1:" + p.name;
        doc.statements.push_back(std::move(p));
        doc.statements.push_back(std::move(e));
        break;
      }
      case 5:
        doc.statements.push_back(BooleanCmd{static_cast<BoolOp>(pick(rng, 3)),
                                            "component1:s" + std::to_string(pick(rng, 5)),
                                            "component1:t" + std::to_string(pick(rng, 5))});
        break;
      default:
        doc.statements.push_back(StoreParam{"p" + std::to_string(pick(rng, 3)),
                                            Expr::number(pick_value(rng))});
        if (pick(rng, 2) == 0) doc.statements.push_back(RebuildCmd{});
        break;
    }
  }
  return doc;
}

}  // namespace leam::testgen
