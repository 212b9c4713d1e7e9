// SPDX-License-Identifier: Apache-2.0
#include <filesystem>

#include "doctest.h"
#include "leam/materials.hpp"
#include "leam/orchestrator.hpp"
#include "leam/solid_ir.hpp"

using namespace leam;

namespace {
MaterialCatalog default_catalog() {
  return MaterialCatalog::from_file(std::filesystem::path(LEAM_REPO_ROOT) /
                                    "assets/materials.catalog");
}
}  // namespace

TEST_CASE("lookup resolves the catalog entries the fixtures use") {
  MaterialCatalog cat = default_catalog();
  CHECK(cat.lookup("Copper (pure)").kind == MaterialKind::conductor);
  CHECK(cat.lookup("Copper (pure)").conductivity > 0.0);
  CHECK(cat.lookup("FR-4 (lossy)").kind == MaterialKind::normal);
  CHECK(cat.lookup("FR-4 (lossy)").epsilon_r >= 1.0);
}

TEST_CASE("unknown names fail with nearest suggestions") {
  MaterialCatalog cat = default_catalog();
  try {
    cat.lookup("Unobtainium");
    FAIL("lookup accepted an absent key");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_material);
  }
  try {
    cat.lookup("Coper (pure)");  // one edit away
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("Copper (pure)") != std::string::npos);
  }
}

TEST_CASE("catalog_names is sorted and closed under lookup") {
  MaterialCatalog cat = default_catalog();
  auto names = cat.catalog_names();
  CHECK(!names.empty());
  CHECK(std::is_sorted(names.begin(), names.end()));
  for (const std::string& n : names) CHECK(cat.lookup(n).name == n);
  CHECK(std::count(names.begin(), names.end(), "Copper (pure)") == 1);
  CHECK(std::count(names.begin(), names.end(), "FR-4 (lossy)") == 1);
}

TEST_CASE("an empty catalog file yields an empty list") {
  MaterialCatalog cat = MaterialCatalog::from_text("# nothing here\n");
  CHECK(cat.catalog_names().empty());
  CHECK_THROWS_AS(cat.lookup("anything"), Error);
}

TEST_CASE("malformed catalog records are rejected") {
  CHECK_THROWS_AS(MaterialCatalog::from_text("material X\n  kind: magic\n"), Error);
  CHECK_THROWS_AS(MaterialCatalog::from_text("material X\n  epsilon_r: 2\n"), Error);  // no kind
  CHECK_THROWS_AS(MaterialCatalog::from_text("material X\n  kind: normal\n  epsilon_r: 0.5\n"),
                  Error);
  CHECK_THROWS_AS(
      MaterialCatalog::from_text("material X\n  kind: conductor\n  conductivity: 0\n"), Error);
  CHECK_THROWS_AS(MaterialCatalog::from_text("material X\n  kind: normal\n"
                                             "material X\n  kind: normal\n"),
                  Error);
}

TEST_CASE("every material referenced by a shipped fixture resolves") {
  MaterialCatalog cat = default_catalog();
  for (const char* fixture : {"lslot", "patch245", "vivaldi", "monopole"}) {
    SolidList dims = parse_solid_list(
        read_file(std::filesystem::path(LEAM_REPO_ROOT) / "cases" / fixture /
                  "03_Dimension.response.txt"),
        true);
    for (const std::string& name : dims.materials_used()) CHECK_NOTHROW(cat.lookup(name));
  }
}
