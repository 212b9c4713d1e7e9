// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <map>

#include "doctest.h"
#include "leam/pipeline.hpp"

using namespace leam;
namespace fs = std::filesystem;

namespace {

const fs::path kRepoRoot = LEAM_REPO_ROOT;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("leam-test-" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

PipelineConfig config_for(const fs::path& workspace, const std::string& fixture) {
  PipelineConfig cfg;
  cfg.workspace = workspace;
  cfg.assets_dir = kRepoRoot / "assets";
  cfg.verify_source = kRepoRoot / "cases" / fixture / kVerifyFile;
  return cfg;
}

std::vector<ImageInput> fixture_images(const std::string& fixture) {
  std::vector<ImageInput> images;
  fs::path dir = kRepoRoot / "cases" / fixture / "images";
  if (!fs::exists(dir)) return images;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& f : files) images.push_back({f.filename().string(), read_file(f)});
  return images;
}

PipelineState run_fixture(const std::string& fixture, Mode mode, const fs::path& workspace) {
  ReplayBackend backend(kRepoRoot / "cases" / fixture);
  std::string desc = read_file(kRepoRoot / "cases" / fixture / "description.txt");
  return run_pipeline(desc, fixture_images(fixture), mode, backend, config_for(workspace, fixture));
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path());
  return files;
}

}  // namespace

TEST_CASE("the L-slot fixture replays to a complete workspace") {
  TempDir ws("lslot-run");
  PipelineState state = run_fixture("lslot", Mode::strong, ws.path);

  CHECK(artifact_summary(state.dims) == "2 solids, 7 parameters, 1 material");
  CHECK(state.transcripts.size() == 7);
  for (const ToolTranscript& t : state.transcripts) CHECK(t.ok);

  for (const char* f : {"Solid_List.txt", "Solids_Dims.txt", "Para.bas", "Materials.bas",
                        "3D_Model.bas", "2D+_Model.bas", "Boolean.bas", "run_manifest.txt",
                        "transcript.log"})
    CHECK(fs::exists(ws.path / f));

  // The manifest lists the five macro files, in execution order, with hashes.
  std::string manifest = read_file(ws.path / kManifestFile);
  std::size_t pos = 0;
  for (const char* f : {"Para.bas", "Materials.bas", "3D_Model.bas", "2D+_Model.bas",
                        "Boolean.bas"}) {
    std::size_t at = manifest.find(std::string(f) + " sha256:");
    REQUIRE(at != std::string::npos);
    CHECK(at >= pos);
    pos = at;
  }

  // Gate soundness: every artifact re-parses with zero diagnostics.
  MaterialCatalog catalog = MaterialCatalog::from_file(kRepoRoot / "assets/materials.catalog");
  std::vector<MacroDoc> docs;
  for (ArtifactKind kind : {ArtifactKind::para_bas, ArtifactKind::materials_bas,
                            ArtifactKind::model3d_bas, ArtifactKind::model2dplus_bas,
                            ArtifactKind::boolean_bas})
    docs.push_back(parse_macro(state.artifacts.get(kind)));
  CHECK(lint_macros(docs, ParamEnv{}, catalog).empty());
}

TEST_CASE("transcripts respect stage ordering") {
  TempDir ws("ordering");
  PipelineState state = run_fixture("patch245", Mode::weak, ws.path);

  std::set<std::string> produced;
  for (const ToolTranscript& t : state.transcripts) {
    auto kind = tool_from_name(t.tool);
    REQUIRE(kind.has_value());
    for (ArtifactKind input : tool_spec(*kind).inputs)
      CHECK(produced.count(std::string(artifact_filename(input))) == 1);
    produced.insert(t.artifact);
  }
  CHECK(artifact_summary(state.dims) == "5 solids, 4 parameters, 2 materials");
}

TEST_CASE("two replay runs produce byte-identical workspaces") {
  TempDir a("det-a"), b("det-b");
  run_fixture("vivaldi", Mode::strong, a.path);
  run_fixture("vivaldi", Mode::strong, b.path);
  CHECK(snapshot(a.path) == snapshot(b.path));
}

TEST_CASE("a missing stage-3 transcript aborts with a fixture miss") {
  TempDir partial("partial-fixture");
  for (const auto& e : fs::directory_iterator(kRepoRoot / "cases/lslot")) {
    if (e.path().filename().string().starts_with("07_Boolean")) continue;
    fs::copy(e.path(), partial.path / e.path().filename());
  }
  TempDir ws("partial-ws");
  ReplayBackend backend(partial.path);
  std::string desc = read_file(kRepoRoot / "cases/lslot/description.txt");
  try {
    run_pipeline(desc, {}, Mode::strong, backend, config_for(ws.path, "lslot"));
    FAIL("incomplete fixture replayed");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::fixture_miss);
  }
}

TEST_CASE("a corrupted response fails its gate and aborts the run") {
  TempDir corrupt("corrupt-fixture");
  for (const auto& e : fs::directory_iterator(kRepoRoot / "cases/lslot"))
    fs::copy(e.path(), corrupt.path / e.path().filename());
  // Duplicate the one boolean command: the tool is consumed twice.
  write_file(corrupt.path / "07_Boolean.response.txt",
             "```vba\nSolid.Subtract \"component1:patch\", \"component1:slot\"\n"
             "Solid.Subtract \"component1:patch\", \"component1:slot\"\n```\n");

  TempDir ws("corrupt-ws");
  ReplayBackend backend(corrupt.path);
  std::string desc = read_file(kRepoRoot / "cases/lslot/description.txt");
  try {
    run_pipeline(desc, {}, Mode::strong, backend, config_for(ws.path, "lslot"));
    FAIL("corrupt response passed the gate");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::validation_failed);
  }
  CHECK_FALSE(fs::exists(ws.path / "Boolean.bas"));
  CHECK_FALSE(fs::exists(ws.path / kManifestFile));
}

TEST_CASE("loose replay matches by tool order") {
  TempDir ws("loose-ws");
  ReplayBackend backend(kRepoRoot / "cases/lslot", /*loose=*/true);
  // A different user description would miss strict hashes but replays loosely.
  PipelineConfig cfg = config_for(ws.path, "lslot");
  PipelineState state = run_pipeline("a different description", {}, Mode::strong, backend, cfg);
  CHECK(state.dims.solids.size() == 2);
}

TEST_CASE("run_update rewrites the IR, emits UpdatePara.bas, and extends the manifest") {
  TempDir ws("update-ws");
  PipelineState state = run_fixture("lslot", Mode::strong, ws.path);

  ParamEnv updates;
  updates.define("PatchW", 12);
  run_update(state, updates);

  CHECK(read_file(ws.path / "UpdatePara.bas") ==
        "StoreParameter \"PatchW\", \"12\"\nRebuild\n");
  CHECK(state.dims.parameters.get("PatchW") == 12.0);
  SolidList reloaded = parse_solid_list(read_file(ws.path / "Solids_Dims.txt"), true);
  CHECK(reloaded.parameters.get("PatchW") == 12.0);
  std::string manifest = read_file(ws.path / kManifestFile);
  CHECK(manifest.find("UpdatePara.bas sha256:") != std::string::npos);

  auto nodes = build_csg(reloaded);
  auto vol = exact_volume(*nodes.at("patch"));
  REQUIRE(vol.has_value());
  CHECK(*vol == doctest::Approx(12 * 8 * 0.035 - 0.315).epsilon(1e-9));

  // An empty update still yields a rebuild-only file.
  run_update(state, ParamEnv{});
  CHECK(read_file(ws.path / "UpdatePara.bas") == "Rebuild\n");

  ParamEnv unknown;
  unknown.define("Nope", 1);
  CHECK_THROWS_AS(run_update(state, unknown), Error);
}

TEST_CASE("load_workspace restores a usable state") {
  TempDir ws("reload-ws");
  run_fixture("monopole", Mode::strong, ws.path);
  PipelineState state = load_workspace(ws.path);
  CHECK(state.dims.solids.size() == 7);
  CHECK(state.dims.parameters.size() == 12);
  CHECK(state.stage1.solids.size() == 7);
  CHECK_THROWS_AS(load_workspace(ws.path / "nope"), Error);
}
