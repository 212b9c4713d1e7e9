// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "leam/cli.hpp"
#include "leam/expr.hpp"
#include "leam/orchestrator.hpp"

using leam::format_number;
using leam::write_file;

namespace fs = std::filesystem;

namespace {

const fs::path kRepoRoot = LEAM_REPO_ROOT;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = leam::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("leam-cli-" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> model_args(const std::string& fixture, const std::string& mode,
                                    const fs::path& workspace) {
  fs::path dir = kRepoRoot / "cases" / fixture;
  std::vector<std::string> args = {"--assets", (kRepoRoot / "assets").string(),
                                   "model",
                                   "--desc", (dir / "description.txt").string(),
                                   "--mode", mode,
                                   "--backend", "replay",
                                   "--fixtures", dir.string(),
                                   "--workspace", workspace.string()};
  fs::path images = dir / "images";
  if (fs::exists(images)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(images)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      args.push_back("--image");
      args.push_back(f.string());
    }
  }
  return args;
}

}  // namespace

TEST_CASE("model replays the walkthrough case and prints its summary") {
  TempDir ws("model-lslot");
  CliResult r = run_cli(model_args("lslot", "strong", ws.path));
  CHECK(r.code == 0);
  CHECK(r.out.find("2 solids, 7 parameters, 1 material") != std::string::npos);
}

TEST_CASE("model in weak mode reports the incomplete-description case") {
  TempDir ws("model-weak");
  CliResult r = run_cli(model_args("patch245", "weak", ws.path));
  CHECK(r.code == 0);
  CHECK(r.out.find("5 solids, 4 parameters, 2 materials") != std::string::npos);
}

TEST_CASE("replay without a fixture directory is a configuration error") {
  TempDir ws("model-nofix");
  CliResult r = run_cli({"--assets", (kRepoRoot / "assets").string(), "model",
                      "--desc", (kRepoRoot / "cases/lslot/description.txt").string(),
                      "--mode", "strong", "--backend", "replay",
                      "--workspace", ws.path.string()});
  CHECK(r.code == 2);

  CliResult missing = run_cli({"--assets", (kRepoRoot / "assets").string(), "model",
                            "--desc", (kRepoRoot / "cases/lslot/description.txt").string(),
                            "--mode", "strong", "--backend", "replay",
                            "--fixtures", (kRepoRoot / "cases/absent").string(),
                            "--workspace", ws.path.string()});
  CHECK(missing.code == 2);
}

TEST_CASE("update applies parameters, reverifies, and rejects unknown names") {
  TempDir ws("update");
  REQUIRE(run_cli(model_args("lslot", "strong", ws.path)).code == 0);

  CliResult ok = run_cli({"update", "--workspace", ws.path.string(), "--param", "PatchW=12",
                       "--samples", "20000"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("exact 3.045") != std::string::npos);

  CliResult bad = run_cli({"update", "--workspace", ws.path.string(), "--param", "Nope=1",
                        "--samples", "1000"});
  CHECK(bad.code == 1);

  CliResult malformed = run_cli({"update", "--workspace", ws.path.string(), "--param", "PatchW",
                              "--samples", "1000"});
  CHECK(malformed.code == 2);
}

TEST_CASE("validate lints macro files together and alone") {
  TempDir ws("validate");
  REQUIRE(run_cli(model_args("lslot", "strong", ws.path)).code == 0);

  std::vector<std::string> args = {"--assets", (kRepoRoot / "assets").string(), "validate"};
  for (const char* f : {"Para.bas", "Materials.bas", "3D_Model.bas", "2D+_Model.bas",
                        "Boolean.bas"})
    args.push_back((ws.path / f).string());
  CliResult all = run_cli(args);
  CHECK(all.code == 0);
  CHECK(all.out.find("5 files clean") != std::string::npos);

  // The boolean file alone references solids created elsewhere.
  CliResult alone = run_cli({"--assets", (kRepoRoot / "assets").string(), "validate",
                          (ws.path / "Boolean.bas").string()});
  CHECK(alone.code == 1);
  CHECK(alone.err.find("not created") != std::string::npos);

  // A truncated file is a syntax error with a line number.
  write_file(ws.path / "broken.bas", "With Brick\n     .Reset\n     .Name \"x\"\n");
  CliResult broken = run_cli({"--assets", (kRepoRoot / "assets").string(), "validate",
                           (ws.path / "broken.bas").string()});
  CHECK(broken.code == 1);
  CHECK(broken.err.find("line") != std::string::npos);
}

TEST_CASE("geom-report verifies fixtures end to end") {
  TempDir lslot_ws("geom-lslot");
  REQUIRE(run_cli(model_args("lslot", "strong", lslot_ws.path)).code == 0);
  CliResult lslot = run_cli({"geom-report", "--workspace", lslot_ws.path.string(),
                          "--samples", "50000"});
  CHECK(lslot.code == 0);
  CHECK(lslot.out.find("exact 2.485") != std::string::npos);
  CHECK(fs::exists(lslot_ws.path / "geom_report.txt"));
  CHECK(fs::exists(lslot_ws.path / "geom_report.rec"));

  TempDir viv_ws("geom-vivaldi");
  REQUIRE(run_cli(model_args("vivaldi", "strong", viv_ws.path)).code == 0);
  CliResult viv = run_cli({"geom-report", "--workspace", viv_ws.path.string(),
                        "--samples", "20000"});
  CHECK(viv.code == 0);
  CHECK(viv.out.find("symmetry plane x = 15") != std::string::npos);
  CHECK(viv.out.find("asymmetry 0 (pass)") != std::string::npos);

  TempDir mono_ws("geom-monopole");
  REQUIRE(run_cli(model_args("monopole", "strong", mono_ws.path)).code == 0);
  CliResult mono = run_cli({"geom-report", "--workspace", mono_ws.path.string(),
                         "--samples", "20000"});
  CHECK(mono.code == 0);
  // The decimal identity holds to rounding; the report row must pass.
  CHECK(mono.out.find("constraint S_L = M_L + DP_R + 0.2: residual ") != std::string::npos);
  std::size_t row = mono.out.find("constraint S_L = M_L + DP_R + 0.2");
  CHECK(mono.out.find("(pass)", row) != std::string::npos);

  // Extra constraints via flags fail the run when violated.
  CliResult fail = run_cli({"geom-report", "--workspace", mono_ws.path.string(),
                         "--samples", "1000", "--constraint", "S_L = M_L"});
  CHECK(fail.code == 1);
}

TEST_CASE("design-patch prints the sizing and rejects bad input") {
  CliResult r = run_cli({"design-patch", "--f0", "2.45", "--er", "4.3", "--h", "1.6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("W = 37.58") != std::string::npos);
  CHECK(r.out.find("L = 29.1") != std::string::npos);

  CliResult air = run_cli({"design-patch", "--f0", "2.45", "--er", "1", "--h", "1.6"});
  CHECK(air.code == 0);
  // W = c / (2 f0) exactly for an air substrate.
  CHECK(air.out.find("W = " + format_number(299792458.0 / (2 * 2.45e9) * 1000.0)) !=
        std::string::npos);

  CliResult zero = run_cli({"design-patch", "--f0", "0", "--er", "4.3", "--h", "1.6"});
  CHECK(zero.code == 2);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"model"}).code == 2);             // missing required --desc
  CHECK(run_cli({"frobnicate"}).code == 2);        // unknown subcommand
  CHECK(run_cli({"geom-report", "--workspace", "/nonexistent-path"}).code == 2);
}
