// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <atomic>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "leam/backend.hpp"
#include "leam/pipeline.hpp"

using namespace leam;
namespace fs = std::filesystem;

namespace {
const fs::path kRepoRoot = LEAM_REPO_ROOT;
}

TEST_CASE("the routing table reproduces the tool/model matrix") {
  ModelConfig models;  // defaults
  struct Row {
    ToolKind kind;
    const char* without_images;
    const char* with_images;
  };
  const std::string& o1 = models.reasoning_model;
  const std::string& gpt4o = models.base_model;
  std::vector<Row> table = {
      {ToolKind::weak_d2s, o1.c_str(), o1.c_str()},
      {ToolKind::strong_d2s, o1.c_str(), o1.c_str()},  // reasoning even with images
      {ToolKind::parameterize, o1.c_str(), gpt4o.c_str()},
      {ToolKind::dimension, o1.c_str(), gpt4o.c_str()},
      {ToolKind::materials, gpt4o.c_str(), gpt4o.c_str()},
      {ToolKind::model3d, o1.c_str(), o1.c_str()},
      {ToolKind::model2dplus, o1.c_str(), o1.c_str()},
      {ToolKind::boolean_plan, o1.c_str(), o1.c_str()},
      {ToolKind::update_para, o1.c_str(), o1.c_str()},
  };
  CHECK(table.size() == all_tools().size());
  for (const Row& row : table) {
    const ToolSpec& spec = tool_spec(row.kind);
    CHECK(route_model(spec, false, models) == row.without_images);
    CHECK(route_model(spec, true, models) == row.with_images);
  }
}

TEST_CASE("tool specs carry the tabulated I/O") {
  CHECK(tool_spec(ToolKind::materials).inputs ==
        std::vector<ArtifactKind>{ArtifactKind::solid_list});
  CHECK(tool_spec(ToolKind::boolean_plan).inputs.size() == 5);
  CHECK(tool_spec(ToolKind::strong_d2s).output == ArtifactKind::solid_list);
  CHECK(tool_spec(ToolKind::dimension).output == ArtifactKind::solids_dims);
  CHECK(artifact_filename(ArtifactKind::model2dplus_bas) == "2D+_Model.bas");
  CHECK(tool_from_name("UpdatePara") == ToolKind::update_para);
  CHECK_FALSE(tool_from_name("RunVBA").has_value());  // not an LLM tool
}

TEST_CASE("prompt assembly orders sections and flags missing artifacts") {
  ModelConfig models;
  PromptAssets assets = load_prompt_assets(kRepoRoot / "assets", ToolKind::dimension);
  ArtifactStore store;
  store.put(ArtifactKind::solid_list, "solid list text\n");
  store.put(ArtifactKind::para_bas, "para text\n");

  std::vector<ImageInput> images = {{"fig.png", std::string("\x89PNG fake", 9)}};
  AssembledPrompt prompt =
      assemble_prompt(tool_spec(ToolKind::dimension), store, "user words", images, assets, models);

  CHECK(prompt.model_id == models.base_model);  // image rule
  CHECK(prompt.system_text == assets.role_task);
  REQUIRE(prompt.user_sections.size() >= 4);
  CHECK(prompt.user_sections[0].heading == "instructions");
  CHECK(prompt.user_sections[1].heading.starts_with("knowledge "));
  std::size_t artifact_at = 0, user_at = 0;
  for (std::size_t i = 0; i < prompt.user_sections.size(); ++i) {
    if (prompt.user_sections[i].heading.starts_with("artifact ") && artifact_at == 0)
      artifact_at = i;
    if (prompt.user_sections[i].heading == "user") user_at = i;
  }
  CHECK(artifact_at > 1);
  CHECK(user_at > artifact_at);  // user text comes after former-tool outputs
  REQUIRE(prompt.images.size() == 1);
  CHECK(prompt.images[0].second == sha256_hex(images[0].bytes));

  // Same inputs, same canonical bytes.
  AssembledPrompt again =
      assemble_prompt(tool_spec(ToolKind::dimension), store, "user words", images, assets, models);
  CHECK(again.canonical_text() == prompt.canonical_text());

  // Materials embeds only the solid list: no user text, no images.
  PromptAssets mat_assets = load_prompt_assets(kRepoRoot / "assets", ToolKind::materials);
  AssembledPrompt mat = assemble_prompt(tool_spec(ToolKind::materials), store, "user words",
                                        images, mat_assets, models);
  CHECK(mat.images.empty());
  for (const auto& s : mat.user_sections) CHECK(s.heading != "user");

  // Stage-3 tools cannot run before their inputs exist.
  PromptAssets m3d = load_prompt_assets(kRepoRoot / "assets", ToolKind::model3d);
  try {
    assemble_prompt(tool_spec(ToolKind::model3d), store, "", {}, m3d, models);
    FAIL("missing artifact accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_artifact);
  }
}

TEST_CASE("code fences strip cleanly") {
  CHECK(strip_code_fence("```vba\nRebuild\n```\n") == "Rebuild\n");
  CHECK(strip_code_fence("```\nline\n```") == "line\n");
  CHECK(strip_code_fence("Rebuild\n") == "Rebuild\n");
  CHECK(strip_code_fence("\n\n```\nA\nB\n```\n\n") == "A\nB\n");
  CHECK(strip_code_fence("").empty());
}

TEST_CASE("replay answers by request hash and reports misses") {
  ReplayBackend replay(kRepoRoot / "cases/lslot");
  CHECK(replay.entries().size() == 7);

  AssembledPrompt fake;
  fake.tool = "StrongD2S";
  fake.model_id = "o1-2024-12-17";
  fake.system_text = "altered";
  try {
    replay.invoke(fake);
    FAIL("hash mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::fixture_miss);
  }

  CHECK_THROWS_AS(ReplayBackend(kRepoRoot / "cases/no_such_case"), Error);
}

TEST_CASE("gate validation routes by artifact kind") {
  MaterialCatalog catalog =
      MaterialCatalog::from_file(kRepoRoot / "assets/materials.catalog");
  GateContext ctx;
  ctx.catalog = &catalog;

  // Prior documents in execution order; the fixture responses are fenced.
  ctx.prior_macros.push_back(parse_macro(
      strip_code_fence(read_file(kRepoRoot / "cases/lslot/02_Parameterize.response.txt"))));
  ctx.prior_macros.push_back(parse_macro(
      strip_code_fence(read_file(kRepoRoot / "cases/lslot/04_Materials.response.txt"))));
  ctx.prior_macros.push_back(parse_macro(
      strip_code_fence(read_file(kRepoRoot / "cases/lslot/05_Model3D.response.txt"))));
  ctx.prior_macros.push_back(parse_macro(
      strip_code_fence(read_file(kRepoRoot / "cases/lslot/06_Model2DPlus.response.txt"))));

  GateResult ok = validate_output(tool_spec(ToolKind::boolean_plan),
                                  read_file(kRepoRoot / "cases/lslot/07_Boolean.response.txt"),
                                  ctx);
  CHECK(ok.ok());
  CHECK(ok.canonical == "Solid.Subtract \"component1:patch\", \"component1:slot\"\n");

  // A boolean command naming an uncreated solid fails the gate.
  GateResult ghost = validate_output(tool_spec(ToolKind::boolean_plan),
                                     "Solid.Subtract \"component1:x\", \"component1:y\"\n", ctx);
  CHECK_FALSE(ghost.ok());

  // Duplicate solids fail the stage-1 gate with DuplicateSolid.
  std::string dup =
      "solid a\n  role: patch\n  material: Copper (pure)\n  shape: brick\n"
      "  xrange: 0 .. 1\n  yrange: 0 .. 1\n  zrange: 0 .. 1\n\n"
      "solid a\n  role: patch\n  material: Copper (pure)\n  shape: brick\n"
      "  xrange: 0 .. 1\n  yrange: 0 .. 1\n  zrange: 0 .. 1\n";
  GateResult bad = validate_output(tool_spec(ToolKind::strong_d2s), dup, ctx);
  CHECK_FALSE(bad.ok());
  REQUIRE(!bad.diagnostics.empty());
  CHECK(bad.diagnostics[0].message.find("duplicate solid") != std::string::npos);

  // Statement kinds are restricted per file.
  GateResult wrong_kind =
      validate_output(tool_spec(ToolKind::parameterize), "Rebuild\n", ctx);
  CHECK_FALSE(wrong_kind.ok());
}

TEST_CASE("the http backend retries and then reports transport failure") {
  HttpBackendConfig cfg;
  cfg.base_url = "http://127.0.0.1:9";  // discard port; nothing listens
  cfg.max_attempts = 3;
  cfg.backoff_initial_ms = 1;
  HttpBackend backend(cfg);
  AssembledPrompt prompt;
  prompt.tool = "Boolean";
  prompt.model_id = "o1-2024-12-17";
  try {
    backend.invoke(prompt);
    FAIL("unreachable endpoint succeeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::backend_error);
  }
  CHECK(backend.attempts_made() == 3);
}

TEST_CASE("the http backend recovers from transient 5xx responses") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body = nlohmann::json::parse(req.body);
    CHECK(body["model"] == "o1-2024-12-17");
    if (++hits < 3) {
      res.status = 500;
      res.set_content("overloaded", "text/plain");
      return;
    }
    nlohmann::json reply = {
        {"choices", {{{"message", {{"role", "assistant"}, {"content", "Rebuild\n"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackendConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  cfg.api_key = "test-key";
  cfg.max_attempts = 3;
  cfg.backoff_initial_ms = 1;
  HttpBackend backend(cfg);

  AssembledPrompt prompt;
  prompt.tool = "UpdatePara";
  prompt.model_id = "o1-2024-12-17";
  prompt.system_text = "role";
  prompt.user_sections.push_back({"user", "update"});
  CHECK(backend.invoke(prompt) == "Rebuild\n");
  CHECK(backend.attempts_made() == 3);

  server.stop();
  runner.join();
}

TEST_CASE("multimodal request bodies embed data URLs") {
  HttpBackendConfig cfg;
  cfg.base_url = "http://127.0.0.1:9";
  HttpBackend backend(cfg);
  std::vector<ImageInput> images = {{"fig.png", "PNGBYTES"}};

  AssembledPrompt prompt;
  prompt.tool = "StrongD2S";
  prompt.model_id = "o1-2024-12-17";
  prompt.system_text = "role";
  prompt.user_sections.push_back({"user", "desc"});
  prompt.images.emplace_back("fig.png", sha256_hex("PNGBYTES"));

  nlohmann::json body = nlohmann::json::parse(backend.request_body(prompt, images));
  CHECK(body["model"] == "o1-2024-12-17");
  REQUIRE(body["messages"].size() == 2);
  CHECK(body["messages"][0]["role"] == "system");
  auto content = body["messages"][1]["content"];
  REQUIRE(content.is_array());
  CHECK(content[0]["type"] == "text");
  CHECK(content[1]["type"] == "image_url");
  std::string url = content[1]["image_url"]["url"];
  CHECK(url.starts_with("data:image/png;base64,"));
  CHECK(url.find(base64_encode("PNGBYTES")) != std::string::npos);
}

TEST_CASE("base64 handles all padding cases") {
  CHECK(base64_encode("") == "");
  CHECK(base64_encode("f") == "Zg==");
  CHECK(base64_encode("fo") == "Zm8=");
  CHECK(base64_encode("foo") == "Zm9v");
  CHECK(base64_encode("foob") == "Zm9vYg==");
}

TEST_CASE("sha256 matches a known vector") {
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
