// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "leam/backend.hpp"
#include "leam/geom.hpp"
#include "leam/macro.hpp"

namespace leam {

enum class Mode { strong, weak };

// One tool invocation. `sequence` is a logical clock; serialized logs use
// it instead of wall-clock time so replay runs stay byte-identical.
struct ToolTranscript {
  int sequence = 0;
  std::string tool;
  std::string model_id;
  std::string request_text;
  std::string request_hash;
  std::string response_text;
  std::string response_hash;
  std::string artifact;
  bool ok = false;
};

struct PipelineConfig {
  std::filesystem::path workspace;
  std::filesystem::path assets_dir = "assets";
  std::filesystem::path catalog_path;   // defaults to <assets_dir>/materials.catalog
  std::filesystem::path verify_source;  // optional verify.txt installed into the workspace
  ModelConfig models;

  std::filesystem::path effective_catalog() const {
    return catalog_path.empty() ? assets_dir / "materials.catalog" : catalog_path;
  }
};

struct PipelineState {
  std::filesystem::path workspace;
  ArtifactStore artifacts;
  std::vector<ToolTranscript> transcripts;
  SolidList stage1;
  SolidList dims;
};

// Removes one layer of Markdown code fencing, if present.
std::string strip_code_fence(std::string_view raw);

struct GateContext {
  const MaterialCatalog* catalog = nullptr;
  std::vector<MacroDoc> prior_macros;  // execution order: Para, Materials, 3D, 2D+
  ParamEnv para_params;                // from Para.bas, for cross-checks
  std::optional<std::set<std::string>> expected_solids;
};

struct GateResult {
  std::string canonical;
  std::vector<Diagnostic> diagnostics;
  std::optional<SolidList> list;
  std::optional<MacroDoc> macro;
  bool ok() const { return diagnostics.empty(); }
};

// The validation gate between stages: normalizes the raw response, parses
// it with the artifact's parser, lints it in context, and canonicalizes.
// Failures come back as diagnostics, never as silently accepted output.
GateResult validate_output(const ToolSpec& tool, std::string_view raw_response,
                           const GateContext& context);

PipelineState run_pipeline(const std::string& user_text, const std::vector<ImageInput>& images,
                           Mode mode, LlmBackend& backend, const PipelineConfig& cfg);

// Emits UpdatePara.bas for the given values, updates the dimensioned IR,
// and extends the run manifest.
void run_update(PipelineState& state, const ParamEnv& new_values);

// Rebuilds a state from a completed workspace directory (no transcripts).
PipelineState load_workspace(const std::filesystem::path& dir);

std::string render_manifest(const PipelineState& state);
std::string render_transcript_log(const PipelineState& state);

// "2 solids, 7 parameters, 1 material"
std::string artifact_summary(const SolidList& dims);

inline constexpr const char* kManifestFile = "run_manifest.txt";
inline constexpr const char* kTranscriptLogFile = "transcript.log";
inline constexpr const char* kVerifyFile = "verify.txt";

}  // namespace leam
