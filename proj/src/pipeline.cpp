// SPDX-License-Identifier: Apache-2.0
#include "leam/pipeline.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace leam {

namespace fs = std::filesystem;

std::string strip_code_fence(std::string_view raw) {
  auto lines = detail::split_lines(raw);
  // Trim blank lines at both ends first.
  std::size_t begin = 0, end = lines.size();
  while (begin < end && detail::trim(lines[begin]).empty()) ++begin;
  while (end > begin && detail::trim(lines[end - 1]).empty()) --end;
  if (begin < end && detail::trim(lines[begin]).starts_with("```") &&
      detail::trim(lines[end - 1]) == "```" && end - begin >= 2) {
    ++begin;
    --end;
  }
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    std::string_view line = lines[i];
    while (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out += line;
    out += '\n';
  }
  return out;
}

namespace {

const char* statement_kind_name(const MacroStatement& st) {
  if (std::holds_alternative<ParamDecl>(st)) return "parameter declaration";
  if (std::holds_alternative<MaterialBlock>(st)) return "material block";
  if (std::holds_alternative<BrickBlock>(st)) return "brick block";
  if (std::holds_alternative<CylinderBlock>(st)) return "cylinder block";
  if (std::holds_alternative<PolygonBlock>(st)) return "polygon block";
  if (std::holds_alternative<ExtrudeBlock>(st)) return "extrude block";
  if (std::holds_alternative<BooleanCmd>(st)) return "boolean command";
  if (std::holds_alternative<StoreParam>(st)) return "parameter update";
  return "rebuild";
}

bool statement_allowed(ArtifactKind kind, const MacroStatement& st) {
  switch (kind) {
    case ArtifactKind::para_bas: return std::holds_alternative<ParamDecl>(st);
    case ArtifactKind::materials_bas: return std::holds_alternative<MaterialBlock>(st);
    case ArtifactKind::model3d_bas:
      return std::holds_alternative<BrickBlock>(st) || std::holds_alternative<CylinderBlock>(st);
    case ArtifactKind::model2dplus_bas:
      return std::holds_alternative<PolygonBlock>(st) || std::holds_alternative<ExtrudeBlock>(st);
    case ArtifactKind::boolean_bas: return std::holds_alternative<BooleanCmd>(st);
    case ArtifactKind::update_para_bas:
      return std::holds_alternative<StoreParam>(st) || std::holds_alternative<RebuildCmd>(st);
    default: return false;
  }
}

GateResult gate_solid_list(const ToolSpec& tool, const std::string& text,
                           const GateContext& ctx) {
  GateResult result;
  bool dimensioned = tool.output == ArtifactKind::solids_dims;
  SolidList list;
  try {
    list = parse_solid_list(text, dimensioned);
  } catch (const Error& e) {
    result.diagnostics.push_back({std::string(artifact_filename(tool.output)), e.position(),
                                  e.what()});
    return result;
  }

  if (dimensioned) {
    // The dimensioned list must agree with Para.bas and keep the stage-1
    // solid set.
    for (const auto& [name, value] : ctx.para_params.items()) {
      if (!list.parameters.contains(name))
        result.diagnostics.push_back({std::string(artifact_filename(tool.output)), 0,
                                      "parameter '" + name + "' from Para.bas is missing"});
      else if (list.parameters.get(name) != value)
        result.diagnostics.push_back({std::string(artifact_filename(tool.output)), 0,
                                      "parameter '" + name + "' disagrees with Para.bas"});
    }
    for (const auto& [name, value] : list.parameters.items())
      if (!ctx.para_params.contains(name))
        result.diagnostics.push_back({std::string(artifact_filename(tool.output)), 0,
                                      "parameter '" + name + "' is not declared in Para.bas"});
    if (ctx.expected_solids) {
      std::set<std::string> got;
      for (const Solid& s : list.solids) got.insert(s.name);
      if (got != *ctx.expected_solids)
        result.diagnostics.push_back({std::string(artifact_filename(tool.output)), 0,
                                      "solid set differs from the stage-1 list"});
    }
  }
  if (ctx.catalog) {
    for (const Solid& s : list.solids)
      if (!ctx.catalog->contains(s.material))
        result.diagnostics.push_back({std::string(artifact_filename(tool.output)), 0,
                                      "material '" + s.material + "' is not in the catalog"});
  }
  if (!result.diagnostics.empty()) return result;
  result.canonical = serialize_solid_list(list);
  result.list = std::move(list);
  return result;
}

GateResult gate_macro(const ToolSpec& tool, const std::string& text, const GateContext& ctx) {
  GateResult result;
  MacroDoc doc;
  try {
    doc = parse_macro(text);
  } catch (const Error& e) {
    result.diagnostics.push_back({std::string(artifact_filename(tool.output)), e.position(),
                                  e.what()});
    return result;
  }

  for (std::size_t i = 0; i < doc.statements.size(); ++i) {
    if (!statement_allowed(tool.output, doc.statements[i])) {
      long line = i < doc.source_lines.size() ? doc.source_lines[i] : 0;
      result.diagnostics.push_back({std::string(artifact_filename(tool.output)), line,
                                    std::string(statement_kind_name(doc.statements[i])) +
                                        " is not allowed in " +
                                        std::string(artifact_filename(tool.output))});
    }
  }

  std::vector<MacroDoc> docs = ctx.prior_macros;
  docs.push_back(doc);
  std::vector<std::string> labels(docs.size());
  labels.back() = std::string(artifact_filename(tool.output));
  if (ctx.catalog) {
    auto diags = lint_macros(docs, ParamEnv{}, *ctx.catalog, labels);
    for (Diagnostic& d : diags)
      if (d.file == labels.back()) result.diagnostics.push_back(std::move(d));
  }
  if (!result.diagnostics.empty()) return result;
  result.canonical = emit_macro_text(doc);
  result.macro = std::move(doc);
  return result;
}

}  // namespace

GateResult validate_output(const ToolSpec& tool, std::string_view raw_response,
                           const GateContext& context) {
  std::string text = strip_code_fence(raw_response);
  if (tool.output == ArtifactKind::solid_list || tool.output == ArtifactKind::solids_dims)
    return gate_solid_list(tool, text, context);
  return gate_macro(tool, text, context);
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const Diagnostic& d : diags) {
    if (!out.empty()) out += "; ";
    out += to_text(d);
  }
  return out;
}

}  // namespace

std::string render_manifest(const PipelineState& state) {
  std::string out;
  for (ArtifactKind kind :
       {ArtifactKind::para_bas, ArtifactKind::materials_bas, ArtifactKind::model3d_bas,
        ArtifactKind::model2dplus_bas, ArtifactKind::boolean_bas,
        ArtifactKind::update_para_bas}) {
    if (!state.artifacts.has(kind)) continue;
    out += std::string(artifact_filename(kind)) + " sha256:" +
           sha256_hex(state.artifacts.get(kind)) + "\n";
  }
  return out;
}

std::string render_transcript_log(const PipelineState& state) {
  std::string out;
  for (const ToolTranscript& t : state.transcripts) {
    char seq[8];
    std::snprintf(seq, sizeof seq, "%02d", t.sequence);
    out += std::string(seq) + " tool=" + t.tool + " model=" + t.model_id +
           " request=sha256:" + t.request_hash + " response=sha256:" + t.response_hash +
           " artifact=" + t.artifact + (t.ok ? " status=ok" : " status=failed") + "\n";
  }
  return out;
}

std::string artifact_summary(const SolidList& dims) {
  auto count = [](std::size_t n, const char* word) {
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
  };
  return count(dims.solids.size(), "solid") + ", " +
         count(dims.parameters.size(), "parameter") + ", " +
         count(dims.materials_used().size(), "material");
}

PipelineState run_pipeline(const std::string& user_text, const std::vector<ImageInput>& images,
                           Mode mode, LlmBackend& backend, const PipelineConfig& cfg) {
  fs::create_directories(cfg.workspace);
  MaterialCatalog catalog = MaterialCatalog::from_file(cfg.effective_catalog());

  PipelineState state;
  state.workspace = cfg.workspace;
  GateContext ctx;
  ctx.catalog = &catalog;
  int sequence = 0;

  auto invoke = [&](ToolKind kind) {
    const ToolSpec& spec = tool_spec(kind);
    PromptAssets assets = load_prompt_assets(cfg.assets_dir, kind);
    AssembledPrompt prompt =
        assemble_prompt(spec, state.artifacts, user_text, images, assets, cfg.models);
    std::string raw = backend.invoke(prompt);

    ToolTranscript transcript;
    transcript.sequence = ++sequence;
    transcript.tool = spec.name;
    transcript.model_id = prompt.model_id;
    transcript.request_text = prompt.canonical_text();
    transcript.request_hash = sha256_hex(transcript.request_text);
    transcript.response_text = raw;
    transcript.response_hash = sha256_hex(raw);
    transcript.artifact = std::string(artifact_filename(spec.output));

    GateResult gate = validate_output(spec, raw, ctx);
    transcript.ok = gate.ok();
    state.transcripts.push_back(transcript);
    if (!gate.ok())
      throw Error(Errc::validation_failed,
                  spec.name + " output rejected: " + join_diagnostics(gate.diagnostics));

    state.artifacts.put(spec.output, gate.canonical);
    write_file(cfg.workspace / std::string(artifact_filename(spec.output)), gate.canonical);

    if (gate.macro) {
      ctx.prior_macros.push_back(*gate.macro);
      if (spec.output == ArtifactKind::para_bas) ctx.para_params = params_from_macro(*gate.macro);
    }
    if (gate.list) {
      if (spec.output == ArtifactKind::solid_list) {
        state.stage1 = std::move(*gate.list);
        std::set<std::string> names;
        for (const Solid& s : state.stage1.solids) names.insert(s.name);
        ctx.expected_solids = std::move(names);
      } else {
        state.dims = std::move(*gate.list);
      }
    }
  };

  // Stage 1: identify solids.
  invoke(mode == Mode::strong ? ToolKind::strong_d2s : ToolKind::weak_d2s);
  // Stage 2: define solids.
  invoke(ToolKind::parameterize);
  invoke(ToolKind::dimension);
  invoke(ToolKind::materials);
  // Stage 3: model solids, then the boolean plan.
  invoke(ToolKind::model3d);
  invoke(ToolKind::model2dplus);
  invoke(ToolKind::boolean_plan);
  // Stage 4: the run manifest stands in for macro execution.
  write_file(cfg.workspace / kManifestFile, render_manifest(state));
  write_file(cfg.workspace / kTranscriptLogFile, render_transcript_log(state));

  if (!cfg.verify_source.empty() && fs::exists(cfg.verify_source))
    write_file(cfg.workspace / kVerifyFile, read_file(cfg.verify_source));
  return state;
}

void run_update(PipelineState& state, const ParamEnv& new_values) {
  if (state.dims.solids.empty())
    throw Error(Errc::config_error, "workspace has no dimensioned solid list");

  MacroDoc doc = emit_update_para(new_values, state.dims.parameters);
  for (const auto& [name, value] : new_values.items())
    state.dims.parameters.assign(name, value);
  // Re-validates all shape invariants under the new values.
  std::string dims_text = serialize_solid_list(state.dims);

  std::string update_text = emit_macro_text(doc);
  if (state.artifacts.has(ArtifactKind::update_para_bas)) {
    // Subsequent updates replace the previous UpdatePara.bas.
    PipelineState fresh;
    for (const auto& [kind, text] : state.artifacts.items())
      if (kind != ArtifactKind::update_para_bas) fresh.artifacts.put(kind, text);
    fresh.workspace = state.workspace;
    fresh.transcripts = state.transcripts;
    fresh.stage1 = state.stage1;
    fresh.dims = state.dims;
    state = std::move(fresh);
  }
  state.artifacts.put(ArtifactKind::update_para_bas, update_text);

  write_file(state.workspace / std::string(artifact_filename(ArtifactKind::update_para_bas)),
             update_text);
  write_file(state.workspace / std::string(artifact_filename(ArtifactKind::solids_dims)),
             dims_text);
  write_file(state.workspace / kManifestFile, render_manifest(state));
}

PipelineState load_workspace(const fs::path& dir) {
  PipelineState state;
  state.workspace = dir;
  if (!fs::is_directory(dir))
    throw Error(Errc::config_error, "workspace '" + dir.string() + "' does not exist");
  for (ArtifactKind kind :
       {ArtifactKind::solid_list, ArtifactKind::solids_dims, ArtifactKind::para_bas,
        ArtifactKind::materials_bas, ArtifactKind::model3d_bas, ArtifactKind::model2dplus_bas,
        ArtifactKind::boolean_bas, ArtifactKind::update_para_bas}) {
    fs::path path = dir / std::string(artifact_filename(kind));
    if (fs::exists(path)) state.artifacts.put(kind, read_file(path));
  }
  if (state.artifacts.has(ArtifactKind::solid_list))
    state.stage1 = parse_solid_list(state.artifacts.get(ArtifactKind::solid_list), false);
  if (state.artifacts.has(ArtifactKind::solids_dims))
    state.dims = parse_solid_list(state.artifacts.get(ArtifactKind::solids_dims), true);
  return state;
}

}  // namespace leam
