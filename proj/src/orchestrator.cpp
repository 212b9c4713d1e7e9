// SPDX-License-Identifier: Apache-2.0
#include "leam/orchestrator.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace leam {

std::string_view tool_name(ToolKind kind) {
  switch (kind) {
    case ToolKind::weak_d2s: return "WeakD2S";
    case ToolKind::strong_d2s: return "StrongD2S";
    case ToolKind::parameterize: return "Parameterize";
    case ToolKind::dimension: return "Dimension";
    case ToolKind::materials: return "Materials";
    case ToolKind::model3d: return "Model3D";
    case ToolKind::model2dplus: return "Model2DPlus";
    case ToolKind::boolean_plan: return "Boolean";
    case ToolKind::update_para: return "UpdatePara";
  }
  return "";
}

std::optional<ToolKind> tool_from_name(std::string_view name) {
  for (const ToolSpec& spec : all_tools())
    if (spec.name == name) return spec.kind;
  return std::nullopt;
}

std::string_view artifact_filename(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::solid_list: return "Solid_List.txt";
    case ArtifactKind::solids_dims: return "Solids_Dims.txt";
    case ArtifactKind::para_bas: return "Para.bas";
    case ArtifactKind::materials_bas: return "Materials.bas";
    case ArtifactKind::model3d_bas: return "3D_Model.bas";
    case ArtifactKind::model2dplus_bas: return "2D+_Model.bas";
    case ArtifactKind::boolean_bas: return "Boolean.bas";
    case ArtifactKind::update_para_bas: return "UpdatePara.bas";
  }
  return "";
}

const std::vector<ToolSpec>& all_tools() {
  static const std::vector<ToolSpec> tools = [] {
    using AK = ArtifactKind;
    std::vector<ToolSpec> v;
    auto add = [&](ToolKind kind, std::string hint, std::vector<AK> inputs, AK output,
                   bool text, bool images, Routing routing) {
      ToolSpec spec;
      spec.kind = kind;
      spec.name = std::string(tool_name(kind));
      spec.model_hint = std::move(hint);
      spec.inputs = std::move(inputs);
      spec.output = output;
      spec.accepts_text = text;
      spec.accepts_images = images;
      spec.routing = routing;
      v.push_back(std::move(spec));
    };
    add(ToolKind::weak_d2s, "o1", {}, AK::solid_list, true, true, Routing::reasoning_always);
    add(ToolKind::strong_d2s, "o1", {}, AK::solid_list, true, true, Routing::reasoning_always);
    add(ToolKind::parameterize, "o1/4o", {AK::solid_list}, AK::para_bas, true, true,
        Routing::image_rule);
    add(ToolKind::dimension, "o1/4o", {AK::solid_list, AK::para_bas}, AK::solids_dims, true,
        true, Routing::image_rule);
    add(ToolKind::materials, "4o", {AK::solid_list}, AK::materials_bas, false, false,
        Routing::base_always);
    add(ToolKind::model3d, "o1", {AK::solids_dims, AK::para_bas, AK::materials_bas},
        AK::model3d_bas, false, false, Routing::reasoning_always);
    add(ToolKind::model2dplus, "o1", {AK::solids_dims, AK::para_bas, AK::materials_bas},
        AK::model2dplus_bas, false, false, Routing::reasoning_always);
    add(ToolKind::boolean_plan, "o1",
        {AK::solids_dims, AK::para_bas, AK::materials_bas, AK::model3d_bas,
         AK::model2dplus_bas},
        AK::boolean_bas, false, false, Routing::reasoning_always);
    add(ToolKind::update_para, "o1",
        {AK::para_bas, AK::materials_bas, AK::model3d_bas, AK::model2dplus_bas,
         AK::boolean_bas},
        AK::update_para_bas, true, false, Routing::reasoning_always);
    return v;
  }();
  return tools;
}

const ToolSpec& tool_spec(ToolKind kind) {
  for (const ToolSpec& spec : all_tools())
    if (spec.kind == kind) return spec;
  throw Error(Errc::config_error, "unknown tool");
}

std::string route_model(const ToolSpec& tool, bool has_images, const ModelConfig& models) {
  switch (tool.routing) {
    case Routing::reasoning_always: return models.reasoning_model;
    case Routing::base_always: return models.base_model;
    case Routing::image_rule:
      return (has_images && tool.accepts_images) ? models.base_model : models.reasoning_model;
  }
  return models.reasoning_model;
}

void ArtifactStore::put(ArtifactKind kind, std::string text) {
  auto [it, inserted] = items_.emplace(kind, std::move(text));
  if (!inserted)
    throw Error(Errc::format_error,
                "artifact '" + std::string(artifact_filename(kind)) + "' already produced");
}

const std::string& ArtifactStore::get(ArtifactKind kind) const {
  auto it = items_.find(kind);
  if (it == items_.end())
    throw Error(Errc::missing_artifact,
                "artifact '" + std::string(artifact_filename(kind)) + "' has not been produced");
  return it->second;
}

bool ArtifactStore::has(ArtifactKind kind) const { return items_.count(kind) > 0; }

std::string AssembledPrompt::canonical_text() const {
  std::string out;
  out += "tool: " + tool + "\n";
  out += "model: " + model_id + "\n";
  out += "\n=== system ===\n";
  out += system_text;
  if (!system_text.empty() && system_text.back() != '\n') out += '\n';
  for (const Section& s : user_sections) {
    out += "\n=== " + s.heading + " ===\n";
    out += s.body;
    if (!s.body.empty() && s.body.back() != '\n') out += '\n';
  }
  for (const auto& [name, hash] : images) out += "\n=== image " + name + " sha256:" + hash + " ===\n";
  return out;
}

PromptAssets load_prompt_assets(const std::filesystem::path& assets_dir, ToolKind kind) {
  namespace fs = std::filesystem;
  fs::path dir = assets_dir / "tools" / std::string(tool_name(kind));
  PromptAssets assets;
  fs::path role = dir / "role_task.txt";
  fs::path instructions = dir / "instructions.txt";
  if (!fs::exists(role) || !fs::exists(instructions))
    throw Error(Errc::config_error,
                "prompt assets for " + std::string(tool_name(kind)) + " not found under '" +
                    dir.string() + "'");
  assets.role_task = read_file(role);
  assets.instructions = read_file(instructions);
  fs::path knowledge = dir / "knowledge";
  if (fs::exists(knowledge)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(knowledge))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files)
      assets.knowledge.emplace_back(f.filename().string(), read_file(f));
  }
  return assets;
}

AssembledPrompt assemble_prompt(const ToolSpec& tool, const ArtifactStore& artifacts,
                                const std::string& user_text,
                                std::span<const ImageInput> images, const PromptAssets& assets,
                                const ModelConfig& models) {
  AssembledPrompt prompt;
  prompt.tool = tool.name;
  bool has_images = tool.accepts_images && !images.empty();
  prompt.model_id = route_model(tool, !images.empty(), models);
  prompt.system_text = assets.role_task;

  prompt.user_sections.push_back({"instructions", assets.instructions});
  for (const auto& [name, text] : assets.knowledge)
    prompt.user_sections.push_back({"knowledge " + name, text});
  for (ArtifactKind kind : tool.inputs)
    prompt.user_sections.push_back(
        {"artifact " + std::string(artifact_filename(kind)), artifacts.get(kind)});
  if (tool.accepts_text && !user_text.empty())
    prompt.user_sections.push_back({"user", user_text});
  if (has_images)
    for (const ImageInput& img : images)
      prompt.images.emplace_back(img.name, sha256_hex(img.bytes));
  return prompt;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(Errc::backend_error, "sha256 digest failed");
  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::io_error, "short write to '" + path.string() + "'");
}

}  // namespace leam
