// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leam/error.hpp"

namespace leam {

// The nine pipeline tools. Each converts its inputs (earlier artifacts,
// user text, images) into exactly one output artifact.
enum class ToolKind {
  weak_d2s,
  strong_d2s,
  parameterize,
  dimension,
  materials,
  model3d,
  model2dplus,
  boolean_plan,
  update_para,
};

enum class ArtifactKind {
  solid_list,
  solids_dims,
  para_bas,
  materials_bas,
  model3d_bas,
  model2dplus_bas,
  boolean_bas,
  update_para_bas,
};

std::string_view tool_name(ToolKind kind);
std::optional<ToolKind> tool_from_name(std::string_view name);
std::string_view artifact_filename(ArtifactKind kind);

// Which model family serves a tool: the reasoning model for text-only
// work and for the description-to-solids tools regardless of images, the
// base model for material lookups and for image-bearing invocations of
// the tools that follow the image rule.
enum class Routing { reasoning_always, base_always, image_rule };

struct ToolSpec {
  ToolKind kind = ToolKind::strong_d2s;
  std::string name;
  std::string model_hint;  // as tabulated: "o1", "o1/4o", "4o"
  std::vector<ArtifactKind> inputs;
  ArtifactKind output = ArtifactKind::solid_list;
  bool accepts_text = false;
  bool accepts_images = false;
  Routing routing = Routing::reasoning_always;
};

const std::vector<ToolSpec>& all_tools();
const ToolSpec& tool_spec(ToolKind kind);

struct ModelConfig {
  std::string reasoning_model = "o1-2024-12-17";
  std::string base_model = "gpt-4o-2024-11-20";
};

std::string route_model(const ToolSpec& tool, bool has_images, const ModelConfig& models);

// Produced artifacts, immutable once written.
class ArtifactStore {
 public:
  void put(ArtifactKind kind, std::string text);
  const std::string& get(ArtifactKind kind) const;  // throws missing_artifact
  bool has(ArtifactKind kind) const;
  const std::map<ArtifactKind, std::string>& items() const { return items_; }

 private:
  std::map<ArtifactKind, std::string> items_;
};

struct ImageInput {
  std::string name;
  std::string bytes;
};

// Fully assembled request. canonical_text() is the replay identity: the
// exact bytes hashed for fixture matching and stored as *.request.txt.
struct AssembledPrompt {
  std::string tool;
  std::string model_id;
  std::string system_text;
  struct Section {
    std::string heading;
    std::string body;
  };
  std::vector<Section> user_sections;
  std::vector<std::pair<std::string, std::string>> images;  // name, sha256

  std::string canonical_text() const;
};

struct PromptAssets {
  std::string role_task;
  std::string instructions;
  std::vector<std::pair<std::string, std::string>> knowledge;  // filename, text
};

PromptAssets load_prompt_assets(const std::filesystem::path& assets_dir, ToolKind kind);

// Orders the prompt: role/task, functional instructions, knowledge files,
// former-tool artifacts, user text, then image references.
AssembledPrompt assemble_prompt(const ToolSpec& tool, const ArtifactStore& artifacts,
                                const std::string& user_text,
                                std::span<const ImageInput> images, const PromptAssets& assets,
                                const ModelConfig& models);

std::string sha256_hex(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace leam
