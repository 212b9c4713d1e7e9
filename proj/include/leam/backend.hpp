// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "leam/orchestrator.hpp"

namespace leam {

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string invoke(const AssembledPrompt& prompt) = 0;
  virtual std::string describe() const = 0;
};

// Answers from recorded transcripts. Strict matching keys on the sha256 of
// the canonical request text, which makes fixtures tamper-evident; loose
// matching replays by tool order only and exists for prompt-asset work.
class ReplayBackend : public LlmBackend {
 public:
  explicit ReplayBackend(const std::filesystem::path& fixture_dir, bool loose = false);

  std::string invoke(const AssembledPrompt& prompt) override;
  std::string describe() const override { return "replay:" + dir_.string(); }

  struct Entry {
    int sequence = 0;
    std::string tool;
    std::filesystem::path request_path;
    std::filesystem::path response_path;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::filesystem::path dir_;
  bool loose_;
  std::vector<Entry> entries_;
  std::set<int> used_;
};

struct HttpBackendConfig {
  std::string base_url;  // e.g. "https://api.openai.com/v1"
  std::string api_key;
  int max_attempts = 3;
  int backoff_initial_ms = 500;  // doubles per retry
  int timeout_seconds = 120;
};

// OpenAI-compatible chat-completions client. Retries transport failures,
// 429 and 5xx responses with exponential backoff.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  std::string invoke(const AssembledPrompt& prompt) override;
  std::string describe() const override { return "live:" + config_.base_url; }

  // Request body for one prompt; exposed for tests.
  std::string request_body(const AssembledPrompt& prompt,
                           std::span<const ImageInput> images) const;

  // Images must be attached before invoke for multimodal prompts; the
  // assembled prompt itself only carries content hashes.
  void attach_images(std::vector<ImageInput> images) { images_ = std::move(images); }

  int attempts_made() const { return attempts_made_; }

 private:
  HttpBackendConfig config_;
  std::vector<ImageInput> images_;
  int attempts_made_ = 0;
};

std::string base64_encode(std::string_view bytes);

}  // namespace leam
