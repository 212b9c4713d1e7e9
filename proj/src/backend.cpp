// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "leam/backend.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace leam {

namespace {

// Fixture files are "NN_<tool>.request.txt" / "NN_<tool>.response.txt".
bool parse_fixture_name(const std::string& stem, int& sequence, std::string& tool,
                        std::string& side) {
  std::size_t us = stem.find('_');
  std::size_t dot = stem.rfind('.');
  if (us == std::string::npos || dot == std::string::npos || dot <= us) return false;
  int seq = 0;
  auto res = std::from_chars(stem.data(), stem.data() + us, seq);
  if (res.ec != std::errc() || res.ptr != stem.data() + us) return false;
  sequence = seq;
  tool = stem.substr(us + 1, dot - us - 1);
  side = stem.substr(dot + 1);
  return true;
}

}  // namespace

ReplayBackend::ReplayBackend(const std::filesystem::path& fixture_dir, bool loose)
    : dir_(fixture_dir), loose_(loose) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir_))
    throw Error(Errc::config_error, "fixture directory '" + dir_.string() + "' does not exist");
  std::map<std::pair<int, std::string>, Entry> found;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (!entry.is_regular_file()) continue;
    std::string filename = entry.path().filename().string();
    if (!filename.ends_with(".txt")) continue;
    std::string stem = filename.substr(0, filename.size() - 4);
    int seq = 0;
    std::string tool, side;
    if (!parse_fixture_name(stem, seq, tool, side)) continue;
    Entry& e = found[{seq, tool}];
    e.sequence = seq;
    e.tool = tool;
    if (side == "request") e.request_path = entry.path();
    else if (side == "response") e.response_path = entry.path();
  }
  for (auto& [key, e] : found) {
    if (e.request_path.empty() || e.response_path.empty())
      throw Error(Errc::config_error, "fixture entry " + std::to_string(e.sequence) + "_" +
                                          e.tool + " is missing a request or response file");
    entries_.push_back(std::move(e));
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.sequence < b.sequence; });
}

std::string ReplayBackend::invoke(const AssembledPrompt& prompt) {
  const std::string wanted = sha256_hex(prompt.canonical_text());
  for (const Entry& e : entries_) {
    if (e.tool != prompt.tool) continue;
    if (loose_) {
      if (used_.count(e.sequence)) continue;
      used_.insert(e.sequence);
      return read_file(e.response_path);
    }
    if (sha256_hex(read_file(e.request_path)) == wanted) return read_file(e.response_path);
  }
  throw Error(Errc::fixture_miss, "no fixture transcript for tool " + prompt.tool +
                                      " with request sha256:" + wanted);
}

std::string base64_encode(std::string_view bytes) {
  static const char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                 (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                 static_cast<unsigned char>(bytes[i + 2]);
    out += table[(v >> 18) & 63];
    out += table[(v >> 12) & 63];
    out += table[(v >> 6) & 63];
    out += table[v & 63];
    i += 3;
  }
  if (i + 1 == bytes.size()) {
    unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
    out += table[(v >> 18) & 63];
    out += table[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) |
                 (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out += table[(v >> 18) & 63];
    out += table[(v >> 12) & 63];
    out += table[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty())
    throw Error(Errc::config_error, "live backend needs a base URL (LEAM_API_BASE)");
  if (config_.max_attempts < 1) config_.max_attempts = 1;
}

std::string HttpBackend::request_body(const AssembledPrompt& prompt,
                                      std::span<const ImageInput> images) const {
  nlohmann::json body;
  body["model"] = prompt.model_id;
  nlohmann::json messages = nlohmann::json::array();
  messages.push_back({{"role", "system"}, {"content", prompt.system_text}});

  std::string user_text;
  for (const AssembledPrompt::Section& s : prompt.user_sections) {
    user_text += "=== " + s.heading + " ===\n";
    user_text += s.body;
    if (!s.body.empty() && s.body.back() != '\n') user_text += '\n';
    user_text += '\n';
  }

  if (prompt.images.empty()) {
    messages.push_back({{"role", "user"}, {"content", user_text}});
  } else {
    nlohmann::json parts = nlohmann::json::array();
    parts.push_back({{"type", "text"}, {"text", user_text}});
    for (const auto& [name, hash] : prompt.images) {
      auto it = std::find_if(images.begin(), images.end(),
                             [&](const ImageInput& img) { return img.name == name; });
      if (it == images.end())
        throw Error(Errc::backend_error, "image '" + name + "' referenced but not attached");
      parts.push_back({{"type", "image_url"},
                       {"image_url",
                        {{"url", "data:image/png;base64," + base64_encode(it->bytes)}}}});
    }
    messages.push_back({{"role", "user"}, {"content", parts}});
  }
  body["messages"] = messages;
  return body.dump();
}

std::string HttpBackend::invoke(const AssembledPrompt& prompt) {
  // Split "scheme://host[:port]/prefix" into client target and path prefix.
  std::string url = config_.base_url;
  std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(Errc::config_error, "base URL must include a scheme");
  std::size_t path_start = url.find('/', scheme_end + 3);
  std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  const std::string body = request_body(prompt, images_);
  const std::string path = prefix + "/chat/completions";

  attempts_made_ = 0;
  std::string last_error;
  int delay_ms = config_.backoff_initial_ms;
  for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms *= 2;
    }
    ++attempts_made_;

    httplib::Client client(origin);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + config_.api_key);

    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status == 429 || result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200)
      throw Error(Errc::backend_error,
                  "HTTP " + std::to_string(result->status) + ": " + result->body);

    try {
      nlohmann::json reply = nlohmann::json::parse(result->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
      throw Error(Errc::backend_error, std::string("malformed completion response: ") + e.what());
    }
  }
  throw Error(Errc::backend_error, "backend unreachable after " +
                                       std::to_string(config_.max_attempts) +
                                       " attempts (" + last_error + ")");
}

}  // namespace leam
