// SPDX-License-Identifier: Apache-2.0
#include "leam/materials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace leam {

using detail::split_lines;
using detail::strip_comment;
using detail::trim;

namespace {

double parse_value(std::string_view text, long line) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw Error(Errc::format_error,
                "line " + std::to_string(line) + ": malformed number '" + std::string(text) + "'",
                line);
  return v;
}

void validate_record(const MaterialRecord& r) {
  if (r.name.empty()) throw Error(Errc::format_error, "material with empty name");
  if (r.kind == MaterialKind::normal) {
    if (r.epsilon_r < 1.0)
      throw Error(Errc::format_error, "material '" + r.name + "': epsilon_r must be >= 1");
    if (r.tan_delta < 0.0)
      throw Error(Errc::format_error, "material '" + r.name + "': tan_delta must be >= 0");
  } else {
    if (r.conductivity <= 0.0)
      throw Error(Errc::format_error, "material '" + r.name + "': conductivity must be > 0");
  }
}

}  // namespace

MaterialCatalog MaterialCatalog::from_text(std::string_view text) {
  MaterialCatalog cat;
  std::optional<MaterialRecord> draft;
  bool has_kind = false;

  auto close = [&] {
    if (!draft) return;
    if (!has_kind)
      throw Error(Errc::format_error, "material '" + draft->name + "' has no kind");
    validate_record(*draft);
    for (const MaterialRecord& r : cat.records_)
      if (r.name == draft->name)
        throw Error(Errc::format_error, "duplicate material '" + draft->name + "'");
    cat.records_.push_back(std::move(*draft));
    draft.reset();
    has_kind = false;
  };

  const auto lines = split_lines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const long lineno = static_cast<long>(idx + 1);
    std::string_view line = trim(strip_comment(lines[idx]));
    if (line.empty()) continue;

    if (line.starts_with("material ")) {
      close();
      draft.emplace();
      draft->name = std::string(trim(line.substr(9)));
      continue;
    }
    std::size_t colon = line.find(':');
    if (!draft || colon == std::string_view::npos)
      throw Error(Errc::format_error,
                  "line " + std::to_string(lineno) + ": unexpected line", lineno);
    std::string_view key = trim(line.substr(0, colon));
    std::string_view value = trim(line.substr(colon + 1));
    if (key == "kind") {
      if (value == "conductor") draft->kind = MaterialKind::conductor;
      else if (value == "normal") draft->kind = MaterialKind::normal;
      else
        throw Error(Errc::format_error,
                    "line " + std::to_string(lineno) + ": unknown material kind", lineno);
      has_kind = true;
    } else if (key == "epsilon_r") {
      draft->epsilon_r = parse_value(value, lineno);
    } else if (key == "tan_delta") {
      draft->tan_delta = parse_value(value, lineno);
    } else if (key == "conductivity") {
      draft->conductivity = parse_value(value, lineno);
    } else {
      throw Error(Errc::format_error,
                  "line " + std::to_string(lineno) + ": unknown field '" + std::string(key) + "'",
                  lineno);
    }
  }
  close();
  return cat;
}

MaterialCatalog MaterialCatalog::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open material catalog '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

bool MaterialCatalog::contains(std::string_view name) const {
  return std::any_of(records_.begin(), records_.end(),
                     [&](const MaterialRecord& r) { return r.name == name; });
}

const MaterialRecord& MaterialCatalog::lookup(std::string_view name) const {
  for (const MaterialRecord& r : records_)
    if (r.name == name) return r;

  // Rank catalog names by edit distance for the error message.
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (const MaterialRecord& r : records_) ranked.emplace_back(edit_distance(name, r.name), r.name);
  std::sort(ranked.begin(), ranked.end());
  std::string msg = "unknown material '" + std::string(name) + "'";
  if (!ranked.empty()) {
    msg += "; nearest:";
    for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) msg += " '" + ranked[i].second + "'";
  }
  throw Error(Errc::unknown_material, msg);
}

std::vector<std::string> MaterialCatalog::catalog_names() const {
  std::vector<std::string> names;
  names.reserve(records_.size());
  for (const MaterialRecord& r : records_) names.push_back(r.name);
  std::sort(names.begin(), names.end());
  return names;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t prev = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t cur = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         prev + (a[i - 1] == b[j - 1] ? 0 : 1)});
      prev = cur;
    }
  }
  return row[b.size()];
}

}  // namespace leam
