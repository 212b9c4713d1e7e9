// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leam/error.hpp"

namespace leam {

enum class MaterialKind { conductor, normal };

struct MaterialRecord {
  std::string name;  // catalog key, verbatim
  MaterialKind kind = MaterialKind::normal;
  double epsilon_r = 1.0;    // normal only
  double tan_delta = 0.0;    // normal only
  double conductivity = 0.0; // conductor only, S/m
  friend bool operator==(const MaterialRecord&, const MaterialRecord&) = default;
};

// Stand-in for the simulator's material library: a plain data file in the
// repo, loaded once and immutable afterwards.
class MaterialCatalog {
 public:
  static MaterialCatalog from_text(std::string_view text);
  static MaterialCatalog from_file(const std::filesystem::path& path);

  // Exact-match lookup; unknown names raise unknown_material with the
  // nearest catalog names by edit distance in the message.
  const MaterialRecord& lookup(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> catalog_names() const;  // sorted, unique
  const std::vector<MaterialRecord>& records() const { return records_; }

 private:
  std::vector<MaterialRecord> records_;
};

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace leam
