// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leam {

// Error taxonomy shared by every module. `position` carries a byte offset
// for expression errors and a 1-based line number for file formats; -1 when
// not applicable.
enum class Errc {
  syntax_error,
  unknown_character,
  unbound_parameter,
  division_by_zero,
  format_error,
  duplicate_solid,
  duplicate_parameter,
  unknown_role,
  unknown_shape,
  open_polygon,
  degenerate_polygon,
  unknown_material,
  unknown_solid,
  unknown_parameter,
  unknown_block_kind,
  unknown_member,
  empty_bounding_box,
  missing_artifact,
  fixture_miss,
  backend_error,
  validation_failed,
  unsupported_shape,
  config_error,
  io_error,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, long position = -1)
      : std::runtime_error(message), code_(code), position_(position) {}

  Errc code() const noexcept { return code_; }
  long position() const noexcept { return position_; }

 private:
  Errc code_;
  long position_;
};

}  // namespace leam
