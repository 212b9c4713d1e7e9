// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "leam/error.hpp"

namespace leam {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact

struct PatchDesignInput {
  double f0_hz = 0.0;      // resonant frequency
  double epsilon_r = 1.0;  // substrate relative permittivity
  double h_mm = 0.0;       // substrate height
};

struct PatchDesignOutput {
  double width_mm = 0.0;
  double length_mm = 0.0;
  double epsilon_eff = 0.0;
  double delta_l_mm = 0.0;
};

// Transmission-line model for a rectangular microstrip patch:
//   W    = c / (2 f0) * sqrt(2 / (er + 1))
//   eeff = (er + 1)/2 + (er - 1)/2 * (1 + 12 h / W)^(-1/2)
//   dL/h = 0.412 (eeff + 0.3)(W/h + 0.264) / ((eeff - 0.258)(W/h + 0.8))
//   L    = c / (2 f0 sqrt(eeff)) - 2 dL
PatchDesignOutput design_patch(const PatchDesignInput& in);

}  // namespace leam
