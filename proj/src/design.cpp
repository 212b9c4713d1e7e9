// SPDX-License-Identifier: Apache-2.0
#include "leam/design.hpp"

#include <cmath>

namespace leam {

PatchDesignOutput design_patch(const PatchDesignInput& in) {
  if (!(in.f0_hz > 0.0)) throw Error(Errc::config_error, "f0 must be > 0");
  if (!(in.epsilon_r >= 1.0)) throw Error(Errc::config_error, "epsilon_r must be >= 1");
  if (!(in.h_mm > 0.0)) throw Error(Errc::config_error, "substrate height must be > 0");

  const double half_wave_mm = kSpeedOfLight / (2.0 * in.f0_hz) * 1000.0;

  PatchDesignOutput out;
  out.width_mm = half_wave_mm * std::sqrt(2.0 / (in.epsilon_r + 1.0));
  out.epsilon_eff = (in.epsilon_r + 1.0) / 2.0 +
                    (in.epsilon_r - 1.0) / 2.0 /
                        std::sqrt(1.0 + 12.0 * in.h_mm / out.width_mm);
  const double ratio = out.width_mm / in.h_mm;
  out.delta_l_mm = 0.412 * in.h_mm * (out.epsilon_eff + 0.3) * (ratio + 0.264) /
                   ((out.epsilon_eff - 0.258) * (ratio + 0.8));
  out.length_mm = half_wave_mm / std::sqrt(out.epsilon_eff) - 2.0 * out.delta_l_mm;
  return out;
}

}  // namespace leam
