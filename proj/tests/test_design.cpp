// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "leam/design.hpp"

using namespace leam;

TEST_CASE("the 2.45 GHz FR-4 design lands on the expected dimensions") {
  PatchDesignOutput out = design_patch({2.45e9, 4.3, 1.6});

  // Independent arithmetic, spelled out step by step.
  double half_wave = 299792458.0 / (2.0 * 2.45e9) * 1000.0;
  double w = half_wave * std::sqrt(2.0 / 5.3);
  double eeff = 2.65 + 1.65 * std::pow(1.0 + 12.0 * 1.6 / w, -0.5);
  double dl = 1.6 * 0.412 * ((eeff + 0.3) * (w / 1.6 + 0.264)) /
              ((eeff - 0.258) * (w / 1.6 + 0.8));
  double l = half_wave / std::sqrt(eeff) - 2.0 * dl;

  CHECK(out.width_mm == doctest::Approx(w).epsilon(1e-12));
  CHECK(out.epsilon_eff == doctest::Approx(eeff).epsilon(1e-12));
  CHECK(out.delta_l_mm == doctest::Approx(dl).epsilon(1e-12));
  CHECK(out.length_mm == doctest::Approx(l).epsilon(1e-12));

  // Frozen coarse values from evaluating the model by hand.
  CHECK(out.width_mm == doctest::Approx(37.585).epsilon(1e-3));
  CHECK(out.length_mm == doctest::Approx(29.14).epsilon(1e-2));
}

TEST_CASE("an air substrate collapses the model") {
  PatchDesignOutput out = design_patch({2.45e9, 1.0, 1.6});
  CHECK(out.epsilon_eff == 1.0);
  CHECK(out.width_mm == 299792458.0 / (2.0 * 2.45e9) * 1000.0);
}

TEST_CASE("doubling the frequency halves the width exactly") {
  PatchDesignOutput a = design_patch({2.0e9, 4.3, 1.6});
  PatchDesignOutput b = design_patch({4.0e9, 4.3, 1.6});
  CHECK(b.width_mm == a.width_mm / 2.0);
}

TEST_CASE("monotonicity and bounds over the design grid") {
  for (double er = 1.0; er <= 12.0; er += 1.0) {
    for (double h = 0.2; h <= 3.2; h += 0.6) {
      double prev_w = 1e9;
      for (double f0 = 1.0; f0 <= 10.0; f0 += 0.5) {
        PatchDesignOutput out = design_patch({f0 * 1e9, er, h});
        CHECK(out.width_mm < prev_w);  // W strictly decreasing in f0
        prev_w = out.width_mm;
        CHECK(out.epsilon_eff >= 1.0);
        CHECK(out.epsilon_eff <= er + 1e-12);
      }
    }
  }
  for (double f0 = 1.0; f0 <= 10.0; f0 += 1.5) {
    for (double h = 0.2; h <= 3.2; h += 0.6) {
      double prev_eeff = 0.0;
      for (double er = 1.0; er <= 12.0; er += 0.5) {
        PatchDesignOutput out = design_patch({f0 * 1e9, er, h});
        CHECK(out.epsilon_eff > prev_eeff);  // eeff strictly increasing in er
        prev_eeff = out.epsilon_eff;
      }
    }
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(design_patch({0.0, 4.3, 1.6}), Error);
  CHECK_THROWS_AS(design_patch({2.45e9, 0.5, 1.6}), Error);
  CHECK_THROWS_AS(design_patch({2.45e9, 4.3, -1.0}), Error);
}
