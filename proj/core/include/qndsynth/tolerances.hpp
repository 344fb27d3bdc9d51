// Copyright 2026 The qndsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace qnd {

/// Numerical tolerances shared by every module. A single instance,
/// `kTol`, is the source of truth; property tests reference the same
/// fields the library checks against.
struct ToleranceConfig {
  // Density-matrix invariants.
  double hermitian = 1e-10;
  double trace = 1e-9;
  double psd = 1e-9;

  double unitary = 1e-9;
  double spectrum_preservation = 1e-8;
  double reconstruction = 1e-8;

  // Cyclic Jacobi: off-diagonal Frobenius threshold (scaled by max(1, |A|_F)).
  double jacobi_off = 1e-12;
  int jacobi_max_sweeps = 100;

  double completeness = 1e-10;
  double probability_floor = 1e-12;
  double probability_clamp = 1e-12;
  double absorbed_population = 0.999;

  double cone = 1e-8;
  double lambda_sum = 1e-7;
  double round_trip = 1e-10;
  double gap = 1e-8;
  double connectivity = 1e-8;

  double imaginary = 1e-9;
  double control_imaginary = 1e-10;
  double degenerate_quadratic = 1e-12;
};

inline constexpr ToleranceConfig kTol{};

}  // namespace qnd
