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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qndsynth/measurement.hpp"
#include "qndsynth/quantum.hpp"

namespace qnd {

enum class AssumptionId {
  kDiagonalBasis,         // P and H0 diagonal in the reference basis
  kNonDegenerateSpectrum, // distinct eigenvalues of P
  kStrongRegularity,      // distinct H0 gaps, modulo 2 pi
  kFullConnectivity,      // every off-diagonal H1 entry nonzero
  kDistinguishability,    // QND statistics differ for every pair of levels
};

const char* to_string(AssumptionId id);

struct AssumptionCheck {
  AssumptionId id;
  /// False when the inputs needed for the check were not supplied.
  bool evaluated = false;
  bool passed = false;
  /// Indices witnessing each failure: pairs (i, j) for gaps, connectivity and
  /// distinguishability; quadruples (i, j, k, l) for colliding H0 gaps.
  std::vector<std::vector<std::size_t>> witnesses;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  const AssumptionCheck& get(AssumptionId id) const;
  /// True when the check was evaluated and passed.
  bool passed(AssumptionId id) const;
  bool all_passed(const std::vector<AssumptionId>& required) const;
  std::string describe() const;
};

AssumptionReport assumption_report(const DiagonalObservable& p,
                                   const std::optional<HermitianOperator>& h0 = std::nullopt,
                                   const std::optional<HermitianOperator>& h1 = std::nullopt,
                                   const std::optional<QndMeasurement>& meas = std::nullopt);

/// Assumptions each loop mode relies on.
std::vector<AssumptionId> required_for_deterministic();
std::vector<AssumptionId> required_for_stochastic();

}  // namespace qnd
