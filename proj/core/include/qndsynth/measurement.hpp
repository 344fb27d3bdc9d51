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
#include <functional>
#include <utility>
#include <vector>

#include "qndsynth/linalg.hpp"
#include "qndsynth/quantum.hpp"
#include "qndsynth/rng.hpp"

namespace qnd {

/// QND measurement with Kraus operators M_mu = sum_n c[mu][n] |n><n|.
///
/// Construction enforces completeness, sum_mu |c[mu][n]|^2 = 1 for every n,
/// and at least two outcomes.
class QndMeasurement {
 public:
  explicit QndMeasurement(std::vector<std::vector<cplx>> coeffs);

  /// Photon-box style two-outcome measurement:
  /// c[0][n] = cos(phi0 + n theta), c[1][n] = sin(phi0 + n theta).
  static QndMeasurement photon_box(std::size_t n, double phi0, double theta);

  std::size_t dim() const noexcept { return coeffs_.front().size(); }
  std::size_t outcomes() const noexcept { return coeffs_.size(); }
  cplx coeff(std::size_t mu, std::size_t n) const { return coeffs_[mu][n]; }
  /// |c[mu][n]|^2.
  double weight(std::size_t mu, std::size_t n) const { return std::norm(coeffs_[mu][n]); }
  const std::vector<std::vector<cplx>>& coeffs() const noexcept { return coeffs_; }

  ComplexMatrix kraus(std::size_t mu) const;

 private:
  std::vector<std::vector<cplx>> coeffs_;
};

struct MeasurementOutcome {
  std::size_t mu;
  double probability;
};

/// p_mu = sum_n |c[mu][n]|^2 rho_nn. Values within the clamp tolerance below
/// zero are clamped to zero.
std::vector<double> outcome_probabilities(const QndMeasurement& meas, const DensityMatrix& rho);

/// M_mu rho M_mu^dagger / p_mu. Throws OutcomeImpossible when p_mu is at or
/// below the probability floor.
DensityMatrix apply_outcome(const QndMeasurement& meas, std::size_t mu, const DensityMatrix& rho);

/// M_mu rho M_mu^dagger, unnormalized.
ComplexMatrix apply_kraus(const QndMeasurement& meas, std::size_t mu, const ComplexMatrix& rho);

/// Inverse-CDF draw from outcome_probabilities.
MeasurementOutcome sample_outcome(const QndMeasurement& meas, const DensityMatrix& rho,
                                  RandomStream& rng);

/// Every pair (n1, n2), n1 < n2, whose outcome statistics agree within tol.
std::vector<std::pair<std::size_t, std::size_t>> check_distinguishability(
    const QndMeasurement& meas, double tol = kTol.gap);

using StateFunctional = std::function<double(const DensityMatrix&)>;

/// sum_mu p_mu f(M_mu(rho)), skipping outcomes at or below the floor.
double expected_update(const QndMeasurement& meas, const DensityMatrix& rho,
                       const StateFunctional& f);

}  // namespace qnd
