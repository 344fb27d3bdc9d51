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

#include "qndsynth/measurement.hpp"

#include <algorithm>
#include <cmath>

#include "qndsynth/error.hpp"

namespace qnd {

double RandomStream::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

QndMeasurement::QndMeasurement(std::vector<std::vector<cplx>> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 2) throw InvalidArgument("QND measurement needs at least two outcomes");
  const std::size_t n = coeffs_.front().size();
  if (n < 2) throw InvalidArgument("QND measurement dimension must be at least 2");
  for (const auto& row : coeffs_) {
    if (row.size() != n) throw InvalidArgument("QND coefficient rows have unequal length");
    for (const auto& c : row)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw InvalidArgument("QND coefficients contain NaN or Inf");
  }
  for (std::size_t k = 0; k < n; ++k) {
    double total = 0.0;
    for (const auto& row : coeffs_) total += std::norm(row[k]);
    if (std::abs(total - 1.0) > kTol.completeness) {
      throw InvariantViolation("QND completeness fails at n = " + std::to_string(k) +
                               ": sum_mu |c|^2 = " + std::to_string(total));
    }
  }
}

QndMeasurement QndMeasurement::photon_box(std::size_t n, double phi0, double theta) {
  if (n < 2) throw InvalidArgument("photon_box: dimension must be at least 2");
  std::vector<std::vector<cplx>> c(2, std::vector<cplx>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = phi0 + static_cast<double>(k) * theta;
    c[0][k] = std::cos(angle);
    c[1][k] = std::sin(angle);
  }
  return QndMeasurement(std::move(c));
}

ComplexMatrix QndMeasurement::kraus(std::size_t mu) const {
  if (mu >= outcomes()) throw InvalidArgument("outcome index out of range");
  return ComplexMatrix::diagonal(coeffs_[mu]);
}

std::vector<double> outcome_probabilities(const QndMeasurement& meas, const DensityMatrix& rho) {
  if (meas.dim() != rho.dim()) throw DimensionMismatch("outcome_probabilities", meas.dim(), rho.dim());
  std::vector<double> p(meas.outcomes(), 0.0);
  for (std::size_t mu = 0; mu < meas.outcomes(); ++mu) {
    double acc = 0.0;
    for (std::size_t n = 0; n < meas.dim(); ++n) acc += meas.weight(mu, n) * rho.population(n);
    if (acc < 0.0 && acc >= -kTol.probability_clamp) acc = 0.0;
    p[mu] = acc;
  }
  return p;
}

ComplexMatrix apply_kraus(const QndMeasurement& meas, std::size_t mu, const ComplexMatrix& rho) {
  const std::size_t n = rho.dim();
  ComplexMatrix out(n);
  const auto& c = meas.coeffs()[mu];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = c[i] * std::conj(c[j]) * rho(i, j);
  return out;
}

DensityMatrix apply_outcome(const QndMeasurement& meas, std::size_t mu, const DensityMatrix& rho) {
  if (meas.dim() != rho.dim()) throw DimensionMismatch("apply_outcome", meas.dim(), rho.dim());
  if (mu >= meas.outcomes()) throw InvalidArgument("apply_outcome: outcome index out of range");
  double p = 0.0;
  for (std::size_t n = 0; n < meas.dim(); ++n) p += meas.weight(mu, n) * rho.population(n);
  if (p <= kTol.probability_floor) throw OutcomeImpossible(mu, p);
  ComplexMatrix out = apply_kraus(meas, mu, rho.matrix());
  out *= cplx(1.0 / p);
  return DensityMatrix(std::move(out), DensityMatrix::Unchecked{});
}

MeasurementOutcome sample_outcome(const QndMeasurement& meas, const DensityMatrix& rho,
                                  RandomStream& rng) {
  const auto p = outcome_probabilities(meas, rho);
  double total = 0.0;
  for (double x : p) total += x;
  const double draw = rng.uniform() * total;
  double cumulative = 0.0;
  std::size_t last_possible = 0;
  for (std::size_t mu = 0; mu < p.size(); ++mu) {
    if (p[mu] <= kTol.probability_floor) continue;
    last_possible = mu;
    cumulative += p[mu];
    if (draw < cumulative) return {mu, p[mu]};
  }
  // Rounding can leave draw just above the final cumulative sum.
  return {last_possible, p[last_possible]};
}

std::vector<std::pair<std::size_t, std::size_t>> check_distinguishability(const QndMeasurement& meas,
                                                                          double tol) {
  std::vector<std::pair<std::size_t, std::size_t>> bad;
  for (std::size_t a = 0; a < meas.dim(); ++a) {
    for (std::size_t b = a + 1; b < meas.dim(); ++b) {
      double gap = 0.0;
      for (std::size_t mu = 0; mu < meas.outcomes(); ++mu)
        gap = std::max(gap, std::abs(meas.weight(mu, a) - meas.weight(mu, b)));
      if (gap <= tol) bad.emplace_back(a, b);
    }
  }
  return bad;
}

double expected_update(const QndMeasurement& meas, const DensityMatrix& rho, const StateFunctional& f) {
  const auto p = outcome_probabilities(meas, rho);
  double acc = 0.0;
  for (std::size_t mu = 0; mu < p.size(); ++mu) {
    if (p[mu] <= kTol.probability_floor) continue;
    acc += p[mu] * f(apply_outcome(meas, mu, rho));
  }
  return acc;
}

}  // namespace qnd
