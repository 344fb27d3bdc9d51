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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qndsynth/error.hpp"
#include "qndsynth/measurement.hpp"
#include "support.hpp"

namespace qnd {
namespace {

using std::numbers::pi;

TEST(Measurement, PhotonBoxCoefficients) {
  const auto m = QndMeasurement::photon_box(8, 0.125, pi / 4);
  EXPECT_NEAR(m.coeff(0, 0).real(), 0.992197667229329, 1e-15);
  for (std::size_t n = 0; n < 8; ++n) EXPECT_NEAR(m.weight(0, n) + m.weight(1, n), 1.0, 1e-15);
}

TEST(Measurement, RejectsIncompleteSet) {
  EXPECT_THROW(QndMeasurement({{1.0, 0.5}, {0.0, 0.5}}), InvariantViolation);
  EXPECT_THROW(QndMeasurement({{1.0, 1.0}}), InvalidArgument);
  EXPECT_THROW(QndMeasurement({{1.0, 1.0}, {0.0}}), InvalidArgument);
}

TEST(Measurement, Distinguishability) {
  const auto bad = check_distinguishability(QndMeasurement::photon_box(8, 0.125, pi / 4));
  const std::vector<std::pair<std::size_t, std::size_t>> expected{{0, 4}, {1, 5}, {2, 6}, {3, 7}};
  EXPECT_EQ(bad, expected);
  EXPECT_TRUE(check_distinguishability(QndMeasurement::photon_box(8, 0.125, pi / 10)).empty());

  // A single trivial outcome, padded with an all-zero second row.
  std::vector<std::vector<cplx>> trivial{std::vector<cplx>(4, 1.0), std::vector<cplx>(4, 0.0)};
  EXPECT_EQ(check_distinguishability(QndMeasurement(trivial)).size(), 6u);
}

TEST(Measurement, OutcomeProbabilities) {
  const auto m = QndMeasurement::photon_box(8, 0.125, pi / 4);
  for (std::size_t n = 0; n < 8; ++n) {
    const auto p = outcome_probabilities(m, DensityMatrix::basis_state(8, n));
    EXPECT_NEAR(p[0], std::pow(std::cos(0.125 + n * pi / 4), 2), 1e-14);
    EXPECT_NEAR(p[1], std::pow(std::sin(0.125 + n * pi / 4), 2), 1e-14);
  }
  const auto pm = outcome_probabilities(m, DensityMatrix::maximally_mixed(8));
  double mean0 = 0.0;
  for (std::size_t n = 0; n < 8; ++n) mean0 += m.weight(0, n) / 8.0;
  EXPECT_NEAR(pm[0], mean0, 1e-14);
  RandomStream rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto p = outcome_probabilities(m, testing::random_density(8, rng));
    EXPECT_NEAR(p[0] + p[1], 1.0, 1e-12);
  }
  EXPECT_THROW(outcome_probabilities(m, DensityMatrix::maximally_mixed(3)), DimensionMismatch);
}

TEST(Measurement, ApplyOutcome) {
  const auto m = QndMeasurement::photon_box(8, 0.125, pi / 10);
  const auto e3 = DensityMatrix::basis_state(8, 3);
  EXPECT_LE(max_abs_diff(apply_outcome(m, 1, e3).matrix(), e3.matrix()), 1e-15);
  const auto diag = DensityMatrix::from_diagonal({0.1, 0.2, 0.3, 0.1, 0.1, 0.1, 0.05, 0.05});
  const auto after = apply_outcome(m, 0, diag).matrix();
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      if (i != j) {
        EXPECT_EQ(after(i, j), cplx(0.0));
      }

  const QndMeasurement sure({{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_THROW(apply_outcome(sure, 1, DensityMatrix::basis_state(2, 0)), OutcomeImpossible);
}

TEST(Measurement, RepeatedMeasurementPurifies) {
  const auto m = QndMeasurement::photon_box(8, pi / 40, pi / 10);
  RandomStream rng(99);
  std::vector<double> purities;
  for (int run = 0; run < 100; ++run) {
    DensityMatrix rho = DensityMatrix::maximally_mixed(8);
    for (int k = 0; k < 500; ++k) rho = apply_outcome(m, sample_outcome(m, rho, rng).mu, rho);
    purities.push_back(rho.purity());
  }
  std::nth_element(purities.begin(), purities.begin() + 50, purities.end());
  EXPECT_GE(purities[50], 0.999);
}

TEST(Measurement, SampleOutcome) {
  const QndMeasurement certain({{1.0, 0.0, 0.0}, {0.0, 1.0, 1.0}});
  RandomStream rng(1);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(sample_outcome(certain, DensityMatrix::basis_state(3, 0), rng).mu, 0u);

  const auto m = QndMeasurement::photon_box(8, 0.125, pi / 10);
  RandomStream r2(2024);
  const auto rho = testing::random_density(8, r2);
  const auto p = outcome_probabilities(m, rho);
  const int draws = 100000;
  int zeros = 0;
  for (int t = 0; t < draws; ++t) zeros += sample_outcome(m, rho, r2).mu == 0;
  const double sd = std::sqrt(p[0] * (1.0 - p[0]) / draws);
  EXPECT_LE(std::abs(zeros / double(draws) - p[0]), 3.0 * sd);

  RandomStream a(5), b(5);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(sample_outcome(m, rho, a).mu, sample_outcome(m, rho, b).mu);
}

TEST(Measurement, ExpectedUpdate) {
  const auto m = QndMeasurement::photon_box(8, 0.125, pi / 10);
  const auto p = testing::reference_p();
  RandomStream rng(31);
  for (int t = 0; t < 100; ++t) {
    const auto rho = testing::random_density(8, rng);
    const double v = expectation(p.as_operator(), rho);
    const double ev = expected_update(m, rho, [&](const DensityMatrix& r) { return expectation(p.as_operator(), r); });
    EXPECT_NEAR(ev, v, 1e-10);
    EXPECT_NEAR(expected_update(m, rho, [](const DensityMatrix&) { return 1.0; }), 1.0, 1e-12);
    EXPECT_GE(expected_update(m, rho, [](const DensityMatrix& r) { return r.purity(); }), rho.purity() - 1e-12);
  }
}

}  // namespace
}  // namespace qnd
