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

#include <chrono>
#include <cmath>
#include <numeric>

#include "qndsynth/assumptions.hpp"
#include "qndsynth/error.hpp"
#include "qndsynth/synthesis.hpp"
#include "support.hpp"

namespace qnd {
namespace {

using testing::reference_p;

RealMatrix two_level_r() {
  RealMatrix r(2);
  r(0, 0) = r(1, 1) = -1.0;
  r(0, 1) = r(1, 0) = 1.0;
  return r;
}

HermitianOperator two_level_h1() {
  ComplexMatrix h(2);
  h(0, 1) = h(1, 0) = 1.0 / std::sqrt(2.0);
  return HermitianOperator(h);
}

TEST(Cone, MembershipOfNegatedLaplacian) {
  RealMatrix path(4);
  for (std::size_t i = 0; i + 1 < 4; ++i) {
    path(i, i + 1) = path(i + 1, i) = 1.0;
    path(i, i) -= 1.0;
    path(i + 1, i + 1) -= 1.0;
  }
  EXPECT_TRUE(cone_violation(path).within(1e-12));
  EXPECT_LE(max_abs_diff(project_cone(path).matrix(), path), 1e-10);
}

TEST(Cone, ViolationsReported) {
  RealMatrix m = RealMatrix::identity(3);
  const auto v = cone_violation(m);
  EXPECT_NEAR(v.diagonal, 1.0, 1e-15);
  EXPECT_NEAR(v.row_sum, 1.0, 1e-15);
  EXPECT_NEAR(v.max_eigenvalue, 1.0, 1e-12);
  EXPECT_THROW(ConnectivityMatrix{m}, InvariantViolation);
}

TEST(Cone, ProjectionLandsInCone) {
  const auto r = project_cone(RealMatrix::identity(5));
  EXPECT_TRUE(cone_violation(r.matrix()).within(1e-8));

  RandomStream rng(17);
  for (int t = 0; t < 20; ++t) {
    RealMatrix m(6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = i; j < 6; ++j) m(i, j) = m(j, i) = rng.normal();
    const auto p = project_cone_detailed(m);
    EXPECT_TRUE(cone_violation(p.r).within(1e-8));
    // Idempotence.
    EXPECT_LE(max_abs_diff(project_cone(p.r).matrix(), p.r), 1e-8);
  }
}

TEST(Cone, ProjectionWithTraceBound) {
  const auto r = project_cone(RealMatrix::identity(4), -2.0);
  EXPECT_LE(r.matrix().trace(), -2.0 + 1e-8);
  EXPECT_TRUE(cone_violation(r.matrix()).within(1e-8));
}

TEST(Cone, FromEdgeWeights) {
  const std::vector<double> w{1.0, 0.0, 2.0};  // (0,1), (0,2), (1,2)
  const auto r = ConnectivityMatrix::from_edge_weights(3, w);
  EXPECT_EQ(r(0, 0), -1.0);
  EXPECT_EQ(r(1, 1), -3.0);
  EXPECT_EQ(r(1, 2), 2.0);
  EXPECT_EQ(r.l1_norm(), 12.0);
  EXPECT_THROW(ConnectivityMatrix::from_edge_weights(3, std::vector<double>{1.0, -1.0, 0.0}), InvalidArgument);
}

TEST(RofH, TwoLevelExample) {
  EXPECT_LE(max_abs_diff(r_of_hamiltonian(two_level_h1()).matrix(), two_level_r()), 1e-15);
}

TEST(RofH, DiagonalHamiltonianGivesZero) {
  const auto r = r_of_hamiltonian(HermitianOperator::diagonal({1.0, -2.0, 0.5}));
  EXPECT_EQ(frobenius_norm(r.matrix()), 0.0);
}

TEST(RofH, ReferenceEntry) {
  ComplexMatrix h(8);
  h(0, 2) = h(2, 0) = 0.10951;
  const auto r = r_of_hamiltonian(HermitianOperator(h));
  EXPECT_NEAR(r(0, 2), 0.023986, 3e-6);
}

TEST(RofH, RandomHamiltoniansLandInCone) {
  RandomStream rng(23);
  for (int t = 0; t < 50; ++t) {
    const auto r = r_of_hamiltonian(testing::random_hermitian(6, rng));
    const auto v = cone_violation(r.matrix());
    EXPECT_LE(v.row_sum, 1e-12);
    EXPECT_LE(v.max_eigenvalue, 1e-8);
  }
}

TEST(HofR, TwoLevelExample) {
  const auto h = hamiltonian_of_r(ConnectivityMatrix(two_level_r()));
  EXPECT_LE(max_abs_diff(h.matrix(), two_level_h1().matrix()), 1e-15);
  const auto zero = hamiltonian_of_r(ConnectivityMatrix(RealMatrix(3)));
  EXPECT_EQ(frobenius_norm(zero.matrix()), 0.0);
}

TEST(HofR, ReferenceEntry) {
  RealMatrix r(2);
  r(0, 1) = r(1, 0) = 0.023986;
  r(0, 0) = r(1, 1) = -0.023986;
  EXPECT_NEAR(std::abs(hamiltonian_of_r(ConnectivityMatrix(r)).matrix()(0, 1)), 0.10951, 5e-6);
}

TEST(HofR, RoundTripEveryPolicy) {
  RandomStream rng(29);
  for (auto policy : {PhasePolicy::kPositive, PhasePolicy::kAlternating, PhasePolicy::kImaginaryOffDiagonal}) {
    for (int t = 0; t < 20; ++t) {
      const auto r = ConnectivityMatrix::from_edge_weights(5, testing::random_edge_weights(5, rng));
      const auto h = hamiltonian_of_r(r, policy);
      for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(h.matrix()(i, i), cplx(0.0));
      EXPECT_LE(max_abs_diff(r_of_hamiltonian(h).matrix(), r.matrix()), 1e-10);
    }
  }
}

TEST(HofR, PolicyNames) {
  EXPECT_EQ(phase_policy_from_string("alternating"), PhasePolicy::kAlternating);
  EXPECT_STREQ(to_string(PhasePolicy::kImaginaryOffDiagonal), "imaginary-off-diagonal");
  EXPECT_THROW(phase_policy_from_string("random"), InvalidArgument);
}

TEST(VerifyLambda, Examples) {
  const std::vector<double> sparse{-1, -1, 7, -1, -1, -1, -1, -1};
  EXPECT_TRUE(verify_lambda(sparse, 2).ok);
  const std::vector<double> dense{-5.8776, -8.0283, 27.8025, -3.6350, -1.9182, -1.3921, -2.5492, -4.4021};
  const auto c = verify_lambda(dense, 2);
  EXPECT_TRUE(c.ok);
  EXPECT_NEAR(c.sum, 0.0, 1e-7);
  const std::vector<double> zero(8, 0.0);
  const auto z = verify_lambda(zero, 2);
  EXPECT_FALSE(z.ok);
  EXPECT_FALSE(z.entry_ok[0]);
  EXPECT_FALSE(z.entry_ok[2]);
  EXPECT_FALSE(verify_lambda(sparse, 2, 1.5).ok);
}

TEST(Solver, TwoLevelAnalytic) {
  SynthesisProblem prob = SynthesisProblem::dense(DiagonalObservable({2.0, 1.0}, 1));
  const auto res = solve_synthesis(prob);
  EXPECT_LE(max_abs_diff(res.r.matrix(), two_level_r()), 1e-8);
  EXPECT_NEAR(res.lambda[0], -1.0, 1e-8);
  EXPECT_NEAR(res.lambda[1], 1.0, 1e-8);
  EXPECT_LE(res.residual, 1e-8);
  EXPECT_TRUE(res.feasible);
}

TEST(Solver, ReferenceDense) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = solve_synthesis(SynthesisProblem::dense(reference_p()));
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
  EXPECT_LE(res.residual, 1e-6);
  EXPECT_TRUE(res.feasible);
  EXPECT_TRUE(cone_violation(res.r.matrix()).within(1e-8));
  EXPECT_NEAR(std::accumulate(res.lambda_tilde.begin(), res.lambda_tilde.end(), 0.0), 0.0, 1e-7);
  EXPECT_GT(res.lambda_tilde[2], 0.0);
}

TEST(Solver, ReferenceSparse) {
  const auto res = solve_synthesis(SynthesisProblem::sparse(reference_p()));
  const std::vector<double> expected{-1, -1, 7, -1, -1, -1, -1, -1};
  for (std::size_t n = 0; n < 8; ++n) EXPECT_NEAR(res.lambda_tilde[n], expected[n], 1e-3);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      if (i != j && i != 2 && j != 2) {
        EXPECT_LE(std::abs(res.r(i, j)), 1e-4);
      }
  EXPECT_NEAR(res.r(0, 2), 0.023986, 3e-6);
}

TEST(Solver, L1ResidualNorm) {
  SynthesisProblem prob = SynthesisProblem::dense(reference_p());
  prob.norm = ResidualNorm::kL1;
  const auto res = solve_synthesis(prob);
  EXPECT_TRUE(res.feasible);
  EXPECT_LE(res.residual, 1e-6);
}

TEST(Solver, TraceBoundRespected) {
  SynthesisProblem prob = SynthesisProblem::sparse(reference_p());
  prob.trace_bound = -5.0;
  const auto res = solve_synthesis(prob);
  EXPECT_LE(res.r.matrix().trace(), -5.0 + 1e-8);
  EXPECT_TRUE(res.feasible);
}

TEST(Solver, LargerMarginsScaleTheSolution) {
  SynthesisProblem prob = SynthesisProblem::sparse(reference_p());
  prob.gamma1 = 2.0;
  prob.gamma2 = 2.0;
  const auto res = solve_synthesis(prob);
  for (std::size_t n = 0; n < 8; ++n) {
    if (n == 2) EXPECT_GE(res.lambda_tilde[n], 2.0 - 1e-6);
    else EXPECT_LE(res.lambda_tilde[n], -2.0 + 1e-6);
  }
}

TEST(Solver, RejectsBadHyperParameters) {
  SynthesisProblem prob = SynthesisProblem::dense(reference_p());
  prob.gamma1 = 0.0;
  EXPECT_THROW(solve_synthesis(prob), InvalidArgument);
  prob.gamma1 = 1.0;
  prob.alpha1 = 0.0;
  EXPECT_THROW(solve_synthesis(prob), InvalidArgument);
  prob.alpha1 = 1.0;
  prob.trace_bound = 1.0;
  EXPECT_THROW(solve_synthesis(prob), InvalidArgument);
}

TEST(Pipeline, ReferenceConvention) {
  const auto p = reference_p();
  const auto art = synthesis_pipeline(p, SynthesisProblem::dense(p));
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      if (i != j) {
        EXPECT_NEAR(std::abs(art.h1.matrix()(i, j)), std::sqrt(art.r(i, j) / 2.0), 1e-15);
      }
  EXPECT_TRUE(art.warnings.empty());
}

TEST(Pipeline, TwoLevel) {
  const DiagonalObservable p({2.0, 1.0}, 1);
  const auto art = synthesis_pipeline(p, SynthesisProblem::dense(p));
  EXPECT_LE(max_abs_diff(art.h1.matrix(), two_level_h1().matrix()), 1e-8);
}

TEST(Pipeline, ConstantObservableIsInfeasible) {
  const DiagonalObservable p({3.0, 3.0, 3.0, 3.0}, 0);
  try {
    synthesis_pipeline(p, SynthesisProblem::dense(p));
    FAIL() << "expected InfeasibleLambda";
  } catch (const InfeasibleLambda& e) {
    EXPECT_FALSE(e.result().feasible);
    EXPECT_NE(std::string(e.what()).find("hyper-parameters"), std::string::npos);
  }
}

TEST(Pipeline, SparseSolutionLacksFullConnectivity) {
  const auto p = reference_p();
  const auto art = synthesis_pipeline(p, SynthesisProblem::sparse(p));
  EXPECT_FALSE(art.assumptions.passed(AssumptionId::kFullConnectivity));
  EXPECT_TRUE(art.assumptions.passed(AssumptionId::kNonDegenerateSpectrum));
}

TEST(Assumptions, ArithmeticDriftFailsRegularity) {
  const auto rep = assumption_report(DiagonalObservable({1.0, 2.0, 3.0}),
                                     HermitianOperator::diagonal({0.0, 1.0, 2.0}), std::nullopt, std::nullopt);
  const auto& c = rep.get(AssumptionId::kStrongRegularity);
  EXPECT_TRUE(c.evaluated);
  EXPECT_FALSE(c.passed);
  const std::vector<std::size_t> witness{0, 1, 1, 2};
  EXPECT_NE(std::find(c.witnesses.begin(), c.witnesses.end(), witness), c.witnesses.end());
}

TEST(Assumptions, GapsCollideModuloTwoPi) {
  const double two_pi = 2.0 * std::acos(-1.0);
  // gap(0,1) = 0.3 and gap(2,3) = 0.3 + 2 pi.
  const auto rep = assumption_report(DiagonalObservable({1.0, 2.0, 3.0, 4.0}),
                                     HermitianOperator::diagonal({0.0, 0.3, 1.0, 1.3 + two_pi}));
  EXPECT_FALSE(rep.passed(AssumptionId::kStrongRegularity));
  const auto ok = assumption_report(DiagonalObservable({1.0, 2.0, 3.0, 4.0}),
                                    HermitianOperator::diagonal({0.0, 0.3, 1.1, 2.9}));
  EXPECT_TRUE(ok.passed(AssumptionId::kStrongRegularity));
}

TEST(Assumptions, ReferenceObservableNonDegenerate) {
  const auto rep = assumption_report(reference_p());
  EXPECT_TRUE(rep.passed(AssumptionId::kNonDegenerateSpectrum));
  EXPECT_TRUE(rep.passed(AssumptionId::kDiagonalBasis));
  EXPECT_FALSE(rep.get(AssumptionId::kFullConnectivity).evaluated);
  EXPECT_FALSE(rep.all_passed(required_for_deterministic()));
}

TEST(Assumptions, NonDiagonalDrift) {
  ComplexMatrix h0(2);
  h0(0, 1) = h0(1, 0) = 0.5;
  const auto rep = assumption_report(DiagonalObservable({1.0, 2.0}), HermitianOperator(h0));
  EXPECT_FALSE(rep.passed(AssumptionId::kDiagonalBasis));
}

}  // namespace
}  // namespace qnd
