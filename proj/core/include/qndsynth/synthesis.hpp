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
#include <span>
#include <string>
#include <vector>

#include "qndsynth/assumptions.hpp"
#include "qndsynth/error.hpp"
#include "qndsynth/linalg.hpp"
#include "qndsynth/quantum.hpp"

namespace qnd {

/// Worst violation of each membership condition of the cone of
/// connectivity matrices: symmetric, negative semidefinite, zero row sums,
/// non-positive diagonal, non-negative off-diagonal.
struct ConeViolation {
  double symmetry = 0.0;
  double max_eigenvalue = 0.0;  // clamped at 0 from below
  double row_sum = 0.0;
  double diagonal = 0.0;        // largest positive diagonal entry
  double off_diagonal = 0.0;    // magnitude of most negative off-diagonal entry

  double worst() const;
  bool within(double tol) const { return worst() <= tol; }
  std::string describe() const;
};

ConeViolation cone_violation(const RealMatrix& r);

/// Real symmetric matrix R in the cone, the image of a control Hamiltonian.
class ConnectivityMatrix {
 public:
  /// Validates membership at the given tolerance; throws InvariantViolation.
  explicit ConnectivityMatrix(RealMatrix r, double tol = kTol.cone);

  /// Negated graph Laplacian of a weighted undirected graph; weights indexed
  /// by the upper-triangle edge order (0,1), (0,2), ..., (n-2,n-1).
  static ConnectivityMatrix from_edge_weights(std::size_t n, std::span<const double> weights);

  const RealMatrix& matrix() const noexcept { return r_; }
  std::size_t dim() const noexcept { return r_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return r_(i, j); }

  /// R sigma.
  std::vector<double> apply(std::span<const double> sigma) const;
  /// Entry-wise l1 norm of vec(R).
  double l1_norm() const;

 private:
  RealMatrix r_;
};

/// R_ij = 2|<i|H1|j>|^2 off the diagonal, R_ii = 2(|<i|H1|i>|^2 - <i|H1^2|i>).
ConnectivityMatrix r_of_hamiltonian(const HermitianOperator& h1);

enum class PhasePolicy { kPositive, kAlternating, kImaginaryOffDiagonal };

const char* to_string(PhasePolicy p);
PhasePolicy phase_policy_from_string(const std::string& s);

/// Zero-diagonal H1 with |H1_ij| = sqrt(R_ij / 2). Off-diagonal entries of R
/// within the cone tolerance below zero are treated as zero; larger negative
/// entries throw InvalidArgument.
HermitianOperator hamiltonian_of_r(const ConnectivityMatrix& r, PhasePolicy policy = PhasePolicy::kPositive);

struct LambdaCheck {
  bool ok = false;
  /// Per entry: negative enough off n*, positive enough at n*.
  std::vector<bool> entry_ok;
  double sum = 0.0;
  bool sum_ok = false;

  std::string describe(std::size_t n_star) const;
};

/// lambda_n <= -margin (and < 0) for n != n*, lambda_{n*} >= margin (and > 0),
/// and |sum lambda| within the lambda-sum tolerance.
LambdaCheck verify_lambda(std::span<const double> lambda_tilde, std::size_t n_star,
                          double margin = 0.0);

/// Frobenius-nearest point of the cone, by cyclic Dykstra projections onto
/// the negative semidefinite cone, the symmetric zero-row-sum subspace, the
/// sign orthant and (when given) the halfspace Tr(R) <= trace_bound.
struct ConeProjection {
  RealMatrix r;
  int cycles = 0;
};

ConeProjection project_cone_detailed(const RealMatrix& m, std::optional<double> trace_bound = std::nullopt);
ConnectivityMatrix project_cone(const RealMatrix& m, std::optional<double> trace_bound = std::nullopt);

enum class ResidualNorm { kL1, kL2 };

struct SynthesisProblem {
  DiagonalObservable observable;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double alpha1 = 1.0;
  double alpha2 = 0.0;
  ResidualNorm norm = ResidualNorm::kL2;
  /// Optional Tr(R) <= beta with beta < 0.
  std::optional<double> trace_bound{};

  /// alpha1 = alpha2 = 1: sparsity-promoting objective.
  static SynthesisProblem sparse(DiagonalObservable p);
  static SynthesisProblem dense(DiagonalObservable p);

  void validate() const;
};

struct SynthesisResult {
  ConnectivityMatrix r;
  std::vector<double> lambda;        // solver variable
  std::vector<double> lambda_tilde;  // R sigma
  double residual = 0.0;             // |R sigma - lambda| in the problem norm
  double objective = 0.0;
  long iterations = 0;
  bool feasible = false;             // verify_lambda(lambda_tilde)
  LambdaCheck check;
};

/// Solver did not reach its stopping tolerance within the iteration budget.
class NoFeasiblePoint : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

SynthesisResult solve_synthesis(const SynthesisProblem& problem);

/// lambda_tilde failed verification; the caller should adjust gamma/alpha.
class InfeasibleLambda : public Error {
 public:
  InfeasibleLambda(SynthesisResult result, const std::string& message)
      : Error(message), result_(std::move(result)) {}
  const SynthesisResult& result() const noexcept { return result_; }

 private:
  SynthesisResult result_;
};

struct SynthesisArtifacts {
  HermitianOperator h1;
  ConnectivityMatrix r;
  SynthesisResult result;
  AssumptionReport assumptions;
  std::vector<std::string> warnings;
};

/// Solve, verify lambda_tilde, build H1. Throws InfeasibleLambda instead of
/// emitting H1 when verification fails.
SynthesisArtifacts synthesis_pipeline(const DiagonalObservable& p, const SynthesisProblem& cfg,
                                      PhasePolicy policy = PhasePolicy::kPositive);

}  // namespace qnd
