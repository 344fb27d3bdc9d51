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

#include "qndsynth/linalg.hpp"
#include "qndsynth/tolerances.hpp"

namespace qnd {

/// Tolerances used by validate_density.
struct DensityTolerance {
  double hermitian = kTol.hermitian;
  double trace = kTol.trace;
  double psd = kTol.psd;
};

/// A validated quantum state: Hermitian, unit trace, positive semidefinite.
///
/// Instances normally come from validate_density() / DensityMatrix::from().
/// Library routines that provably preserve the invariants (unitary
/// conjugation, QND collapse) build results through the unchecked path; the
/// simulation engines re-validate periodically.
class DensityMatrix {
 public:
  struct Unchecked {};

  DensityMatrix(ComplexMatrix m, Unchecked) : mat_(std::move(m)) {}

  /// Validates and throws InvariantViolation with the full report on failure.
  static DensityMatrix from(const ComplexMatrix& m, const DensityTolerance& tol = {});

  static DensityMatrix basis_state(std::size_t n, std::size_t index);
  static DensityMatrix maximally_mixed(std::size_t n);
  static DensityMatrix from_diagonal(const std::vector<double>& populations);
  static DensityMatrix pure(const std::vector<cplx>& amplitudes);

  const ComplexMatrix& matrix() const noexcept { return mat_; }
  std::size_t dim() const noexcept { return mat_.dim(); }
  double population(std::size_t n) const { return mat_(n, n).real(); }
  std::vector<double> populations() const;

  /// Tr(rho^2).
  double purity() const;

  /// Re-Hermitize and renormalize the trace to absorb round-off.
  DensityMatrix cleaned() const;

 private:
  ComplexMatrix mat_;
};

/// One violated density-matrix invariant and how badly.
struct DensityViolation {
  enum class Kind { kHermitian, kTrace, kPositivity };
  Kind kind;
  double magnitude;

  std::string describe() const;
};

struct DensityValidation {
  std::optional<DensityMatrix> state;
  std::vector<DensityViolation> violations;

  bool ok() const noexcept { return state.has_value(); }
  std::string describe() const;
};

/// Checks the three density invariants at the given tolerances. Throws
/// InvalidArgument on NaN/Inf entries (non-square input cannot be
/// represented by ComplexMatrix).
DensityValidation validate_density(const ComplexMatrix& m, const DensityTolerance& tol = {});

enum class OperatorRole { kDrift, kControl, kGeneric };

/// Hermitian matrix tagged with its role in the loop.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m, OperatorRole role = OperatorRole::kGeneric);

  static HermitianOperator diagonal(const std::vector<double>& d,
                                    OperatorRole role = OperatorRole::kGeneric);

  const ComplexMatrix& matrix() const noexcept { return mat_; }
  std::size_t dim() const noexcept { return mat_.dim(); }
  OperatorRole role() const noexcept { return role_; }
  bool is_diagonal(double tol = kTol.hermitian) const;

 private:
  ComplexMatrix mat_;
  OperatorRole role_;
};

/// Diagonal energy operator P = diag(sigma) and the index of its minimum.
class DiagonalObservable {
 public:
  /// n_star is the first index attaining the minimum.
  explicit DiagonalObservable(std::vector<double> sigma);
  /// Throws InvalidArgument when sigma[n_star] is not the minimum.
  DiagonalObservable(std::vector<double> sigma, std::size_t n_star);

  const std::vector<double>& sigma() const noexcept { return sigma_; }
  std::size_t n_star() const noexcept { return n_star_; }
  std::size_t dim() const noexcept { return sigma_.size(); }

  /// Smallest |p_i - p_j| over i != j.
  double min_gap() const;
  bool non_degenerate(double tol = kTol.gap) const { return min_gap() > tol; }
  /// True when more than one index attains the minimum within tol.
  bool minimum_is_degenerate(double tol = kTol.gap) const;

  ComplexMatrix matrix() const;
  HermitianOperator as_operator() const;

 private:
  std::vector<double> sigma_;
  std::size_t n_star_;
};

/// Re Tr(a rho); throws Error when |Im Tr(a rho)| exceeds the tolerance.
double expectation(const HermitianOperator& a, const DensityMatrix& rho);

/// exp(-i s h) via Hermitian eigendecomposition.
ComplexMatrix hermitian_expm(const HermitianOperator& h, double s);

/// U rho U^dagger; throws InvalidArgument when U is not unitary.
DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& u);

/// rho_nn, the population of basis state n.
double fidelity_to_basis(const DensityMatrix& rho, std::size_t n);

/// Half the trace norm of rho - sigma.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Cached eigendecomposition of a Hermitian generator, for repeated
/// evaluation of exp(-i s h) at many s.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const HermitianOperator& h);

  ComplexMatrix unitary(double s) const;
  /// exp(-i s h) rho exp(i s h), skipping the unitarity check.
  DensityMatrix conjugate(const DensityMatrix& rho, double s) const;
  std::size_t dim() const noexcept { return eig_.vectors.dim(); }

 private:
  HermitianEigen eig_;
};

/// U rho U^dagger without validation.
ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& rho);

}  // namespace qnd
