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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qndsynth/error.hpp"
#include "qndsynth/quantum.hpp"

namespace qnd {

DensityMatrix DensityMatrix::from(const ComplexMatrix& m, const DensityTolerance& tol) {
  auto v = validate_density(m, tol);
  if (!v.ok()) throw InvariantViolation("invalid density matrix: " + v.describe());
  return *std::move(v.state);
}

DensityMatrix DensityMatrix::basis_state(std::size_t n, std::size_t index) {
  if (index >= n) throw InvalidArgument("basis index out of range");
  ComplexMatrix m(n);
  m(index, index) = 1.0;
  return DensityMatrix(std::move(m), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t n) {
  return DensityMatrix(ComplexMatrix::identity(n) * cplx(1.0 / static_cast<double>(n)),
                       Unchecked{});
}

DensityMatrix DensityMatrix::from_diagonal(const std::vector<double>& populations) {
  std::vector<cplx> d(populations.begin(), populations.end());
  return from(ComplexMatrix::diagonal(d));
}

DensityMatrix DensityMatrix::pure(const std::vector<cplx>& amplitudes) {
  double norm2 = 0.0;
  for (const auto& a : amplitudes) norm2 += std::norm(a);
  if (!(norm2 > 0.0)) throw InvalidArgument("pure state needs a nonzero amplitude vector");
  const std::size_t n = amplitudes.size();
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = amplitudes[i] * std::conj(amplitudes[j]) / norm2;
  return DensityMatrix(std::move(m), Unchecked{});
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> p(dim());
  for (std::size_t i = 0; i < dim(); ++i) p[i] = mat_(i, i).real();
  return p;
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
  double acc = 0.0;
  for (const auto& x : mat_.entries()) acc += std::norm(x);
  return acc;
}

DensityMatrix DensityMatrix::cleaned() const {
  ComplexMatrix h = hermitian_part(mat_);
  const double tr = h.trace().real();
  h *= cplx(1.0 / tr);
  return DensityMatrix(std::move(h), Unchecked{});
}

std::string DensityViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::kHermitian: os << "not Hermitian (max |rho_ij - conj(rho_ji)| = "; break;
    case Kind::kTrace: os << "trace not one (|Tr rho - 1| = "; break;
    case Kind::kPositivity: os << "not positive semidefinite (min eigenvalue = -"; break;
  }
  os << magnitude << ")";
  return os.str();
}

std::string DensityValidation::describe() const {
  if (violations.empty()) return "valid";
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "; ";
    s += v.describe();
  }
  return s;
}

DensityValidation validate_density(const ComplexMatrix& m, const DensityTolerance& tol) {
  if (has_non_finite(m)) throw InvalidArgument("density matrix has NaN or Inf entries");

  DensityValidation out;
  const double herm = hermiticity_defect(m);
  if (herm > tol.hermitian) out.violations.push_back({DensityViolation::Kind::kHermitian, herm});

  const double tr_err = std::abs(m.trace() - cplx(1.0));
  if (tr_err > tol.trace) out.violations.push_back({DensityViolation::Kind::kTrace, tr_err});

  const auto eig = eigh(hermitian_part(m));
  const double min_ev = eig.values.front();
  if (min_ev < -tol.psd) {
    out.violations.push_back({DensityViolation::Kind::kPositivity, -min_ev});
  }

  if (out.violations.empty()) out.state.emplace(m, DensityMatrix::Unchecked{});
  return out;
}

HermitianOperator::HermitianOperator(ComplexMatrix m, OperatorRole role)
    : mat_(std::move(m)), role_(role) {
  if (has_non_finite(mat_)) throw InvalidArgument("operator has NaN or Inf entries");
  if (hermiticity_defect(mat_) > kTol.hermitian * std::max(1.0, frobenius_norm(mat_))) {
    throw InvalidArgument("operator is not Hermitian");
  }
}

HermitianOperator HermitianOperator::diagonal(const std::vector<double>& d, OperatorRole role) {
  std::vector<cplx> c(d.begin(), d.end());
  return HermitianOperator(ComplexMatrix::diagonal(c), role);
}

bool HermitianOperator::is_diagonal(double tol) const {
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j)
      if (i != j && std::abs(mat_(i, j)) > tol) return false;
  return true;
}

DiagonalObservable::DiagonalObservable(std::vector<double> sigma) : sigma_(std::move(sigma)) {
  if (sigma_.size() < 2) throw InvalidArgument("observable needs at least two levels");
  for (double s : sigma_)
    if (!std::isfinite(s)) throw InvalidArgument("observable has non-finite entries");
  n_star_ = static_cast<std::size_t>(std::min_element(sigma_.begin(), sigma_.end()) - sigma_.begin());
}

DiagonalObservable::DiagonalObservable(std::vector<double> sigma, std::size_t n_star)
    : DiagonalObservable(std::move(sigma)) {
  if (n_star >= sigma_.size()) throw InvalidArgument("n_star out of range");
  if (sigma_[n_star] != sigma_[n_star_]) {
    throw InvalidArgument("sigma[n_star] = " + std::to_string(sigma_[n_star]) +
                          " is not the minimum " + std::to_string(sigma_[n_star_]));
  }
  n_star_ = n_star;
}

double DiagonalObservable::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sigma_.size(); ++i)
    for (std::size_t j = i + 1; j < sigma_.size(); ++j) g = std::min(g, std::abs(sigma_[i] - sigma_[j]));
  return g;
}

bool DiagonalObservable::minimum_is_degenerate(double tol) const {
  std::size_t count = 0;
  for (double s : sigma_)
    if (s - sigma_[n_star_] <= tol) ++count;
  return count > 1;
}

ComplexMatrix DiagonalObservable::matrix() const {
  std::vector<cplx> d(sigma_.begin(), sigma_.end());
  return ComplexMatrix::diagonal(d);
}

HermitianOperator DiagonalObservable::as_operator() const { return HermitianOperator(matrix()); }

double expectation(const HermitianOperator& a, const DensityMatrix& rho) {
  if (a.dim() != rho.dim()) throw DimensionMismatch("expectation", a.dim(), rho.dim());
  const cplx v = trace_of_product(a.matrix(), rho.matrix());
  if (std::abs(v.imag()) > kTol.imaginary * std::max(1.0, std::abs(v))) {
    throw Error("expectation: imaginary part " + std::to_string(v.imag()) + " exceeds tolerance");
  }
  return v.real();
}

ComplexMatrix hermitian_expm(const HermitianOperator& h, double s) {
  return expm_hermitian(h.matrix(), s);
}

ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& rho) {
  return u * rho * u.adjoint();
}

DensityMatrix evolve(const DensityMatrix& rho, const ComplexMatrix& u) {
  if (u.dim() != rho.dim()) throw DimensionMismatch("evolve", u.dim(), rho.dim());
  const double defect = unitarity_defect(u);
  if (defect > kTol.unitary) {
    throw InvalidArgument("evolve: matrix is not unitary (defect " + std::to_string(defect) + ")");
  }
  return DensityMatrix(conjugate_by(u, rho.matrix()), DensityMatrix::Unchecked{});
}

double fidelity_to_basis(const DensityMatrix& rho, std::size_t n) {
  if (n >= rho.dim()) throw InvalidArgument("fidelity_to_basis: index out of range");
  return std::clamp(rho.population(n), 0.0, 1.0);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("trace_distance", a.dim(), b.dim());
  const auto ev = eigh(hermitian_part(a.matrix() - b.matrix())).values;
  double acc = 0.0;
  for (double x : ev) acc += std::abs(x);
  return 0.5 * acc;
}

SpectralPropagator::SpectralPropagator(const HermitianOperator& h) : eig_(eigh(h.matrix())) {}

ComplexMatrix SpectralPropagator::unitary(double s) const {
  return eig_.apply([s](double lambda) { return std::polar(1.0, -s * lambda); });
}

DensityMatrix SpectralPropagator::conjugate(const DensityMatrix& rho, double s) const {
  if (s == 0.0) return rho;
  return DensityMatrix(conjugate_by(unitary(s), rho.matrix()), DensityMatrix::Unchecked{});
}

}  // namespace qnd
