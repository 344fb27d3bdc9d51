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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qnd {

using cplx = std::complex<double>;

/// Dense square matrix, row-major. Dimension is at least 2.
template <typename T>
class SquareMatrix {
 public:
  using value_type = T;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n);
  SquareMatrix(std::size_t n, std::vector<T> entries);

  static SquareMatrix zeros(std::size_t n) { return SquareMatrix(n); }
  static SquareMatrix identity(std::size_t n);
  static SquareMatrix diagonal(std::span<const T> d);

  std::size_t dim() const noexcept { return n_; }
  bool empty() const noexcept { return n_ == 0; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<T> entries() noexcept { return data_; }
  std::span<const T> entries() const noexcept { return data_; }

  /// Conjugate transpose (plain transpose for real matrices).
  SquareMatrix adjoint() const;
  T trace() const;
  std::vector<T> diag() const;

  SquareMatrix& operator+=(const SquareMatrix& o);
  SquareMatrix& operator-=(const SquareMatrix& o);
  SquareMatrix& operator*=(T s);

  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
  friend SquareMatrix operator*(SquareMatrix a, T s) { return a *= s; }
  friend SquareMatrix operator*(T s, SquareMatrix a) { return a *= s; }
  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    return multiply(a, b);
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  static SquareMatrix multiply(const SquareMatrix& a, const SquareMatrix& b);

  std::size_t n_ = 0;
  std::vector<T> data_;
};

using ComplexMatrix = SquareMatrix<cplx>;
using RealMatrix = SquareMatrix<double>;

extern template class SquareMatrix<cplx>;
extern template class SquareMatrix<double>;

ComplexMatrix to_complex(const RealMatrix& m);
RealMatrix real_part(const ComplexMatrix& m);

/// max_ij |a_ij - b_ij|.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double max_abs_diff(const RealMatrix& a, const RealMatrix& b);
double frobenius_norm(const ComplexMatrix& m);
double frobenius_norm(const RealMatrix& m);

/// max_ij |m_ij - conj(m_ji)|.
double hermiticity_defect(const ComplexMatrix& m);
double symmetry_defect(const RealMatrix& m);
bool has_non_finite(const ComplexMatrix& m);

/// (m + m^dagger) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// AB - BA.
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Tr(AB) without forming the product.
cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending; column k of
/// `vectors` holds the k-th eigenvector.
struct HermitianEigen {
  std::vector<double> values;
  ComplexMatrix vectors;
  int sweeps = 0;

  /// Q diag(f(values)) Q^dagger.
  template <typename F>
  ComplexMatrix apply(F&& f) const;
  ComplexMatrix reconstruct() const;
};

/// Cyclic complex Jacobi. Throws InvalidArgument on non-Hermitian input and
/// ConvergenceError when the sweep budget is exhausted.
HermitianEigen eigh(const ComplexMatrix& a);

struct SymmetricEigen {
  std::vector<double> values;
  RealMatrix vectors;
  int sweeps = 0;
};

SymmetricEigen eigh(const RealMatrix& a);

/// Ascending eigenvalues of a Hermitian matrix. The decomposition is checked
/// against the reconstruction tolerance.
std::vector<double> spectrum(const ComplexMatrix& a);
std::vector<double> spectrum(const RealMatrix& a);

/// exp(-i s h) for Hermitian h, via eigendecomposition.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, double s);

/// max_ij |(U^dagger U - I)_ij|.
double unitarity_defect(const ComplexMatrix& u);

template <typename F>
ComplexMatrix HermitianEigen::apply(F&& f) const {
  const std::size_t n = vectors.dim();
  std::vector<cplx> fv(n);
  for (std::size_t k = 0; k < n; ++k) fv[k] = f(values[k]);
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        acc += vectors(i, k) * fv[k] * std::conj(vectors(j, k));
      }
      out(i, j) = acc;
    }
  }
  return out;
}

}  // namespace qnd
