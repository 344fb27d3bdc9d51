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

#include "qndsynth/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qndsynth/error.hpp"
#include "qndsynth/tolerances.hpp"

namespace qnd {

namespace {

double conj_if(double x) { return x; }
cplx conj_if(cplx x) { return std::conj(x); }

}  // namespace

template <typename T>
SquareMatrix<T>::SquareMatrix(std::size_t n) : n_(n), data_(n * n, T{}) {
  if (n < 2) throw InvalidArgument("matrix dimension must be at least 2");
}

template <typename T>
SquareMatrix<T>::SquareMatrix(std::size_t n, std::vector<T> entries)
    : n_(n), data_(std::move(entries)) {
  if (n < 2) throw InvalidArgument("matrix dimension must be at least 2");
  if (data_.size() != n * n) {
    throw InvalidArgument("matrix of dimension " + std::to_string(n) + " needs " +
                          std::to_string(n * n) + " entries, got " +
                          std::to_string(data_.size()));
  }
}

template <typename T>
SquareMatrix<T> SquareMatrix<T>::identity(std::size_t n) {
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
  return m;
}

template <typename T>
SquareMatrix<T> SquareMatrix<T>::diagonal(std::span<const T> d) {
  SquareMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

template <typename T>
SquareMatrix<T> SquareMatrix<T>::adjoint() const {
  SquareMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(j, i) = conj_if((*this)(i, j));
  return out;
}

template <typename T>
T SquareMatrix<T>::trace() const {
  T acc{};
  for (std::size_t i = 0; i < n_; ++i) acc += (*this)(i, i);
  return acc;
}

template <typename T>
std::vector<T> SquareMatrix<T>::diag() const {
  std::vector<T> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = (*this)(i, i);
  return d;
}

template <typename T>
SquareMatrix<T>& SquareMatrix<T>::operator+=(const SquareMatrix& o) {
  if (o.n_ != n_) throw DimensionMismatch("matrix add", n_, o.n_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

template <typename T>
SquareMatrix<T>& SquareMatrix<T>::operator-=(const SquareMatrix& o) {
  if (o.n_ != n_) throw DimensionMismatch("matrix subtract", n_, o.n_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

template <typename T>
SquareMatrix<T>& SquareMatrix<T>::operator*=(T s) {
  for (auto& x : data_) x *= s;
  return *this;
}

template <typename T>
SquareMatrix<T> SquareMatrix<T>::multiply(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.n_ != b.n_) throw DimensionMismatch("matrix multiply", a.n_, b.n_);
  const std::size_t n = a.n_;
  SquareMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const T aik = a(i, k);
      if (aik == T{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

template class SquareMatrix<cplx>;
template class SquareMatrix<double>;

ComplexMatrix to_complex(const RealMatrix& m) {
  ComplexMatrix out(m.dim());
  for (std::size_t k = 0; k < m.entries().size(); ++k) out.entries()[k] = m.entries()[k];
  return out;
}

RealMatrix real_part(const ComplexMatrix& m) {
  RealMatrix out(m.dim());
  for (std::size_t k = 0; k < m.entries().size(); ++k) out.entries()[k] = m.entries()[k].real();
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("max_abs_diff", a.dim(), b.dim());
  double m = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  return m;
}

double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("max_abs_diff", a.dim(), b.dim());
  double m = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k)
    m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  return m;
}

double frobenius_norm(const ComplexMatrix& m) {
  double acc = 0.0;
  for (const auto& x : m.entries()) acc += std::norm(x);
  return std::sqrt(acc);
}

double frobenius_norm(const RealMatrix& m) {
  double acc = 0.0;
  for (double x : m.entries()) acc += x * x;
  return std::sqrt(acc);
}

double hermiticity_defect(const ComplexMatrix& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j)
      d = std::max(d, std::abs(m(i, j) - std::conj(m(j, i))));
  return d;
}

double symmetry_defect(const RealMatrix& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i + 1; j < m.dim(); ++j) d = std::max(d, std::abs(m(i, j) - m(j, i)));
  return d;
}

bool has_non_finite(const ComplexMatrix& m) {
  return std::any_of(m.entries().begin(), m.entries().end(), [](const cplx& x) {
    return !std::isfinite(x.real()) || !std::isfinite(x.imag());
  });
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  ComplexMatrix out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("commutator", a.dim(), b.dim());
  return a * b - b * a;
}

cplx trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("trace_of_product", a.dim(), b.dim());
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t k = 0; k < a.dim(); ++k) acc += a(i, k) * b(k, i);
  return acc;
}

ComplexMatrix HermitianEigen::reconstruct() const {
  return apply([](double x) { return cplx(x, 0.0); });
}

HermitianEigen eigh(const ComplexMatrix& input) {
  const std::size_t n = input.dim();
  if (has_non_finite(input)) throw InvalidArgument("eigh: matrix has NaN or Inf entries");
  const double scale = std::max(1.0, frobenius_norm(input));
  if (hermiticity_defect(input) > kTol.hermitian * scale) {
    throw InvalidArgument("eigh: matrix is not Hermitian");
  }

  ComplexMatrix a = hermitian_part(input);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  ComplexMatrix v = ComplexMatrix::identity(n);

  auto off_norm = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) acc += std::norm(a(i, j));
    return std::sqrt(acc);
  };

  const double threshold = kTol.jacobi_off * scale;
  int sweep = 0;
  for (;; ++sweep) {
    if (off_norm() <= threshold) break;
    if (sweep >= kTol.jacobi_max_sweeps) {
      throw ConvergenceError("eigh: Jacobi did not converge", sweep);
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;

        // Rotate the phase of row/column q so that a(p, q) becomes real.
        const cplx s = std::conj(a(p, q)) / r;
        for (std::size_t k = 0; k < n; ++k) {
          if (k != q) {
            a(k, q) *= s;
            a(q, k) = std::conj(a(k, q));
          }
          v(k, q) *= s;
        }
        a(p, q) = r;
        a(q, p) = r;

        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
          a(p, k) = std::conj(a(k, p));
          a(q, k) = std::conj(a(k, q));
        }
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

  HermitianEigen out{std::vector<double>(n), ComplexMatrix(n), sweep};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

SymmetricEigen eigh(const RealMatrix& a) {
  if (symmetry_defect(a) > kTol.hermitian * std::max(1.0, frobenius_norm(a))) {
    throw InvalidArgument("eigh: matrix is not symmetric");
  }
  // Real input keeps every phase factor at +-1, so the vectors stay real.
  auto e = eigh(to_complex(a));
  return {std::move(e.values), real_part(e.vectors), e.sweeps};
}

std::vector<double> spectrum(const ComplexMatrix& a) {
  auto e = eigh(a);
  const double residual = max_abs_diff(a, e.reconstruct());
  if (residual > kTol.reconstruction * std::max(1.0, frobenius_norm(a))) {
    throw Error("spectrum: reconstruction residual " + std::to_string(residual) +
                " exceeds tolerance");
  }
  return e.values;
}

std::vector<double> spectrum(const RealMatrix& a) { return spectrum(to_complex(a)); }

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double s) {
  const auto e = eigh(h);
  return e.apply([s](double lambda) { return std::polar(1.0, -s * lambda); });
}

double unitarity_defect(const ComplexMatrix& u) {
  return max_abs_diff(u.adjoint() * u, ComplexMatrix::identity(u.dim()));
}

}  // namespace qnd
