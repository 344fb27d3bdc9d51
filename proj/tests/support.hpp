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

#include <cmath>
#include <vector>

#include "qndsynth/linalg.hpp"
#include "qndsynth/quantum.hpp"
#include "qndsynth/rng.hpp"
#include "qndsynth/synthesis.hpp"

namespace qnd::testing {

inline const std::vector<double> kReferenceSigma = {51.7022, 82.0324, 10.0114, 40.2333,
                                                24.6756, 19.2339, 28.6260, 44.5561};
constexpr std::size_t kReferenceNStar = 2;

inline DiagonalObservable reference_p() { return DiagonalObservable(kReferenceSigma, kReferenceNStar); }

inline ComplexMatrix random_complex(std::size_t n, RandomStream& rng) {
  ComplexMatrix m(n);
  for (auto& x : m.entries()) x = cplx(rng.normal(), rng.normal());
  return m;
}

inline HermitianOperator random_hermitian(std::size_t n, RandomStream& rng, bool zero_diagonal = false) {
  ComplexMatrix a = random_complex(n, rng);
  ComplexMatrix h = hermitian_part(a);
  if (zero_diagonal)
    for (std::size_t i = 0; i < n; ++i) h(i, i) = 0.0;
  return HermitianOperator(h);
}

inline std::vector<cplx> random_amplitudes(std::size_t n, RandomStream& rng) {
  std::vector<cplx> psi(n);
  double norm = 0.0;
  for (auto& z : psi) {
    z = cplx(rng.normal(), rng.normal());
    norm += std::norm(z);
  }
  for (auto& z : psi) z /= std::sqrt(norm);
  return psi;
}

/// Random mixed state: a convex mixture of `rank` random pure states.
inline DensityMatrix random_density(std::size_t n, RandomStream& rng, std::size_t rank = 3) {
  ComplexMatrix m(n);
  double total = 0.0;
  std::vector<double> w(rank);
  for (auto& x : w) {
    x = rng.uniform() + 0.05;
    total += x;
  }
  for (std::size_t r = 0; r < rank; ++r) {
    const auto psi = random_amplitudes(n, rng);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) += (w[r] / total) * psi[i] * std::conj(psi[j]);
  }
  return DensityMatrix::from(m);
}

inline std::vector<double> random_edge_weights(std::size_t n, RandomStream& rng) {
  std::vector<double> w(n * (n - 1) / 2);
  for (auto& x : w) x = rng.uniform() < 0.2 ? 0.0 : 2.0 * rng.uniform();
  return w;
}

}  // namespace qnd::testing
