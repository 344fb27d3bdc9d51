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

#include "qndsynth/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qndsynth/error.hpp"

namespace qnd {

const char* to_string(AssumptionId id) {
  switch (id) {
    case AssumptionId::kDiagonalBasis: return "diagonal-basis";
    case AssumptionId::kNonDegenerateSpectrum: return "non-degenerate-spectrum";
    case AssumptionId::kStrongRegularity: return "strong-regularity";
    case AssumptionId::kFullConnectivity: return "full-connectivity";
    case AssumptionId::kDistinguishability: return "distinguishability";
  }
  return "?";
}

const AssumptionCheck& AssumptionReport::get(AssumptionId id) const {
  for (const auto& c : checks)
    if (c.id == id) return c;
  throw InvalidArgument(std::string("assumption not in report: ") + to_string(id));
}

bool AssumptionReport::passed(AssumptionId id) const {
  const auto& c = get(id);
  return c.evaluated && c.passed;
}

bool AssumptionReport::all_passed(const std::vector<AssumptionId>& required) const {
  return std::all_of(required.begin(), required.end(), [&](AssumptionId id) { return passed(id); });
}

std::string AssumptionReport::describe() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << to_string(c.id) << ": " << (!c.evaluated ? "not evaluated" : c.passed ? "pass" : "FAIL");
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    constexpr std::size_t kShown = 8;
    for (std::size_t k = 0; k < std::min(kShown, c.witnesses.size()); ++k) {
      os << (k == 0 ? " witnesses:" : "") << " (";
      for (std::size_t q = 0; q < c.witnesses[k].size(); ++q) os << (q ? "," : "") << c.witnesses[k][q];
      os << ")";
    }
    if (c.witnesses.size() > kShown) os << " ... " << c.witnesses.size() << " total";
    os << "\n";
  }
  return os.str();
}

namespace {

AssumptionCheck check_diagonal(const std::optional<HermitianOperator>& h0) {
  AssumptionCheck c;
  c.id = AssumptionId::kDiagonalBasis;
  c.evaluated = true;
  c.passed = true;
  if (!h0) {
    c.detail = "P diagonal by construction; no H0 supplied";
    return c;
  }
  const auto& m = h0->matrix();
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i + 1; j < m.dim(); ++j)
      if (std::abs(m(i, j)) > kTol.hermitian) c.witnesses.push_back({i, j});
  c.passed = c.witnesses.empty();
  c.detail = c.passed ? "P and H0 diagonal" : "H0 has off-diagonal entries";
  return c;
}

AssumptionCheck check_spectrum(const DiagonalObservable& p) {
  AssumptionCheck c;
  c.id = AssumptionId::kNonDegenerateSpectrum;
  c.evaluated = true;
  const auto& s = p.sigma();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (std::abs(s[i] - s[j]) <= kTol.gap) c.witnesses.push_back({i, j});
  c.passed = c.witnesses.empty();
  std::ostringstream os;
  os << "min gap " << p.min_gap();
  c.detail = os.str();
  return c;
}

AssumptionCheck check_regularity(const std::optional<HermitianOperator>& h0) {
  AssumptionCheck c;
  c.id = AssumptionId::kStrongRegularity;
  if (!h0) {
    c.detail = "no H0 supplied";
    return c;
  }
  c.evaluated = true;
  const auto h = h0->matrix().diag();
  const std::size_t n = h.size();
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  struct Gap {
    std::size_t i, j;
    double value;
  };
  std::vector<Gap> gaps;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) gaps.push_back({i, j, h[j].real() - h[i].real()});
  for (std::size_t a = 0; a < gaps.size(); ++a) {
    for (std::size_t b = a + 1; b < gaps.size(); ++b) {
      const double d = std::abs(std::remainder(gaps[a].value - gaps[b].value, kTwoPi));
      if (d <= kTol.gap) c.witnesses.push_back({gaps[a].i, gaps[a].j, gaps[b].i, gaps[b].j});
    }
  }
  c.passed = c.witnesses.empty();
  c.detail = c.passed ? "all H0 gaps distinct modulo 2 pi" : "H0 gaps (i,j) and (k,l) coincide modulo 2 pi";
  return c;
}

AssumptionCheck check_connectivity(const std::optional<HermitianOperator>& h1) {
  AssumptionCheck c;
  c.id = AssumptionId::kFullConnectivity;
  if (!h1) {
    c.detail = "no H1 supplied";
    return c;
  }
  c.evaluated = true;
  const auto& m = h1->matrix();
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i + 1; j < m.dim(); ++j)
      if (std::abs(m(i, j)) <= kTol.connectivity) c.witnesses.push_back({i, j});
  c.passed = c.witnesses.empty();
  c.detail = c.passed ? "every off-diagonal H1 entry nonzero"
                      : std::to_string(c.witnesses.size()) + " zero off-diagonal H1 entries";
  return c;
}

AssumptionCheck check_distinguishable(const std::optional<QndMeasurement>& meas) {
  AssumptionCheck c;
  c.id = AssumptionId::kDistinguishability;
  if (!meas) {
    c.detail = "no measurement supplied";
    return c;
  }
  c.evaluated = true;
  for (const auto& [a, b] : check_distinguishability(*meas)) c.witnesses.push_back({a, b});
  c.passed = c.witnesses.empty();
  c.detail = c.passed ? "every pair of levels distinguishable"
                      : std::to_string(c.witnesses.size()) + " indistinguishable pairs";
  return c;
}

}  // namespace

AssumptionReport assumption_report(const DiagonalObservable& p, const std::optional<HermitianOperator>& h0,
                                   const std::optional<HermitianOperator>& h1,
                                   const std::optional<QndMeasurement>& meas) {
  auto check_dim = [&](std::size_t d, const char* what) {
    if (d != p.dim()) throw DimensionMismatch(what, p.dim(), d);
  };
  if (h0) check_dim(h0->dim(), "assumption_report: H0");
  if (h1) check_dim(h1->dim(), "assumption_report: H1");
  if (meas) check_dim(meas->dim(), "assumption_report: measurement");
  AssumptionReport r;
  r.checks.push_back(check_diagonal(h0));
  r.checks.push_back(check_spectrum(p));
  r.checks.push_back(check_regularity(h0));
  r.checks.push_back(check_connectivity(h1));
  r.checks.push_back(check_distinguishable(meas));
  return r;
}

std::vector<AssumptionId> required_for_deterministic() {
  return {AssumptionId::kDiagonalBasis, AssumptionId::kNonDegenerateSpectrum, AssumptionId::kStrongRegularity,
          AssumptionId::kFullConnectivity};
}

std::vector<AssumptionId> required_for_stochastic() {
  return {AssumptionId::kNonDegenerateSpectrum, AssumptionId::kDistinguishability};
}

}  // namespace qnd
