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

#include "qndsynth/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qnd {

double ConeViolation::worst() const {
  return std::max({symmetry, max_eigenvalue, row_sum, diagonal, off_diagonal});
}

std::string ConeViolation::describe() const {
  std::ostringstream os;
  os << "symmetry " << symmetry << ", max eigenvalue " << max_eigenvalue << ", row sum " << row_sum
     << ", diagonal " << diagonal << ", off-diagonal " << off_diagonal;
  return os.str();
}

ConeViolation cone_violation(const RealMatrix& r) {
  ConeViolation v;
  const std::size_t n = r.dim();
  v.symmetry = symmetry_defect(r);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += r(i, j);
      if (i == j) {
        v.diagonal = std::max(v.diagonal, r(i, i));
      } else {
        v.off_diagonal = std::max(v.off_diagonal, -r(i, j));
      }
    }
    v.row_sum = std::max(v.row_sum, std::abs(row));
  }
  RealMatrix sym(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (r(i, j) + r(j, i));
  v.max_eigenvalue = std::max(0.0, eigh(sym).values.back());
  return v;
}

ConnectivityMatrix::ConnectivityMatrix(RealMatrix r, double tol) : r_(std::move(r)) {
  const auto v = cone_violation(r_);
  if (!v.within(tol)) throw InvariantViolation("matrix is not in the connectivity cone: " + v.describe());
}

ConnectivityMatrix ConnectivityMatrix::from_edge_weights(std::size_t n, std::span<const double> weights) {
  if (weights.size() != n * (n - 1) / 2) throw InvalidArgument("edge weight count does not match dimension");
  RealMatrix r(n);
  std::size_t e = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++e) {
      const double w = weights[e];
      if (w < 0.0) throw InvalidArgument("edge weights must be non-negative");
      r(i, j) = w;
      r(j, i) = w;
      r(i, i) -= w;
      r(j, j) -= w;
    }
  }
  return ConnectivityMatrix(std::move(r));
}

std::vector<double> ConnectivityMatrix::apply(std::span<const double> sigma) const {
  if (sigma.size() != dim()) throw DimensionMismatch("ConnectivityMatrix::apply", dim(), sigma.size());
  std::vector<double> out(dim(), 0.0);
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) out[i] += r_(i, j) * sigma[j];
  return out;
}

double ConnectivityMatrix::l1_norm() const {
  double acc = 0.0;
  for (double x : r_.entries()) acc += std::abs(x);
  return acc;
}

ConnectivityMatrix r_of_hamiltonian(const HermitianOperator& h1) {
  const auto& h = h1.matrix();
  const std::size_t n = h.dim();
  const ComplexMatrix h2 = h * h;
  RealMatrix r(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      r(i, j) = (i == j) ? 2.0 * (std::norm(h(i, i)) - h2(i, i).real()) : 2.0 * std::norm(h(i, j));
    }
  }
  return ConnectivityMatrix(std::move(r));
}

const char* to_string(PhasePolicy p) {
  switch (p) {
    case PhasePolicy::kPositive: return "positive";
    case PhasePolicy::kAlternating: return "alternating";
    case PhasePolicy::kImaginaryOffDiagonal: return "imaginary-off-diagonal";
  }
  return "?";
}

PhasePolicy phase_policy_from_string(const std::string& s) {
  if (s == "positive") return PhasePolicy::kPositive;
  if (s == "alternating") return PhasePolicy::kAlternating;
  if (s == "imaginary-off-diagonal" || s == "imaginary") return PhasePolicy::kImaginaryOffDiagonal;
  throw InvalidArgument("unknown phase policy '" + s + "'");
}

HermitianOperator hamiltonian_of_r(const ConnectivityMatrix& r, PhasePolicy policy) {
  const std::size_t n = r.dim();
  ComplexMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double rij = 0.5 * (r(i, j) + r(j, i));
      if (rij < -kTol.cone) {
        throw InvalidArgument("hamiltonian_of_r: negative off-diagonal entry R(" + std::to_string(i) + "," +
                              std::to_string(j) + ") = " + std::to_string(rij));
      }
      // sqrt(R/2), not (1/2) sqrt(R): the only choice that inverts r_of_hamiltonian.
      const double mag = std::sqrt(std::max(rij, 0.0) / 2.0);
      cplx value;
      switch (policy) {
        case PhasePolicy::kPositive: value = mag; break;
        case PhasePolicy::kAlternating: value = ((i + j) % 2 == 0) ? mag : -mag; break;
        case PhasePolicy::kImaginaryOffDiagonal: value = cplx(0.0, mag); break;
      }
      h(i, j) = value;
      h(j, i) = std::conj(value);
    }
  }
  return HermitianOperator(std::move(h), OperatorRole::kControl);
}

std::string LambdaCheck::describe(std::size_t n_star) const {
  std::ostringstream os;
  os << (ok ? "lambda_tilde satisfies the sign condition" : "lambda_tilde violates the sign condition");
  for (std::size_t n = 0; n < entry_ok.size(); ++n) {
    if (!entry_ok[n]) os << "; entry " << n << (n == n_star ? " must be positive" : " must be negative");
  }
  if (!sum_ok) os << "; entries sum to " << sum << " instead of 0";
  return os.str();
}

LambdaCheck verify_lambda(std::span<const double> lambda_tilde, std::size_t n_star, double margin) {
  if (n_star >= lambda_tilde.size()) throw InvalidArgument("verify_lambda: n_star out of range");
  if (margin < 0.0) throw InvalidArgument("verify_lambda: margin must be non-negative");
  LambdaCheck c;
  c.entry_ok.resize(lambda_tilde.size());
  bool all = true;
  for (std::size_t n = 0; n < lambda_tilde.size(); ++n) {
    const double x = lambda_tilde[n];
    c.entry_ok[n] = (n == n_star) ? (x > 0.0 && x >= margin) : (x < 0.0 && x <= -margin);
    all = all && c.entry_ok[n];
  }
  c.sum = std::accumulate(lambda_tilde.begin(), lambda_tilde.end(), 0.0);
  c.sum_ok = std::abs(c.sum) <= kTol.lambda_sum;
  c.ok = all && c.sum_ok;
  return c;
}

namespace {

constexpr int kDykstraMaxCycles = 5000;
constexpr double kDykstraChange = 1e-10;
// Largest residual violation the final snap onto the cone may absorb.
constexpr double kDykstraSnapLimit = 1e-6;

RealMatrix symmetrized(const RealMatrix& m) {
  RealMatrix s(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

RealMatrix project_nsd(const RealMatrix& m) {
  const auto e = eigh(m);
  const std::size_t n = m.dim();
  RealMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = std::min(e.values[k], 0.0);
    if (lam == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += lam * e.vectors(i, k) * e.vectors(j, k);
  }
  return symmetrized(out);
}

// Orthogonal projection onto {X symmetric, X 1 = 0}: X - (u 1^T + 1 u^T).
RealMatrix project_zero_row_sum(const RealMatrix& m) {
  const std::size_t n = m.dim();
  const double nn = static_cast<double>(n);
  RealMatrix x = symmetrized(m);
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s[i] += x(i, j);
  const double total = std::accumulate(s.begin(), s.end(), 0.0);
  const double u_sum = total / (2.0 * nn);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = (s[i] - u_sum) / nn;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) x(i, j) -= u[i] + u[j];
  return x;
}

RealMatrix project_sign(const RealMatrix& m) {
  RealMatrix x = m;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) x(i, j) = (i == j) ? std::min(m(i, j), 0.0) : std::max(m(i, j), 0.0);
  return x;
}

RealMatrix project_trace(const RealMatrix& m, double beta) {
  const double tr = m.trace();
  if (tr <= beta) return m;
  RealMatrix x = m;
  const double shift = (tr - beta) / static_cast<double>(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) x(i, i) -= shift;
  return x;
}

// Nearby exact cone member: symmetric part with clipped off-diagonals and
// diagonal set to minus the off-diagonal row sum, scaled onto the trace bound.
RealMatrix snap_to_cone(const RealMatrix& m, std::optional<double> trace_bound) {
  const std::size_t n = m.dim();
  RealMatrix x(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) x(i, j) = x(j, i) = std::max(0.5 * (m(i, j) + m(j, i)), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += x(i, j);
    x(i, i) = -s;
  }
  if (trace_bound && x.trace() > *trace_bound && x.trace() < 0.0) x *= *trace_bound / x.trace();
  return x;
}

double trace_excess(const RealMatrix& x, std::optional<double> trace_bound) {
  return trace_bound ? std::max(0.0, x.trace() - *trace_bound) : 0.0;
}

}  // namespace

ConeProjection project_cone_detailed(const RealMatrix& m, std::optional<double> trace_bound) {
  if (symmetry_defect(m) > kTol.hermitian * std::max(1.0, frobenius_norm(m))) {
    throw InvalidArgument("project_cone: input is not symmetric");
  }
  const std::size_t n = m.dim();
  const std::size_t sets = trace_bound ? 4 : 3;
  RealMatrix x = symmetrized(m);
  std::vector<RealMatrix> increments(sets, RealMatrix(n));

  int cycle = 0;
  for (; cycle < kDykstraMaxCycles; ++cycle) {
    const RealMatrix before = x;
    for (std::size_t k = 0; k < sets; ++k) {
      RealMatrix shifted = x + increments[k];
      RealMatrix y = [&] {
        switch (k) {
          case 0: return project_nsd(shifted);
          case 1: return project_zero_row_sum(shifted);
          case 2: return project_sign(shifted);
          default: return project_trace(shifted, *trace_bound);
        }
      }();
      increments[k] = shifted - y;
      x = std::move(y);
    }
    // A stalled iterate can repeat while the increments still move, so the
    // change test only counts once the iterate is close to every set.
    if (frobenius_norm(x - before) <= kDykstraChange && cone_violation(x).within(kDykstraSnapLimit) &&
        trace_excess(x, trace_bound) <= kDykstraSnapLimit) {
      ++cycle;
      break;
    }
  }

  const auto before_snap = cone_violation(x);
  const double excess_before_snap = trace_excess(x, trace_bound);
  RealMatrix snapped = snap_to_cone(x, trace_bound);
  const auto v = cone_violation(snapped);
  const double excess = trace_excess(snapped, trace_bound);
  if (!before_snap.within(kDykstraSnapLimit) || excess_before_snap > kDykstraSnapLimit || !v.within(kTol.cone) ||
      excess > kTol.cone) {
    std::ostringstream os;
    os << "project_cone: Dykstra stopped with violations " << before_snap.describe();
    if (trace_bound) os << ", trace excess " << excess_before_snap;
    throw ConvergenceError(os.str(), cycle);
  }
  return {std::move(snapped), cycle};
}

ConnectivityMatrix project_cone(const RealMatrix& m, std::optional<double> trace_bound) {
  return ConnectivityMatrix(project_cone_detailed(m, trace_bound).r);
}

SynthesisProblem SynthesisProblem::sparse(DiagonalObservable p) {
  SynthesisProblem s{.observable = std::move(p)};
  s.alpha1 = 1.0;
  s.alpha2 = 1.0;
  return s;
}

SynthesisProblem SynthesisProblem::dense(DiagonalObservable p) { return SynthesisProblem{.observable = std::move(p)}; }

void SynthesisProblem::validate() const {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw InvalidArgument("gamma1 and gamma2 must be strictly positive");
  if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0)) throw InvalidArgument("alpha1 and alpha2 must be non-negative");
  if (alpha1 == 0.0 && alpha2 == 0.0) throw InvalidArgument("alpha1 and alpha2 cannot both be zero");
  if (trace_bound && !(*trace_bound < 0.0)) throw InvalidArgument("trace bound must be negative");
}

SynthesisArtifacts synthesis_pipeline(const DiagonalObservable& p, const SynthesisProblem& cfg,
                                      PhasePolicy policy) {
  if (cfg.observable.sigma() != p.sigma() || cfg.observable.n_star() != p.n_star()) {
    throw InvalidArgument("synthesis_pipeline: problem observable differs from P");
  }
  std::vector<std::string> warnings;
  if (p.minimum_is_degenerate()) {
    warnings.push_back("minimum of P is not unique; using the supplied n_star = " + std::to_string(p.n_star()));
  }

  SynthesisResult result = solve_synthesis(cfg);
  if (!result.feasible) {
    std::string msg = result.check.describe(p.n_star()) +
                      ". Adjust the hyper-parameters (gamma1, gamma2, alpha1, alpha2) and solve again.";
    throw InfeasibleLambda(std::move(result), msg);
  }
  HermitianOperator h1 = hamiltonian_of_r(result.r, policy);
  AssumptionReport report = assumption_report(p, std::nullopt, h1, std::nullopt);
  ConnectivityMatrix r = result.r;
  return {std::move(h1), std::move(r), std::move(result), std::move(report), std::move(warnings)};
}

}  // namespace qnd
