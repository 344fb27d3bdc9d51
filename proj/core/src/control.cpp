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

#include "qndsynth/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qndsynth/error.hpp"

namespace qnd {

const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::kLinear: return "linear";
    case ControllerKind::kExactMin: return "exact-min";
    case ControllerKind::kQuadratic: return "quadratic";
  }
  return "?";
}

const char* to_string(TieBreak t) { return t == TieBreak::kPositive ? "positive" : "random-sign"; }

ControllerKind controller_kind_from_string(const std::string& s) {
  if (s == "linear") return ControllerKind::kLinear;
  if (s == "exact-min") return ControllerKind::kExactMin;
  if (s == "quadratic") return ControllerKind::kQuadratic;
  throw InvalidArgument("unknown controller kind '" + s + "'");
}

TieBreak tie_break_from_string(const std::string& s) {
  if (s == "positive") return TieBreak::kPositive;
  if (s == "random-sign") return TieBreak::kRandomSign;
  throw InvalidArgument("unknown tie break '" + s + "'");
}

void ControllerConfig::validate() const {
  if (kind == ControllerKind::kLinear && !(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (kind != ControllerKind::kLinear && !(u_bar > 0.0)) throw InvalidArgument("u_bar must be positive");
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
}

namespace {

void check_dims(const DiagonalObservable& p, const HermitianOperator& h1, const DensityMatrix& rho) {
  if (h1.dim() != p.dim()) throw DimensionMismatch("control: H1", p.dim(), h1.dim());
  if (rho.dim() != p.dim()) throw DimensionMismatch("control: rho", p.dim(), rho.dim());
}

double population_v(const std::vector<double>& sigma, const ComplexMatrix& m, double epsilon) {
  double v = 0.0, sq = 0.0;
  for (std::size_t n = 0; n < sigma.size(); ++n) {
    const double pop = m(n, n).real();
    v += sigma[n] * pop;
    sq += pop * pop;
  }
  return v - 0.5 * epsilon * sq;
}

// Tr([P, H1] rho) with P diagonal: sum_{n,m} (p_n - p_m) H1_nm rho_mn.
cplx commutator_trace(const DiagonalObservable& p, const HermitianOperator& h1, const DensityMatrix& rho) {
  const auto& s = p.sigma();
  const auto& h = h1.matrix();
  const auto& r = rho.matrix();
  cplx acc = 0.0;
  for (std::size_t n = 0; n < s.size(); ++n)
    for (std::size_t m = 0; m < s.size(); ++m)
      if (n != m) acc += (s[n] - s[m]) * h(n, m) * r(m, n);
  return acc;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-14 * std::max({1.0, std::abs(a), std::abs(b)}); }

bool prefer_positive(TieBreak t, RandomStream* rng) {
  if (t == TieBreak::kRandomSign) {
    if (rng == nullptr) throw InvalidArgument("random-sign tie break needs a random stream");
    return rng->coin();
  }
  return true;
}

}  // namespace

double lyapunov_v(const DiagonalObservable& p, const DensityMatrix& rho) {
  if (rho.dim() != p.dim()) throw DimensionMismatch("lyapunov_v", p.dim(), rho.dim());
  return population_v(p.sigma(), rho.matrix(), 0.0);
}

double lyapunov_v_eps(const DiagonalObservable& p, const DensityMatrix& rho, double epsilon) {
  if (rho.dim() != p.dim()) throw DimensionMismatch("lyapunov_v_eps", p.dim(), rho.dim());
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
  return population_v(p.sigma(), rho.matrix(), epsilon);
}

double lyapunov_slope(const DiagonalObservable& p, const HermitianOperator& h1, const DensityMatrix& rho) {
  check_dims(p, h1, rho);
  const cplx b = cplx(0.0, -1.0) * commutator_trace(p, h1, rho);
  if (std::abs(b.imag()) > kTol.control_imaginary * std::max(1.0, std::abs(b.real()))) {
    std::ostringstream os;
    os << "slope coefficient has imaginary part " << b.imag();
    throw InvariantViolation(os.str());
  }
  return b.real();
}

ControlDecision linear_feedback(const DiagonalObservable& p, const HermitianOperator& h1,
                                const DensityMatrix& rho, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  const double b = lyapunov_slope(p, h1, rho);
  ControlDecision d;
  d.u = -kappa * b;  // i kappa Tr([P,H1] rho)
  d.linear_coeff = b;
  d.predicted_dv = b * d.u;
  return d;
}

ExpectedLyapunov::ExpectedLyapunov(const DiagonalObservable& p, const HermitianOperator& h1,
                                   const QndMeasurement& meas, const DensityMatrix& rho, double epsilon)
    : sigma_(p.sigma()), prop_(h1), epsilon_(epsilon) {
  check_dims(p, h1, rho);
  if (meas.dim() != p.dim()) throw DimensionMismatch("ExpectedLyapunov: measurement", p.dim(), meas.dim());
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
  const auto probs = outcome_probabilities(meas, rho);
  for (std::size_t mu = 0; mu < probs.size(); ++mu) {
    if (probs[mu] <= kTol.probability_floor) continue;
    weights_.push_back(probs[mu]);
    branches_.push_back(apply_outcome(meas, mu, rho));
  }
}

double ExpectedLyapunov::operator()(double u) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    const DensityMatrix next = prop_.conjugate(branches_[k], u);
    acc += weights_[k] * population_v(sigma_, next.matrix(), epsilon_);
  }
  return acc;
}

double expected_v_after(const DiagonalObservable& p, const HermitianOperator& h1, const QndMeasurement& meas,
                        const DensityMatrix& rho, double u, double epsilon) {
  return ExpectedLyapunov(p, h1, meas, rho, epsilon)(u);
}

ControlDecision exact_min_feedback(const DiagonalObservable& p, const HermitianOperator& h1,
                                   const QndMeasurement& meas, const DensityMatrix& rho,
                                   const ControllerConfig& cfg, RandomStream* rng) {
  cfg.validate();
  const ExpectedLyapunov f(p, h1, meas, rho, cfg.epsilon);
  const double ub = cfg.u_bar;
  constexpr int kHalf = 64;

  double best_u = 0.0;
  double best_f = f(0.0);
  const double f0 = best_f;
  bool sign_pending = false;  // a tie between +u and -u awaits the tie break
  for (int i = 0; i <= 2 * kHalf; ++i) {
    if (i == kHalf) continue;
    const double u = ub * static_cast<double>(i - kHalf) / kHalf;
    const double v = f(u);
    if (near(v, best_f)) {
      if (std::abs(u) < std::abs(best_u)) {
        best_u = u;
        best_f = v;
        sign_pending = false;
      } else if (std::abs(u) == std::abs(best_u) && u != best_u) {
        sign_pending = true;
      }
    } else if (v < best_f) {
      best_u = u;
      best_f = v;
      sign_pending = false;
    }
  }
  if (sign_pending) {
    const double mag = std::abs(best_u);
    best_u = prefer_positive(cfg.tie_break, rng) ? mag : -mag;
    best_f = f(best_u);
  }

  // Golden-section refinement within one grid cell on either side.
  const double cell = ub / kHalf;
  double lo = std::max(-ub, best_u - cell);
  double hi = std::min(ub, best_u + cell);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > 1e-8) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double refined_u = 0.5 * (lo + hi);
  const double refined_f = f(refined_u);
  if (refined_f < best_f && !near(refined_f, best_f)) {
    best_u = refined_u;
    best_f = refined_f;
  }

  ControlDecision d;
  d.u = best_u;
  d.predicted_dv = best_f - lyapunov_v_eps(p, rho, cfg.epsilon);
  // Diagnostics only: the parabola through f(-cell), f(0), f(cell).
  const double fp = f(cell), fm = f(-cell);
  d.linear_coeff = (fp - fm) / (2.0 * cell);
  d.quadratic_coeff = (fp - 2.0 * f0 + fm) / (cell * cell);
  return d;
}

ControlDecision quadratic_feedback(const DiagonalObservable& p, const HermitianOperator& h1,
                                   const DensityMatrix& rho, const ControllerConfig& cfg, RandomStream* rng) {
  cfg.validate();
  const double b = lyapunov_slope(p, h1, rho);
  const auto& h = h1.matrix();
  const ComplexMatrix pm = p.matrix();
  const ComplexMatrix dbl = commutator(commutator(h, pm), h);
  const cplx a_main = trace_of_product(dbl, rho.matrix());
  cplx a = a_main;
  if (cfg.epsilon > 0.0) {
    const ComplexMatrix c = commutator(h, rho.matrix());
    cplx sq = 0.0;
    for (std::size_t i = 0; i < c.dim(); ++i) sq += c(i, i) * c(i, i);
    a -= 0.25 * cfg.epsilon * sq;
  }
  if (std::abs(a.imag()) > kTol.control_imaginary * std::max(1.0, std::abs(a.real()))) {
    throw InvariantViolation("quadratic coefficient is not real");
  }
  const double ar = a.real();
  const double ub = cfg.u_bar;
  auto q = [&](double u) { return 0.5 * ar * u * u + b * u; };

  double u = 0.0;
  if (std::abs(ar) <= kTol.degenerate_quadratic) {
    u = std::abs(b) <= kTol.degenerate_quadratic ? 0.0 : (b > 0.0 ? -ub : ub);
  } else {
    const double qp = q(ub), qm = q(-ub);
    if (near(qp, qm)) {
      u = prefer_positive(cfg.tie_break, rng) ? ub : -ub;
    } else {
      u = qp < qm ? ub : -ub;
    }
    if (ar > kTol.degenerate_quadratic) {
      const double interior = -b / ar;
      if (std::abs(interior) <= ub && q(interior) <= q(u)) u = interior;
    }
  }
  ControlDecision d;
  d.u = u;
  d.linear_coeff = b;
  d.quadratic_coeff = ar;
  d.predicted_dv = q(u);
  return d;
}

double curvature_at_eigenstate(const DiagonalObservable& p, const HermitianOperator& h1,
                               const QndMeasurement& meas, std::size_t n, double step) {
  if (n >= p.dim()) throw InvalidArgument("curvature_at_eigenstate: index out of range");
  if (!(step > 0.0)) throw InvalidArgument("curvature_at_eigenstate: step must be positive");
  const ExpectedLyapunov f(p, h1, meas, DensityMatrix::basis_state(p.dim(), n), 0.0);
  return (f(step) - 2.0 * f(0.0) + f(-step)) / (step * step);
}

ControlDecision decide(const DiagonalObservable& p, const HermitianOperator& h1, const QndMeasurement* meas,
                       const DensityMatrix& rho, const ControllerConfig& cfg, RandomStream* rng) {
  switch (cfg.kind) {
    case ControllerKind::kLinear: return linear_feedback(p, h1, rho, cfg.kappa);
    case ControllerKind::kQuadratic: return quadratic_feedback(p, h1, rho, cfg, rng);
    case ControllerKind::kExactMin:
      if (meas == nullptr) throw InvalidArgument("exact-min feedback needs a measurement");
      return exact_min_feedback(p, h1, *meas, rho, cfg, rng);
  }
  throw InvalidArgument("unknown controller kind");
}

}  // namespace qnd
