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
#include <string>

#include "qndsynth/measurement.hpp"
#include "qndsynth/quantum.hpp"
#include "qndsynth/rng.hpp"

namespace qnd {

enum class ControllerKind { kLinear, kExactMin, kQuadratic };
enum class TieBreak { kPositive, kRandomSign };

const char* to_string(ControllerKind k);
const char* to_string(TieBreak t);
ControllerKind controller_kind_from_string(const std::string& s);
TieBreak tie_break_from_string(const std::string& s);

struct ControllerConfig {
  ControllerKind kind = ControllerKind::kQuadratic;
  double kappa = 0.05;
  double u_bar = 0.1;
  double epsilon = 0.0;
  TieBreak tie_break = TieBreak::kPositive;

  /// Throws InvalidArgument on a non-positive bound for the configured kind
  /// or a negative epsilon.
  void validate() const;
};

struct ControlDecision {
  double u = 0.0;
  double linear_coeff = 0.0;
  double quadratic_coeff = 0.0;
  double predicted_dv = 0.0;
};

/// Tr(P rho).
double lyapunov_v(const DiagonalObservable& p, const DensityMatrix& rho);

/// Tr(P rho) - (eps/2) sum_n rho_nn^2.
double lyapunov_v_eps(const DiagonalObservable& p, const DensityMatrix& rho, double epsilon);

/// -i Tr([P, H1] rho): derivative of Tr(P e^{-iH1 u} rho e^{iH1 u}) at u = 0.
double lyapunov_slope(const DiagonalObservable& p, const HermitianOperator& h1, const DensityMatrix& rho);

/// u = i kappa Tr([P, H1] rho).
ControlDecision linear_feedback(const DiagonalObservable& p, const HermitianOperator& h1,
                                const DensityMatrix& rho, double kappa);

/// Exact E[V_eps(e^{-iH1u} M_mu(rho) e^{iH1u})] as a function of u, with the
/// eigendecomposition of H1 computed once.
class ExpectedLyapunov {
 public:
  ExpectedLyapunov(const DiagonalObservable& p, const HermitianOperator& h1, const QndMeasurement& meas,
                   const DensityMatrix& rho, double epsilon);

  double operator()(double u) const;
  double at_zero_control() const { return (*this)(0.0); }

 private:
  std::vector<double> sigma_;
  SpectralPropagator prop_;
  std::vector<double> weights_;
  std::vector<DensityMatrix> branches_;
  double epsilon_;
};

double expected_v_after(const DiagonalObservable& p, const HermitianOperator& h1, const QndMeasurement& meas,
                        const DensityMatrix& rho, double u, double epsilon);

/// Grid search over 129 points of [-u_bar, u_bar] and golden-section
/// refinement to width 1e-8. rng is consulted only for random-sign ties.
ControlDecision exact_min_feedback(const DiagonalObservable& p, const HermitianOperator& h1,
                                   const QndMeasurement& meas, const DensityMatrix& rho,
                                   const ControllerConfig& cfg, RandomStream* rng = nullptr);

/// Minimizes a u^2 / 2 + b u on [-u_bar, u_bar] with
/// a = Tr([[H1,P],H1] rho) - (eps/4) sum_i (<i|[H1,rho]|i>)^2 and b from
/// lyapunov_slope.
ControlDecision quadratic_feedback(const DiagonalObservable& p, const HermitianOperator& h1,
                                   const DensityMatrix& rho, const ControllerConfig& cfg,
                                   RandomStream* rng = nullptr);

/// Central second difference of expected_v_after at |n><n| with eps = 0.
double curvature_at_eigenstate(const DiagonalObservable& p, const HermitianOperator& h1,
                               const QndMeasurement& meas, std::size_t n, double step = 1e-3);

/// Dispatch on cfg.kind. The linear law needs no measurement; meas may be
/// null for it and for the quadratic law.
ControlDecision decide(const DiagonalObservable& p, const HermitianOperator& h1, const QndMeasurement* meas,
                       const DensityMatrix& rho, const ControllerConfig& cfg, RandomStream* rng = nullptr);

}  // namespace qnd
