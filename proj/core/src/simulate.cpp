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

#include "qndsynth/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qndsynth/error.hpp"

namespace qnd {

const char* to_string(LoopMode m) {
  switch (m) {
    case LoopMode::kDeterministic: return "deterministic";
    case LoopMode::kStochastic: return "stochastic";
    case LoopMode::kOpenLoop: return "open-loop";
    case LoopMode::kFiltered: return "filtered";
  }
  return "?";
}

LoopMode loop_mode_from_string(const std::string& s) {
  if (s == "deterministic") return LoopMode::kDeterministic;
  if (s == "stochastic") return LoopMode::kStochastic;
  if (s == "open-loop") return LoopMode::kOpenLoop;
  if (s == "filtered") return LoopMode::kFiltered;
  throw InvalidArgument("unknown loop mode '" + s + "'");
}

void LoopConfig::validate() const {
  if (steps < 1) throw InvalidArgument("steps must be at least 1");
  if (state_stride < 0) throw InvalidArgument("state_stride must be non-negative");
  if (!(fidelity_threshold > 0.0 && fidelity_threshold <= 1.0)) {
    throw InvalidArgument("fidelity_threshold must lie in (0, 1]");
  }
  const std::size_t n = p.dim();
  if (h0 && h0->dim() != n) throw DimensionMismatch("LoopConfig: H0", n, h0->dim());
  if (h1 && h1->dim() != n) throw DimensionMismatch("LoopConfig: H1", n, h1->dim());
  if (meas && meas->dim() != n) throw DimensionMismatch("LoopConfig: measurement", n, meas->dim());
  switch (mode) {
    case LoopMode::kDeterministic:
      if (!h0) throw InvalidArgument("deterministic mode needs H0");
      if (!h1) throw InvalidArgument("deterministic mode needs H1");
      if (controller.kind != ControllerKind::kLinear) {
        throw InvalidArgument("deterministic mode uses the linear controller");
      }
      break;
    case LoopMode::kOpenLoop:
      if (!meas) throw InvalidArgument("open-loop mode needs a measurement");
      break;
    case LoopMode::kStochastic:
    case LoopMode::kFiltered:
      if (!meas) throw InvalidArgument(std::string(to_string(mode)) + " mode needs a measurement");
      if (!h1) throw InvalidArgument(std::string(to_string(mode)) + " mode needs H1");
      if (controller.kind == ControllerKind::kLinear) {
        throw InvalidArgument("measurement-based loops use the exact-min or quadratic controller");
      }
      break;
  }
  controller.validate();
}

std::optional<std::size_t> Trajectory::absorbed_state() const {
  const auto pops = final_state.populations();
  const auto it = std::max_element(pops.begin(), pops.end());
  if (*it >= kTol.absorbed_population) return static_cast<std::size_t>(it - pops.begin());
  return std::nullopt;
}

namespace {

constexpr long kRevalidatePeriod = 50;
constexpr double kFilterMixing = 1e-3;

void check_initial(const LoopConfig& cfg, const DensityMatrix& rho0) {
  cfg.validate();
  if (rho0.dim() != cfg.p.dim()) throw DimensionMismatch("initial state", cfg.p.dim(), rho0.dim());
}

DensityMatrix revalidate(const DensityMatrix& rho, long k, const char* which) {
  DensityMatrix clean = rho.cleaned();
  const auto v = validate_density(clean.matrix());
  if (!v.ok()) {
    std::ostringstream os;
    os << which << " state invalid at step " << k << ": " << v.describe();
    throw InvariantViolation(os.str());
  }
  return clean;
}

class Recorder {
 public:
  Recorder(const LoopConfig& cfg) : cfg_(cfg) {}

  void log(long k, double u, std::optional<std::size_t> outcome, const DensityMatrix& rho,
           const DensityMatrix* estimate = nullptr) {
    TrajectoryRecord r;
    r.k = k;
    r.u = u;
    r.outcome = outcome;
    r.fidelity = fidelity_to_basis(rho, cfg_.p.n_star());
    r.lyapunov = lyapunov_v(cfg_.p, rho);
    r.purity = rho.purity();
    if (cfg_.state_stride > 0 && k % cfg_.state_stride == 0) r.state = rho;
    if (estimate != nullptr) {
      r.estimate_fidelity = fidelity_to_basis(*estimate, cfg_.p.n_star());
      r.trace_distance = trace_distance(rho, *estimate);
    }
    if (!hit_ && r.fidelity >= cfg_.fidelity_threshold) hit_ = k;
    records_.push_back(std::move(r));
  }

  bool done() const { return cfg_.stop_at_threshold && hit_.has_value(); }

  Trajectory finish(DensityMatrix final_state, std::optional<DensityMatrix> estimate = std::nullopt) {
    return Trajectory{std::move(records_), hit_, std::move(final_state), std::move(estimate)};
  }

 private:
  const LoopConfig& cfg_;
  std::vector<TrajectoryRecord> records_;
  std::optional<long> hit_;
};

}  // namespace

Trajectory run_deterministic(const LoopConfig& cfg, const DensityMatrix& rho0) {
  check_initial(cfg, rho0);
  if (cfg.mode != LoopMode::kDeterministic) throw InvalidArgument("run_deterministic: mode is not deterministic");
  const ComplexMatrix drift = hermitian_expm(*cfg.h0, 1.0);
  const SpectralPropagator control(*cfg.h1);
  Recorder rec(cfg);
  DensityMatrix rho = rho0;
  rec.log(0, 0.0, std::nullopt, rho);
  for (long k = 1; k <= cfg.steps && !rec.done(); ++k) {
    const double u = linear_feedback(cfg.p, *cfg.h1, rho, cfg.controller.kappa).u;
    rho = DensityMatrix(conjugate_by(drift, control.conjugate(rho, u).matrix()), DensityMatrix::Unchecked{});
    if (k % kRevalidatePeriod == 0) rho = revalidate(rho, k, "true");
    rec.log(k, u, std::nullopt, rho);
  }
  return rec.finish(rho);
}

Trajectory run_open_loop(const LoopConfig& cfg, const DensityMatrix& rho0, std::uint64_t seed) {
  check_initial(cfg, rho0);
  if (cfg.mode != LoopMode::kOpenLoop) throw InvalidArgument("run_open_loop: mode is not open-loop");
  RandomStream rng(seed);
  Recorder rec(cfg);
  DensityMatrix rho = rho0;
  rec.log(0, 0.0, std::nullopt, rho);
  for (long k = 1; k <= cfg.steps && !rec.done(); ++k) {
    const auto out = sample_outcome(*cfg.meas, rho, rng);
    rho = apply_outcome(*cfg.meas, out.mu, rho);
    if (k % kRevalidatePeriod == 0) rho = revalidate(rho, k, "true");
    rec.log(k, 0.0, out.mu, rho);
  }
  return rec.finish(rho);
}

Trajectory run_stochastic(const LoopConfig& cfg, const DensityMatrix& rho0, std::uint64_t seed) {
  check_initial(cfg, rho0);
  if (cfg.mode != LoopMode::kStochastic) throw InvalidArgument("run_stochastic: mode is not stochastic");
  const SpectralPropagator control(*cfg.h1);
  RandomStream rng(seed);
  Recorder rec(cfg);
  DensityMatrix rho = rho0;
  rec.log(0, 0.0, std::nullopt, rho);
  for (long k = 1; k <= cfg.steps && !rec.done(); ++k) {
    const auto out = sample_outcome(*cfg.meas, rho, rng);
    const DensityMatrix collapsed = apply_outcome(*cfg.meas, out.mu, rho);
    const double u = decide(cfg.p, *cfg.h1, &*cfg.meas, collapsed, cfg.controller, &rng).u;
    rho = control.conjugate(collapsed, u);
    if (k % kRevalidatePeriod == 0) rho = revalidate(rho, k, "true");
    rec.log(k, u, out.mu, rho);
  }
  return rec.finish(rho);
}

Trajectory run_filtered(const LoopConfig& cfg, const DensityMatrix& rho0_true, const DensityMatrix& rho0_estimate,
                        std::uint64_t seed) {
  check_initial(cfg, rho0_true);
  if (cfg.mode != LoopMode::kFiltered) throw InvalidArgument("run_filtered: mode is not filtered");
  if (rho0_estimate.dim() != cfg.p.dim()) {
    throw DimensionMismatch("initial estimate", cfg.p.dim(), rho0_estimate.dim());
  }
  const std::size_t n = cfg.p.dim();
  const SpectralPropagator control(*cfg.h1);
  RandomStream rng(seed);
  Recorder rec(cfg);
  DensityMatrix rho = rho0_true;
  DensityMatrix est = rho0_estimate;
  rec.log(0, 0.0, std::nullopt, rho, &est);
  for (long k = 1; k <= cfg.steps && !rec.done(); ++k) {
    const auto out = sample_outcome(*cfg.meas, rho, rng);
    const DensityMatrix collapsed = apply_outcome(*cfg.meas, out.mu, rho);
    DensityMatrix est_collapsed = est;
    try {
      est_collapsed = apply_outcome(*cfg.meas, out.mu, est);
    } catch (const OutcomeImpossible&) {
      ComplexMatrix mixed = est.matrix();
      mixed *= cplx(1.0 - kFilterMixing);
      for (std::size_t i = 0; i < n; ++i) mixed(i, i) += kFilterMixing / static_cast<double>(n);
      try {
        est_collapsed = apply_outcome(*cfg.meas, out.mu, DensityMatrix(std::move(mixed), DensityMatrix::Unchecked{}));
      } catch (const OutcomeImpossible& e) {
        std::ostringstream os;
        os << "filter breakdown at step " << k << ": " << e.what();
        throw FilterBreakdown(os.str());
      }
    }
    const double u = decide(cfg.p, *cfg.h1, &*cfg.meas, est_collapsed, cfg.controller, &rng).u;
    rho = control.conjugate(collapsed, u);
    est = control.conjugate(est_collapsed, u);
    if (k % kRevalidatePeriod == 0) {
      rho = revalidate(rho, k, "true");
      est = revalidate(est, k, "estimated");
    }
    rec.log(k, u, out.mu, rho, &est);
  }
  return rec.finish(rho, est);
}

Trajectory run_loop(const LoopConfig& cfg, const DensityMatrix& rho0, std::uint64_t seed,
                    const std::optional<DensityMatrix>& estimate0) {
  switch (cfg.mode) {
    case LoopMode::kDeterministic: return run_deterministic(cfg, rho0);
    case LoopMode::kOpenLoop: return run_open_loop(cfg, rho0, seed);
    case LoopMode::kStochastic: return run_stochastic(cfg, rho0, seed);
    case LoopMode::kFiltered:
      if (!estimate0) throw InvalidArgument("filtered mode needs an initial estimate");
      return run_filtered(cfg, rho0, *estimate0, seed);
  }
  throw InvalidArgument("unknown loop mode");
}

}  // namespace qnd
