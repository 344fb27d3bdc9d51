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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qndsynth/control.hpp"
#include "qndsynth/measurement.hpp"
#include "qndsynth/quantum.hpp"

namespace qnd {

enum class LoopMode { kDeterministic, kStochastic, kOpenLoop, kFiltered };

const char* to_string(LoopMode m);
LoopMode loop_mode_from_string(const std::string& s);

struct LoopConfig {
  LoopMode mode = LoopMode::kStochastic;
  DiagonalObservable p;
  std::optional<HermitianOperator> h0{};  // deterministic mode only
  std::optional<HermitianOperator> h1{};
  std::optional<QndMeasurement> meas{};
  ControllerConfig controller{};
  long steps = 1000;
  double fidelity_threshold = 0.99;
  long state_stride = 50;
  /// End the run at the first step reaching the threshold.
  bool stop_at_threshold = false;

  /// Checks that the fields the mode needs are present and consistent.
  void validate() const;
};

/// Record k describes rho_k; u and outcome belong to the step that produced
/// it (absent for k = 0).
struct TrajectoryRecord {
  long k = 0;
  double u = 0.0;
  std::optional<std::size_t> outcome;
  double fidelity = 0.0;
  double lyapunov = 0.0;
  double purity = 0.0;
  std::optional<DensityMatrix> state;
  /// Filtered runs: fidelity of the estimate and trace distance to it.
  std::optional<double> estimate_fidelity;
  std::optional<double> trace_distance;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  /// First k with fidelity at or above the threshold.
  std::optional<long> hit_step;
  DensityMatrix final_state;
  std::optional<DensityMatrix> final_estimate;

  /// Basis state holding at least the absorbed-population tolerance.
  std::optional<std::size_t> absorbed_state() const;
  double final_fidelity() const { return records.back().fidelity; }
};

Trajectory run_deterministic(const LoopConfig& cfg, const DensityMatrix& rho0);
Trajectory run_open_loop(const LoopConfig& cfg, const DensityMatrix& rho0, std::uint64_t seed);
Trajectory run_stochastic(const LoopConfig& cfg, const DensityMatrix& rho0, std::uint64_t seed);
/// Control is computed from the estimate; both states see the same outcome
/// and the same u. Throws FilterBreakdown when an observed outcome stays
/// impossible for the estimate after one mixing recovery.
Trajectory run_filtered(const LoopConfig& cfg, const DensityMatrix& rho0_true,
                        const DensityMatrix& rho0_estimate, std::uint64_t seed);

/// Dispatch on cfg.mode. estimate0 is required for filtered runs.
Trajectory run_loop(const LoopConfig& cfg, const DensityMatrix& rho0, std::uint64_t seed,
                    const std::optional<DensityMatrix>& estimate0 = std::nullopt);

struct RealizationSummary {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double final_fidelity = 0.0;
  std::optional<long> hit_step;
  std::optional<std::size_t> absorbed;
  std::optional<double> final_trace_distance;
};

struct EnsembleOptions {
  std::size_t realizations = 100;
  std::uint64_t master_seed = 0;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
  std::optional<DensityMatrix> estimate0{};
  bool keep_trajectories = false;
};

struct EnsembleResult {
  std::size_t realizations = 0;
  std::uint64_t master_seed = 0;
  std::vector<RealizationSummary> per_realization;
  /// Averages over realizations at each k; a run that stopped early holds its
  /// last value.
  std::vector<double> mean_fidelity_curve;
  std::vector<double> mean_lyapunov_curve;
  std::vector<double> mean_purity_curve;
  /// Mean and standard error over realizations of V(rho_{k+1}) - V(rho_k),
  /// for k = 0 .. length - 2.
  std::vector<double> lyapunov_increment_mean;
  std::vector<double> lyapunov_increment_se;
  std::vector<std::size_t> hit_histogram;
  std::size_t unabsorbed = 0;
  std::vector<Trajectory> trajectories;  // filled when keep_trajectories
};

/// Realization i runs with derive_seed(master_seed, i); output is identical
/// for every thread count. A failing realization rethrows as Error naming
/// the lowest failing index.
EnsembleResult run_ensemble(const LoopConfig& cfg, const DensityMatrix& rho0, const EnsembleOptions& opts);

struct AbsorptionFrequency {
  std::size_t state = 0;
  std::size_t count = 0;
  double frequency = 0.0;
  double lower = 0.0;  // binomial 3 sigma interval, clipped to [0, 1]
  double upper = 0.0;
};

struct ConvergenceSummary {
  std::size_t realizations = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  std::optional<long> median_hit;
  std::optional<long> p90_hit;
  std::vector<AbsorptionFrequency> absorption;
  std::size_t unabsorbed = 0;
};

ConvergenceSummary convergence_statistics(const EnsembleResult& result);

/// Whether the mean Lyapunov curve rises anywhere by more than `sigmas`
/// standard errors of the per-step increment.
struct LyapunovTrend {
  bool non_increasing = true;
  std::size_t worst_step = 0;
  double worst_excess = 0.0;  // mean increment minus sigmas * se, in V units
};

LyapunovTrend lyapunov_trend(const EnsembleResult& result, double sigmas = 3.0);

}  // namespace qnd
