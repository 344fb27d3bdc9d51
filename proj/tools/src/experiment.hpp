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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "qndsynth/io.hpp"
#include "qndsynth/simulate.hpp"
#include "qndsynth/synthesis.hpp"

namespace qnd::cli {

enum ExitCode : int {
  kOk = 0,
  kIoOrValidation = 1,
  kInfeasible = 2,
  kPartialFailure = 3,
  kBelowFloor = 4,
};

struct SynthesisSettings {
  bool sparse = false;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  std::optional<double> alpha1{};
  std::optional<double> alpha2{};
  ResidualNorm norm = ResidualNorm::kL2;
  std::optional<double> trace_bound{};
  PhasePolicy phase_policy = PhasePolicy::kPositive;

  SynthesisProblem problem(const DiagonalObservable& p) const;
};

struct EnsembleSettings {
  std::size_t realizations = 100;
  std::optional<std::uint64_t> master_seed{};
  double success_floor = 0.95;
};

/// One JSON document describing a synthesis-plus-simulation experiment.
/// Either "h1" (matrix) or "synthesis" (settings) supplies the control
/// Hamiltonian.
struct ExperimentConfig {
  LoopMode mode = LoopMode::kStochastic;
  DiagonalObservable observable;
  std::optional<HermitianOperator> h0{};
  std::optional<HermitianOperator> h1{};
  std::optional<SynthesisSettings> synthesis{};
  std::optional<QndMeasurement> measurement{};
  ControllerConfig controller{};
  long steps = 1000;
  double fidelity_threshold = 0.99;
  long state_stride = 50;
  bool stop_at_threshold = false;
  DensityMatrix initial_state;
  std::optional<DensityMatrix> initial_estimate{};
  EnsembleSettings ensemble{};
  std::optional<std::filesystem::path> output_dir{};
};

SynthesisSettings synthesis_settings_from_json(const io::json& j);
io::json to_json(const SynthesisSettings& s);

/// Relative file references ("*_file" keys) resolve against base_dir.
ExperimentConfig experiment_from_json(const io::json& j, const std::filesystem::path& base_dir = {});
io::json to_json(const ExperimentConfig& c);

/// Synthesizes H1 when the config carries synthesis settings instead of a
/// matrix. Throws InfeasibleLambda when synthesis fails verification.
HermitianOperator resolve_h1(const ExperimentConfig& c);

LoopConfig loop_config(const ExperimentConfig& c, const HermitianOperator& h1);

/// Reference observable: eight levels, minimum at index 2.
DiagonalObservable reference_observable();
/// 1/2 |0><0| + (1/16) * all-ones, N = 8.
DensityMatrix reference_initial_state();
/// The numerical example: photon box phi0 = 1/8, theta = pi/4, quadratic
/// controller with u_bar = 0.1 and eps = 0, 100 realizations of 1000 steps.
ExperimentConfig reference_experiment(bool sparse, std::uint64_t seed);

}  // namespace qnd::cli
