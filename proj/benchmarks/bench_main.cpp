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

#include <benchmark/benchmark.h>

#include <numbers>

#include "qndsynth/control.hpp"
#include "qndsynth/simulate.hpp"
#include "qndsynth/synthesis.hpp"

namespace qnd {
namespace {

const DiagonalObservable& observable() {
  static const DiagonalObservable p({51.7022, 82.0324, 10.0114, 40.2333, 24.6756, 19.2339, 28.6260, 44.5561}, 2);
  return p;
}

const HermitianOperator& control_hamiltonian() {
  static const HermitianOperator h1 = synthesis_pipeline(observable(), SynthesisProblem::dense(observable())).h1;
  return h1;
}

DensityMatrix start_state() {
  ComplexMatrix m(8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) m(i, j) = 1.0 / 16.0;
  m(0, 0) += 0.5;
  return DensityMatrix::from(m);
}

void BM_Eigh(benchmark::State& state) {
  const auto& h = control_hamiltonian().matrix();
  for (auto _ : state) benchmark::DoNotOptimize(eigh(h));
}
BENCHMARK(BM_Eigh);

void BM_Expm(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hermitian_expm(control_hamiltonian(), 0.07));
}
BENCHMARK(BM_Expm);

void BM_SolveDense(benchmark::State& state) {
  const auto problem = SynthesisProblem::dense(observable());
  for (auto _ : state) benchmark::DoNotOptimize(solve_synthesis(problem));
}
BENCHMARK(BM_SolveDense)->Unit(benchmark::kMillisecond);

void BM_SolveSparse(benchmark::State& state) {
  const auto problem = SynthesisProblem::sparse(observable());
  for (auto _ : state) benchmark::DoNotOptimize(solve_synthesis(problem));
}
BENCHMARK(BM_SolveSparse)->Unit(benchmark::kMillisecond);

void BM_QuadraticStep(benchmark::State& state) {
  const auto rho = start_state();
  const ControllerConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(quadratic_feedback(observable(), control_hamiltonian(), rho, cfg));
}
BENCHMARK(BM_QuadraticStep);

void BM_ExactMinStep(benchmark::State& state) {
  const auto rho = start_state();
  const auto meas = QndMeasurement::photon_box(8, 0.125, std::numbers::pi / 4);
  const ControllerConfig cfg{.kind = ControllerKind::kExactMin};
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_min_feedback(observable(), control_hamiltonian(), meas, rho, cfg));
}
BENCHMARK(BM_ExactMinStep)->Unit(benchmark::kMicrosecond);

void BM_StochasticRun(benchmark::State& state) {
  LoopConfig cfg{.mode = LoopMode::kStochastic,
                 .p = observable(),
                 .h1 = control_hamiltonian(),
                 .meas = QndMeasurement::photon_box(8, 0.125, std::numbers::pi / 4),
                 .steps = 1000,
                 .state_stride = 0};
  const auto rho0 = start_state();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_stochastic(cfg, rho0, seed++));
}
BENCHMARK(BM_StochasticRun)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace qnd

BENCHMARK_MAIN();
