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

#include "experiment.hpp"

#include <numbers>
#include <set>

namespace qnd::cli {

using io::FormatError;
using io::json;

SynthesisProblem SynthesisSettings::problem(const DiagonalObservable& p) const {
  SynthesisProblem s = sparse ? SynthesisProblem::sparse(p) : SynthesisProblem::dense(p);
  s.gamma1 = gamma1;
  s.gamma2 = gamma2;
  if (alpha1) s.alpha1 = *alpha1;
  if (alpha2) s.alpha2 = *alpha2;
  s.norm = norm;
  s.trace_bound = trace_bound;
  s.validate();
  return s;
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw FormatError(where + ": unknown key '" + key + "'");
  }
}

// Inline object under key, or the contents of key + "_file".
std::optional<json> section(const json& j, const std::string& key, const std::filesystem::path& base) {
  const std::string file_key = key + "_file";
  if (j.contains(key) && j.contains(file_key)) throw FormatError("give either '" + key + "' or '" + file_key + "'");
  if (j.contains(key)) return j[key];
  if (j.contains(file_key)) {
    std::filesystem::path p = j[file_key].get<std::string>();
    if (p.is_relative()) p = base / p;
    return io::read_json_file(p);
  }
  return std::nullopt;
}

HermitianOperator operator_from_json(const json& j, OperatorRole role) {
  if (j.is_object() && j.contains("diag") && !j.contains("re")) {
    std::vector<double> d;
    for (const auto& x : j["diag"]) d.push_back(x.get<double>());
    return HermitianOperator::diagonal(d, role);
  }
  return io::hermitian_from_json(j, role);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("'") + key + "': " + e.what());
  }
}

}  // namespace

SynthesisSettings synthesis_settings_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("synthesis: expected an object");
  reject_unknown(j, {"sparse", "gamma1", "gamma2", "alpha1", "alpha2", "norm", "trace_bound", "phase_policy"},
                 "synthesis");
  SynthesisSettings s;
  s.sparse = get_or(j, "sparse", s.sparse);
  s.gamma1 = get_or(j, "gamma1", s.gamma1);
  s.gamma2 = get_or(j, "gamma2", s.gamma2);
  if (j.contains("alpha1")) s.alpha1 = get_or(j, "alpha1", 1.0);
  if (j.contains("alpha2")) s.alpha2 = get_or(j, "alpha2", 0.0);
  const auto norm = get_or<std::string>(j, "norm", "l2");
  if (norm == "l2") {
    s.norm = ResidualNorm::kL2;
  } else if (norm == "l1") {
    s.norm = ResidualNorm::kL1;
  } else {
    throw FormatError("synthesis: norm must be 'l1' or 'l2'");
  }
  if (j.contains("trace_bound")) s.trace_bound = get_or(j, "trace_bound", 0.0);
  try {
    s.phase_policy = phase_policy_from_string(get_or<std::string>(j, "phase_policy", "positive"));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("synthesis: ") + e.what());
  }
  return s;
}

json to_json(const SynthesisSettings& s) {
  json j{{"sparse", s.sparse},
         {"gamma1", s.gamma1},
         {"gamma2", s.gamma2},
         {"norm", s.norm == ResidualNorm::kL2 ? "l2" : "l1"},
         {"phase_policy", to_string(s.phase_policy)}};
  if (s.alpha1) j["alpha1"] = *s.alpha1;
  if (s.alpha2) j["alpha2"] = *s.alpha2;
  if (s.trace_bound) j["trace_bound"] = *s.trace_bound;
  return j;
}

ExperimentConfig experiment_from_json(const json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw FormatError("experiment: expected an object");
  reject_unknown(j,
                 {"mode", "observable", "observable_file", "h0", "h0_file", "h1", "h1_file", "synthesis",
                  "measurement", "measurement_file", "controller", "loop", "initial_state", "initial_estimate",
                  "ensemble", "output_dir"},
                 "experiment");
  const auto obs = section(j, "observable", base);
  if (!obs) throw FormatError("experiment: missing 'observable'");
  if (!j.contains("initial_state")) throw FormatError("experiment: missing 'initial_state'");

  ExperimentConfig c{.observable = io::observable_from_json(*obs),
                     .initial_state = io::density_from_json(j["initial_state"])};
  try {
    c.mode = loop_mode_from_string(get_or<std::string>(j, "mode", "stochastic"));
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  if (auto h0 = section(j, "h0", base)) c.h0 = operator_from_json(*h0, OperatorRole::kDrift);
  if (auto h1 = section(j, "h1", base)) c.h1 = operator_from_json(*h1, OperatorRole::kControl);
  if (j.contains("synthesis")) {
    if (c.h1) throw FormatError("experiment: give either an H1 matrix or synthesis settings");
    c.synthesis = synthesis_settings_from_json(j["synthesis"]);
  }
  if (auto m = section(j, "measurement", base)) c.measurement = io::measurement_from_json(*m);
  if (j.contains("controller")) c.controller = io::controller_from_json(j["controller"]);
  if (j.contains("loop")) {
    const json& l = j["loop"];
    reject_unknown(l, {"steps", "fidelity_threshold", "state_stride", "stop_at_threshold"}, "loop");
    c.steps = get_or(l, "steps", c.steps);
    c.fidelity_threshold = get_or(l, "fidelity_threshold", c.fidelity_threshold);
    c.state_stride = get_or(l, "state_stride", c.state_stride);
    c.stop_at_threshold = get_or(l, "stop_at_threshold", c.stop_at_threshold);
  }
  if (j.contains("initial_estimate")) c.initial_estimate = io::density_from_json(j["initial_estimate"]);
  if (j.contains("ensemble")) {
    const json& e = j["ensemble"];
    reject_unknown(e, {"realizations", "master_seed", "success_floor"}, "ensemble");
    c.ensemble.realizations = get_or<std::size_t>(e, "realizations", c.ensemble.realizations);
    if (e.contains("master_seed")) c.ensemble.master_seed = get_or<std::uint64_t>(e, "master_seed", 0);
    c.ensemble.success_floor = get_or(e, "success_floor", c.ensemble.success_floor);
  }
  if (j.contains("output_dir")) c.output_dir = get_or<std::string>(j, "output_dir", "");

  if (!c.h1 && !c.synthesis && c.mode != LoopMode::kOpenLoop) {
    throw FormatError("experiment: mode needs 'h1' or 'synthesis'");
  }
  if (c.mode != LoopMode::kDeterministic && !c.ensemble.master_seed) {
    throw FormatError("experiment: stochastic modes need ensemble.master_seed");
  }
  if (c.mode == LoopMode::kFiltered && !c.initial_estimate) {
    throw FormatError("experiment: filtered mode needs 'initial_estimate'");
  }
  if (c.ensemble.realizations < 1) throw FormatError("experiment: need at least one realization");
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j{{"mode", to_string(c.mode)},
         {"observable", io::to_json(c.observable)},
         {"controller", io::to_json(c.controller)},
         {"loop",
          {{"steps", c.steps},
           {"fidelity_threshold", c.fidelity_threshold},
           {"state_stride", c.state_stride},
           {"stop_at_threshold", c.stop_at_threshold}}},
         {"initial_state", io::to_json(c.initial_state.matrix())}};
  if (c.h0) j["h0"] = io::to_json(c.h0->matrix());
  if (c.h1) j["h1"] = io::to_json(c.h1->matrix());
  if (c.synthesis) j["synthesis"] = to_json(*c.synthesis);
  if (c.measurement) j["measurement"] = io::to_json(*c.measurement);
  if (c.initial_estimate) j["initial_estimate"] = io::to_json(c.initial_estimate->matrix());
  json e{{"realizations", c.ensemble.realizations}, {"success_floor", c.ensemble.success_floor}};
  if (c.ensemble.master_seed) e["master_seed"] = *c.ensemble.master_seed;
  j["ensemble"] = std::move(e);
  if (c.output_dir) j["output_dir"] = c.output_dir->string();
  return j;
}

HermitianOperator resolve_h1(const ExperimentConfig& c) {
  if (c.h1) return *c.h1;
  if (c.synthesis) {
    return synthesis_pipeline(c.observable, c.synthesis->problem(c.observable), c.synthesis->phase_policy).h1;
  }
  // Open-loop runs never apply a control; any Hermitian placeholder works.
  return HermitianOperator(ComplexMatrix(c.observable.dim()), OperatorRole::kControl);
}

LoopConfig loop_config(const ExperimentConfig& c, const HermitianOperator& h1) {
  LoopConfig l{.mode = c.mode, .p = c.observable};
  l.h0 = c.h0;
  l.h1 = h1;
  l.meas = c.measurement;
  l.controller = c.controller;
  l.steps = c.steps;
  l.fidelity_threshold = c.fidelity_threshold;
  l.state_stride = c.state_stride;
  l.stop_at_threshold = c.stop_at_threshold;
  return l;
}

DiagonalObservable reference_observable() {
  return DiagonalObservable({51.7022, 82.0324, 10.0114, 40.2333, 24.6756, 19.2339, 28.6260, 44.5561}, 2);
}

DensityMatrix reference_initial_state() {
  constexpr std::size_t n = 8;
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) m(i, k) = 1.0 / 16.0;
  m(0, 0) += 0.5;
  return DensityMatrix::from(m);
}

ExperimentConfig reference_experiment(bool sparse, std::uint64_t seed) {
  ExperimentConfig c{.observable = reference_observable(), .initial_state = reference_initial_state()};
  c.mode = LoopMode::kStochastic;
  c.synthesis = SynthesisSettings{.sparse = sparse};
  c.measurement = QndMeasurement::photon_box(8, 0.125, std::numbers::pi / 4.0);
  c.controller = ControllerConfig{.kind = ControllerKind::kQuadratic, .u_bar = 0.1, .epsilon = 0.0};
  c.steps = 1000;
  c.fidelity_threshold = 0.99;
  c.ensemble = EnsembleSettings{.realizations = 100, .master_seed = seed, .success_floor = 0.95};
  return c;
}

}  // namespace qnd::cli
