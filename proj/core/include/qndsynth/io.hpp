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
#include <iosfwd>
#include <string>

#include "json.hpp"

#include "qndsynth/control.hpp"
#include "qndsynth/measurement.hpp"
#include "qndsynth/quantum.hpp"
#include "qndsynth/simulate.hpp"
#include "qndsynth/synthesis.hpp"

namespace qnd::io {

using json = nlohmann::json;

/// Malformed or invariant-violating input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// {"n": N, "re": [[...]], "im": [[...]]}; "im" may be omitted for real data.
json to_json(const ComplexMatrix& m);
json to_json(const RealMatrix& m);
ComplexMatrix complex_matrix_from_json(const json& j);
RealMatrix real_matrix_from_json(const json& j);

HermitianOperator hermitian_from_json(const json& j, OperatorRole role = OperatorRole::kGeneric);
DensityMatrix density_from_json(const json& j);

// {"diag": [...], "n_star": k}; n_star defaults to the first minimum.
json to_json(const DiagonalObservable& p);
DiagonalObservable observable_from_json(const json& j);

// {"n", "m", "coeffs_re", "coeffs_im"} or {"photon_box": {"n", "phi0", "theta"}}.
json to_json(const QndMeasurement& m);
QndMeasurement measurement_from_json(const json& j);

json to_json(const ControllerConfig& c);
ControllerConfig controller_from_json(const json& j);

json to_json(const SynthesisResult& r);

json to_json(const EnsembleResult& r, const ConvergenceSummary& s, const std::string& config_hash);

/// 64-bit FNV-1a of the text, as 16 lowercase hex digits.
std::string config_hash(const std::string& text);

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// Header comment lines, then realization,k,u,outcome,fidelity,lyapunov,purity.
void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& runs, const std::string& config_hash,
                            std::uint64_t master_seed);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qnd::io
