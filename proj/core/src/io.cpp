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

#include "qndsynth/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qnd::io {
namespace {

std::size_t read_dim(const json& j) {
  if (!j.contains("n") || !j["n"].is_number_integer()) throw FormatError("matrix: missing integer field 'n'");
  const auto n = j["n"].get<long long>();
  if (n < 2) throw FormatError("matrix: 'n' must be at least 2");
  return static_cast<std::size_t>(n);
}

std::vector<std::vector<double>> read_rows(const json& j, const char* key, std::size_t rows, std::size_t cols) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  const json& a = j[key];
  if (!a.is_array() || a.size() != rows) throw FormatError(std::string("'") + key + "' has the wrong row count");
  std::vector<std::vector<double>> out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!a[i].is_array() || a[i].size() != cols) {
      throw FormatError(std::string("'") + key + "' row " + std::to_string(i) + " has the wrong length");
    }
    for (const auto& x : a[i]) {
      if (!x.is_number()) throw FormatError(std::string("'") + key + "' holds a non-number");
      const double v = x.get<double>();
      if (!std::isfinite(v)) throw FormatError(std::string("'") + key + "' holds a non-finite value");
      out[i].push_back(v);
    }
  }
  return out;
}

std::vector<double> read_vector(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw FormatError(std::string("missing array '") + key + "'");
  std::vector<double> out;
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw FormatError(std::string("'") + key + "' holds a non-number");
    out.push_back(x.get<double>());
  }
  return out;
}

double read_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw FormatError(std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

template <class F>
auto rethrow_as_format(const char* what, F&& f) {
  try {
    return f();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

json optional_json(const std::optional<long>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const ComplexMatrix& m) {
  json re = json::array(), im = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json rr = json::array(), ri = json::array();
    for (std::size_t k = 0; k < m.dim(); ++k) {
      rr.push_back(m(i, k).real());
      ri.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return json{{"n", m.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

json to_json(const RealMatrix& m) {
  json re = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json rr = json::array();
    for (std::size_t k = 0; k < m.dim(); ++k) rr.push_back(m(i, k));
    re.push_back(std::move(rr));
  }
  return json{{"n", m.dim()}, {"re", std::move(re)}};
}

ComplexMatrix complex_matrix_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("matrix: expected an object");
  const std::size_t n = read_dim(j);
  const auto re = read_rows(j, "re", n, n);
  const auto im = j.contains("im") ? read_rows(j, "im", n, n) : std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0));
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) m(i, k) = cplx(re[i][k], im[i][k]);
  return m;
}

RealMatrix real_matrix_from_json(const json& j) {
  const ComplexMatrix c = complex_matrix_from_json(j);
  for (const auto& x : c.entries())
    if (x.imag() != 0.0) throw FormatError("matrix: expected real entries");
  return real_part(c);
}

HermitianOperator hermitian_from_json(const json& j, OperatorRole role) {
  return rethrow_as_format("operator", [&] { return HermitianOperator(complex_matrix_from_json(j), role); });
}

DensityMatrix density_from_json(const json& j) {
  return rethrow_as_format("density matrix", [&] {
    if (j.is_object() && j.contains("diag")) return DensityMatrix::from_diagonal(read_vector(j, "diag"));
    return DensityMatrix::from(complex_matrix_from_json(j));
  });
}

json to_json(const DiagonalObservable& p) { return json{{"diag", p.sigma()}, {"n_star", p.n_star()}}; }

DiagonalObservable observable_from_json(const json& j) {
  return rethrow_as_format("observable", [&] {
    if (!j.is_object()) throw FormatError("observable: expected an object");
    auto diag = read_vector(j, "diag");
    if (j.contains("n_star")) {
      if (!j["n_star"].is_number_integer() || j["n_star"].get<long long>() < 0) {
        throw FormatError("observable: 'n_star' must be a non-negative integer");
      }
      return DiagonalObservable(std::move(diag), j["n_star"].get<std::size_t>());
    }
    return DiagonalObservable(std::move(diag));
  });
}

json to_json(const QndMeasurement& m) {
  json re = json::array(), im = json::array();
  for (const auto& row : m.coeffs()) {
    json rr = json::array(), ri = json::array();
    for (const auto& c : row) {
      rr.push_back(c.real());
      ri.push_back(c.imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return json{{"n", m.dim()}, {"m", m.outcomes()}, {"coeffs_re", std::move(re)}, {"coeffs_im", std::move(im)}};
}

QndMeasurement measurement_from_json(const json& j) {
  return rethrow_as_format("measurement", [&] {
    if (!j.is_object()) throw FormatError("measurement: expected an object");
    if (j.contains("photon_box")) {
      const json& b = j["photon_box"];
      if (!b.contains("n") || !b["n"].is_number_integer()) throw FormatError("photon_box: missing 'n'");
      return QndMeasurement::photon_box(b["n"].get<std::size_t>(), read_number(b, "phi0", 0.0),
                                        read_number(b, "theta", 0.0));
    }
    const std::size_t n = read_dim(j);
    if (!j.contains("m") || !j["m"].is_number_integer()) throw FormatError("measurement: missing 'm'");
    const auto m = j["m"].get<std::size_t>();
    const auto re = read_rows(j, "coeffs_re", m, n);
    const auto im = j.contains("coeffs_im") ? read_rows(j, "coeffs_im", m, n)
                                            : std::vector<std::vector<double>>(m, std::vector<double>(n, 0.0));
    std::vector<std::vector<cplx>> c(m, std::vector<cplx>(n));
    for (std::size_t mu = 0; mu < m; ++mu)
      for (std::size_t k = 0; k < n; ++k) c[mu][k] = cplx(re[mu][k], im[mu][k]);
    return QndMeasurement(std::move(c));
  });
}

json to_json(const ControllerConfig& c) {
  return json{{"kind", to_string(c.kind)},
              {"kappa", c.kappa},
              {"u_bar", c.u_bar},
              {"epsilon", c.epsilon},
              {"tie_break", to_string(c.tie_break)}};
}

ControllerConfig controller_from_json(const json& j) {
  return rethrow_as_format("controller", [&] {
    if (!j.is_object()) throw FormatError("controller: expected an object");
    ControllerConfig c;
    if (j.contains("kind")) c.kind = controller_kind_from_string(j["kind"].get<std::string>());
    c.kappa = read_number(j, "kappa", c.kappa);
    c.u_bar = read_number(j, "u_bar", c.u_bar);
    c.epsilon = read_number(j, "epsilon", c.epsilon);
    if (j.contains("tie_break")) c.tie_break = tie_break_from_string(j["tie_break"].get<std::string>());
    c.validate();
    return c;
  });
}

json to_json(const SynthesisResult& r) {
  return json{{"r", to_json(r.r.matrix())},
              {"lambda", r.lambda},
              {"lambda_tilde", r.lambda_tilde},
              {"residual", r.residual},
              {"objective", r.objective},
              {"iterations", r.iterations},
              {"feasible", r.feasible},
              {"convention", "sqrt(R/2)"}};
}

json to_json(const EnsembleResult& r, const ConvergenceSummary& s, const std::string& config_hash) {
  json per = json::array();
  for (const auto& p : r.per_realization) {
    json e{{"index", p.index},
           {"seed", p.seed},
           {"final_fidelity", p.final_fidelity},
           {"hit_step", optional_json(p.hit_step)},
           {"absorbed", optional_json(p.absorbed)}};
    if (p.final_trace_distance) e["final_trace_distance"] = *p.final_trace_distance;
    per.push_back(std::move(e));
  }
  json absorption = json::array();
  for (const auto& a : s.absorption) {
    absorption.push_back(json{{"state", a.state},
                              {"count", a.count},
                              {"frequency", a.frequency},
                              {"lower", a.lower},
                              {"upper", a.upper}});
  }
  return json{{"config_hash", config_hash},
              {"master_seed", r.master_seed},
              {"realizations", r.realizations},
              {"successes", s.successes},
              {"success_rate", s.success_rate},
              {"median_hit", optional_json(s.median_hit)},
              {"p90_hit", optional_json(s.p90_hit)},
              {"hit_histogram", r.hit_histogram},
              {"unabsorbed", r.unabsorbed},
              {"absorption", std::move(absorption)},
              {"per_realization", std::move(per)},
              {"mean_fidelity_curve", r.mean_fidelity_curve},
              {"mean_lyapunov_curve", r.mean_lyapunov_curve},
              {"mean_purity_curve", r.mean_purity_curve},
              {"lyapunov_increment_mean", r.lyapunov_increment_mean},
              {"lyapunov_increment_se", r.lyapunov_increment_se}};
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_trajectories_csv(std::ostream& os, const std::vector<Trajectory>& runs, const std::string& config_hash,
                            std::uint64_t master_seed) {
  os << "# qndsynth trajectories\n"
     << "# config_hash: " << config_hash << "\n"
     << "# master_seed: " << master_seed << "\n"
     << "# realization, k and outcome are 0-based\n"
     << "realization,k,u,outcome,fidelity,lyapunov,purity\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (const auto& r : runs[i].records) {
      os << i << ',' << r.k << ',' << format_double(r.u) << ',';
      if (r.outcome) os << *r.outcome;
      os << ',' << format_double(r.fidelity) << ',' << format_double(r.lyapunov) << ','
         << format_double(r.purity) << '\n';
    }
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace qnd::io
