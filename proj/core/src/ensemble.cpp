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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "qndsynth/error.hpp"
#include "qndsynth/rng.hpp"
#include "qndsynth/simulate.hpp"

namespace qnd {
namespace {

void accumulate_curve(std::vector<double>& sum, const Trajectory& t, double TrajectoryRecord::*field) {
  for (std::size_t k = 0; k < sum.size(); ++k) {
    const auto& rec = t.records[std::min(k, t.records.size() - 1)];
    sum[k] += rec.*field;
  }
}

}  // namespace

EnsembleResult run_ensemble(const LoopConfig& cfg, const DensityMatrix& rho0, const EnsembleOptions& opts) {
  if (opts.realizations < 1) throw InvalidArgument("run_ensemble: need at least one realization");
  cfg.validate();
  if (cfg.mode == LoopMode::kFiltered && !opts.estimate0) {
    throw InvalidArgument("run_ensemble: filtered mode needs an initial estimate");
  }
  const std::size_t count = opts.realizations;
  unsigned threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

  std::vector<std::optional<Trajectory>> runs(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        runs[i] = run_loop(cfg, rho0, derive_seed(opts.master_seed, i), opts.estimate0);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw Error("realization " + std::to_string(i) + ": " + e.what());
    }
  }

  EnsembleResult out;
  out.realizations = count;
  out.master_seed = opts.master_seed;
  out.hit_histogram.assign(cfg.p.dim(), 0);
  std::size_t length = 0;
  for (const auto& r : runs) length = std::max(length, r->records.size());
  out.mean_fidelity_curve.assign(length, 0.0);
  out.mean_lyapunov_curve.assign(length, 0.0);
  out.mean_purity_curve.assign(length, 0.0);

  for (std::size_t i = 0; i < count; ++i) {
    const Trajectory& t = *runs[i];
    RealizationSummary s;
    s.index = i;
    s.seed = derive_seed(opts.master_seed, i);
    s.final_fidelity = t.final_fidelity();
    s.hit_step = t.hit_step;
    s.absorbed = t.absorbed_state();
    if (t.records.back().trace_distance) s.final_trace_distance = t.records.back().trace_distance;
    if (s.absorbed) {
      ++out.hit_histogram[*s.absorbed];
    } else {
      ++out.unabsorbed;
    }
    out.per_realization.push_back(s);
    accumulate_curve(out.mean_fidelity_curve, t, &TrajectoryRecord::fidelity);
    accumulate_curve(out.mean_lyapunov_curve, t, &TrajectoryRecord::lyapunov);
    accumulate_curve(out.mean_purity_curve, t, &TrajectoryRecord::purity);
  }
  const double inv = 1.0 / static_cast<double>(count);
  if (length > 1) {
    out.lyapunov_increment_mean.assign(length - 1, 0.0);
    out.lyapunov_increment_se.assign(length - 1, 0.0);
    std::vector<double> sq(length - 1, 0.0);
    for (const auto& r : runs) {
      const auto& recs = r->records;
      for (std::size_t k = 0; k + 1 < length; ++k) {
        const double a = recs[std::min(k, recs.size() - 1)].lyapunov;
        const double b = recs[std::min(k + 1, recs.size() - 1)].lyapunov;
        out.lyapunov_increment_mean[k] += b - a;
        sq[k] += (b - a) * (b - a);
      }
    }
    for (std::size_t k = 0; k + 1 < length; ++k) {
      const double mean = out.lyapunov_increment_mean[k] * inv;
      out.lyapunov_increment_mean[k] = mean;
      if (count > 1) {
        const double var = std::max(0.0, (sq[k] - static_cast<double>(count) * mean * mean) / static_cast<double>(count - 1));
        out.lyapunov_increment_se[k] = std::sqrt(var * inv);
      }
    }
  }
  for (auto* curve : {&out.mean_fidelity_curve, &out.mean_lyapunov_curve, &out.mean_purity_curve}) {
    for (double& v : *curve) v *= inv;
  }
  if (opts.keep_trajectories) {
    out.trajectories.reserve(count);
    for (auto& r : runs) out.trajectories.push_back(std::move(*r));
  }
  return out;
}

ConvergenceSummary convergence_statistics(const EnsembleResult& result) {
  ConvergenceSummary s;
  s.realizations = result.realizations;
  s.unabsorbed = result.unabsorbed;
  std::vector<long> hits;
  for (const auto& r : result.per_realization)
    if (r.hit_step) hits.push_back(*r.hit_step);
  s.successes = hits.size();
  const double n = static_cast<double>(std::max<std::size_t>(result.realizations, 1));
  s.success_rate = static_cast<double>(s.successes) / n;
  if (!hits.empty()) {
    std::sort(hits.begin(), hits.end());
    auto rank = [&](double q) {
      const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(hits.size())));
      return hits[std::clamp<std::size_t>(idx, 1, hits.size()) - 1];
    };
    s.median_hit = rank(0.5);
    s.p90_hit = rank(0.9);
  }
  for (std::size_t state = 0; state < result.hit_histogram.size(); ++state) {
    AbsorptionFrequency f;
    f.state = state;
    f.count = result.hit_histogram[state];
    f.frequency = static_cast<double>(f.count) / n;
    const double half = 3.0 * std::sqrt(f.frequency * (1.0 - f.frequency) / n);
    f.lower = std::max(0.0, f.frequency - half);
    f.upper = std::min(1.0, f.frequency + half);
    s.absorption.push_back(f);
  }
  return s;
}

LyapunovTrend lyapunov_trend(const EnsembleResult& result, double sigmas) {
  LyapunovTrend t;
  t.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < result.lyapunov_increment_mean.size(); ++k) {
    const double excess = result.lyapunov_increment_mean[k] - sigmas * result.lyapunov_increment_se[k];
    if (excess > t.worst_excess) {
      t.worst_excess = excess;
      t.worst_step = k;
    }
  }
  // Round-off in V is of order 1e-12 relative to the observable scale.
  t.non_increasing = t.worst_excess <= 1e-10;
  return t;
}

}  // namespace qnd
