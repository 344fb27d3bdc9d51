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

// Convex synthesis of the connectivity matrix. The cone is parameterized by
// non-negative edge weights w_ij (i < j), R = sum_e w_e (e_i e_j^T + e_j e_i^T
// - e_i e_i^T - e_j e_j^T); negative semidefiniteness then holds by diagonal
// dominance. The problem in (w, lambda) is solved with a primal-dual hybrid
// gradient iteration on column-scaled edge coordinates.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <sstream>

#include "qndsynth/synthesis.hpp"

namespace qnd {
namespace {

constexpr long kMaxIterations = 50000;
constexpr double kStopTol = 1e-13;
// Fixed-point change accepted when the budget runs out.
constexpr double kBudgetTol = 1e-8;
constexpr double kStepSafety = 0.95;

struct EdgeOperator {
  std::size_t n = 0;
  std::vector<std::size_t> ei, ej;
  std::vector<double> gap;    // sigma_j - sigma_i
  std::vector<double> scale;  // column scaling d_e

  std::size_t edges() const { return ei.size(); }

  // out = A D x_e - lambda
  void apply(const std::vector<double>& x, std::vector<double>& out) const {
    const std::size_t m = edges();
    for (std::size_t i = 0; i < n; ++i) out[i] = -x[m + i];
    for (std::size_t e = 0; e < m; ++e) {
      const double v = x[e] * scale[e] * gap[e];
      out[ei[e]] += v;
      out[ej[e]] -= v;
    }
  }

  // out = K^T y
  void apply_adjoint(const std::vector<double>& y, std::vector<double>& out) const {
    const std::size_t m = edges();
    for (std::size_t e = 0; e < m; ++e) out[e] = scale[e] * gap[e] * (y[ei[e]] - y[ej[e]]);
    for (std::size_t i = 0; i < n; ++i) out[m + i] = -y[i];
  }
};

double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double operator_norm(const EdgeOperator& k) {
  const std::size_t dim = k.edges() + k.n;
  std::vector<double> x(dim), kx(k.n), ktkx(dim);
  for (std::size_t i = 0; i < dim; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  double est = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const double nx = norm2(x);
    for (double& v : x) v /= nx;
    k.apply(x, kx);
    k.apply_adjoint(kx, ktkx);
    const double next = std::sqrt(norm2(ktkx));
    x.swap(ktkx);
    if (std::abs(next - est) <= 1e-12 * next) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

// Projection of z onto {x >= 0, d^T x >= t}.
void project_weights(std::vector<double>& z, std::size_t m, const std::vector<double>& d,
                     std::optional<double> t) {
  auto mass = [&](double theta) {
    double s = 0.0;
    for (std::size_t e = 0; e < m; ++e) s += d[e] * std::max(z[e] + theta * d[e], 0.0);
    return s;
  };
  double theta = 0.0;
  if (t && mass(0.0) < *t) {
    double lo = 0.0, hi = 1.0;
    while (mass(hi) < *t) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (mass(mid) < *t ? lo : hi) = mid;
    }
    theta = hi;
  }
  for (std::size_t e = 0; e < m; ++e) z[e] = std::max(z[e] + theta * d[e], 0.0);
}

double residual_norm(const std::vector<double>& r, ResidualNorm norm) {
  if (norm == ResidualNorm::kL2) return norm2(r);
  double acc = 0.0;
  for (double x : r) acc += std::abs(x);
  return acc;
}

}  // namespace

SynthesisResult solve_synthesis(const SynthesisProblem& problem) {
  problem.validate();
  const auto& sigma = problem.observable.sigma();
  const std::size_t n = sigma.size();
  const std::size_t n_star = problem.observable.n_star();

  EdgeOperator k;
  k.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      k.ei.push_back(i);
      k.ej.push_back(j);
      const double g = sigma[j] - sigma[i];
      k.gap.push_back(g);
      k.scale.push_back(g == 0.0 ? 1.0 : 1.0 / (std::sqrt(2.0) * std::abs(g)));
    }
  }
  const std::size_t m = k.edges();
  const std::size_t dim = m + n;

  std::vector<double> lo(n, -std::numeric_limits<double>::infinity()), hi(n, -problem.gamma1);
  lo[n_star] = problem.gamma2;
  hi[n_star] = std::numeric_limits<double>::infinity();

  // Tr(R) = -2 sum w <= beta  <=>  sum_e d_e x_e >= -beta / 2.
  std::optional<double> mass_floor;
  if (problem.trace_bound) mass_floor = -*problem.trace_bound / 2.0;

  std::vector<double> cost(dim, 0.0);
  for (std::size_t e = 0; e < m; ++e) cost[e] = 2.0 * problem.alpha2 * k.scale[e];

  const double step = kStepSafety / operator_norm(k);
  std::vector<double> x(dim, 0.0), y(n, 0.0), xn(dim), yn(n), kty(dim), extrap(dim), kx(n);

  long iter = 0;
  double change = std::numeric_limits<double>::infinity();
  for (; iter < kMaxIterations; ++iter) {
    k.apply_adjoint(y, kty);
    for (std::size_t i = 0; i < dim; ++i) xn[i] = x[i] - step * (kty[i] + cost[i]);
    project_weights(xn, m, k.scale, mass_floor);
    for (std::size_t i = 0; i < n; ++i) xn[m + i] = std::clamp(xn[m + i], lo[i], hi[i]);

    for (std::size_t i = 0; i < dim; ++i) extrap[i] = 2.0 * xn[i] - x[i];
    k.apply(extrap, kx);
    for (std::size_t i = 0; i < n; ++i) yn[i] = y[i] + step * kx[i];
    if (problem.norm == ResidualNorm::kL2) {
      const double ny = norm2(yn);
      if (ny > problem.alpha1) {
        for (double& v : yn) v *= problem.alpha1 / ny;
      }
    } else {
      for (double& v : yn) v = std::clamp(v, -problem.alpha1, problem.alpha1);
    }

    double dx = 0.0, dy = 0.0;
    for (std::size_t i = 0; i < dim; ++i) dx += (xn[i] - x[i]) * (xn[i] - x[i]);
    for (std::size_t i = 0; i < n; ++i) dy += (yn[i] - y[i]) * (yn[i] - y[i]);
    change = std::sqrt(dx) + std::sqrt(dy);
    x.swap(xn);
    y.swap(yn);
    if (change <= kStopTol * std::max(1.0, norm2(x))) {
      ++iter;
      break;
    }
  }
  if (iter >= kMaxIterations && change > kBudgetTol * std::max(1.0, norm2(x))) {
    std::ostringstream os;
    os << "synthesis solver did not converge in " << kMaxIterations << " iterations (last change " << change
       << ")";
    throw NoFeasiblePoint(os.str(), iter);
  }

  std::vector<double> w(m), lambda(n);
  for (std::size_t e = 0; e < m; ++e) w[e] = x[e] * k.scale[e];
  for (std::size_t i = 0; i < n; ++i) lambda[i] = x[m + i];

  // Shrink (w, lambda) toward the box boundary; every term of the objective
  // scales linearly, so any t < 1 that keeps lambda in its box is no worse.
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t = std::max(t, i == n_star ? problem.gamma2 / lambda[i] : problem.gamma1 / -lambda[i]);
  }
  if (mass_floor) {
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    if (total > 0.0) t = std::max(t, *mass_floor / total);
  }
  if (t > 0.0 && t < 1.0) {
    for (double& v : w) v *= t;
    for (std::size_t i = 0; i < n; ++i) {
      lambda[i] = std::clamp(lambda[i] * t, lo[i], hi[i]);
    }
  }

  ConnectivityMatrix r = ConnectivityMatrix::from_edge_weights(n, w);
  std::vector<double> lambda_tilde = r.apply(sigma);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = lambda_tilde[i] - lambda[i];
  const double residual = residual_norm(diff, problem.norm);
  const double objective = problem.alpha1 * residual + problem.alpha2 * r.l1_norm();
  LambdaCheck check = verify_lambda(lambda_tilde, n_star);
  const bool feasible = check.ok;
  return SynthesisResult{std::move(r),   std::move(lambda), std::move(lambda_tilde), residual,
                         objective,      iter,              feasible,                std::move(check)};
}

}  // namespace qnd
