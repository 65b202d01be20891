/* Copyright 2026 The XCT Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <chrono>
#include <cmath>
#include <string>

#include "xct/solver.hpp"

namespace xct {

void SolveConfig::Validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (early_stop_iters && (*early_stop_iters < 1 || *early_stop_iters > max_iters)) {
    throw std::invalid_argument("early stop must lie in [1, max_iters]");
  }
  if (ffactor < 1 || ffactor > kMaxFfactor) throw std::invalid_argument("FFACTOR out of range");
  if (pb < 1 || pd < 1) throw std::invalid_argument("P_b and P_d must be positive");
}

bool EarlyStop(const SolveConfig& config, const std::vector<double>& history) {
  if (history.empty()) throw std::invalid_argument("early stop needs a nonempty history");
  if (!config.early_stop_iters) return false;
  return static_cast<int>(history.size()) >= *config.early_stop_iters;
}

namespace {

double SquaredNorm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void CheckFinite(const MultiVector& v, const char* what, int iteration, Precision p) {
  for (double x : v.values) {
    if (!std::isfinite(x)) {
      throw SolverDivergence(std::string("CGLS diverged: non-finite ") + what + " at iteration " +
                             std::to_string(iteration) + " in " +
                             std::string(PrecisionName(p)) + " precision");
    }
  }
}

}  // namespace

SolveResult CglsSolve(LinearOperator& op, const MultiVector& y, const SolveConfig& config) {
  config.Validate();
  if (y.length != op.rows()) {
    throw std::invalid_argument("measurement length " + std::to_string(y.length) +
                                " does not match operator rows " + std::to_string(op.rows()));
  }
  const Precision mode = op.precision();
  CheckFinite(y, "measurement", 0, mode);
  const auto start = std::chrono::steady_clock::now();
  const int slices = y.columns;

  SolveResult res;
  res.x = MultiVector(op.cols(), slices);
  MultiVector r = y;
  MultiVector s = op.ApplyTranspose(r);
  CheckFinite(s, "backprojection", 0, mode);
  MultiVector p = s;
  std::vector<double> gamma(static_cast<std::size_t>(slices));
  double y_norm2 = 0.0;
  for (int f = 0; f < slices; ++f) {
    gamma[static_cast<std::size_t>(f)] = SquaredNorm(s.column(f));
    y_norm2 += SquaredNorm(y.column(f));
  }
  const double y_norm = std::sqrt(y_norm2);

  for (int it = 1; it <= config.max_iters; ++it) {
    bool all_zero = true;
    for (double g : gamma) all_zero = all_zero && g == 0.0;
    if (all_zero) break;

    const MultiVector q = op.Apply(p);
    CheckFinite(q, "projection", it, mode);
    double r_norm2 = 0.0;
    for (int f = 0; f < slices; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      const double qq = SquaredNorm(q.column(f));
      const double alpha = qq > 0.0 ? gamma[fi] / qq : 0.0;
      if (!std::isfinite(alpha)) {
        throw SolverDivergence("CGLS diverged: step length is not finite at iteration " +
                               std::to_string(it) + " in " + std::string(PrecisionName(mode)) +
                               " precision");
      }
      auto xc = res.x.column(f);
      auto rc = r.column(f);
      const auto pc = p.column(f);
      const auto qc = q.column(f);
      for (std::size_t i = 0; i < xc.size(); ++i) xc[i] += alpha * pc[i];
      for (std::size_t i = 0; i < rc.size(); ++i) rc[i] -= alpha * qc[i];
      r_norm2 += SquaredNorm(rc);
    }
    s = op.ApplyTranspose(r);
    CheckFinite(s, "backprojection", it, mode);
    for (int f = 0; f < slices; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      const double g_new = SquaredNorm(s.column(f));
      const double beta = gamma[fi] > 0.0 ? g_new / gamma[fi] : 0.0;
      gamma[fi] = g_new;
      auto pc = p.column(f);
      const auto sc = s.column(f);
      for (std::size_t i = 0; i < pc.size(); ++i) pc[i] = sc[i] + beta * pc[i];
    }
    CheckFinite(res.x, "estimate", it, mode);

    res.residual_history.push_back(y_norm > 0.0 ? std::sqrt(r_norm2) / y_norm : 0.0);
    res.time_history.push_back(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    res.iterations = it;
    if (EarlyStop(config, res.residual_history)) break;
  }
  res.counters = op.counters();
  return res;
}

}  // namespace xct
