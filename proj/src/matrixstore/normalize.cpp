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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "xct/matrixstore.hpp"

namespace xct {

NormalizationState NormalizeInPlace(std::span<double> v, Precision mode) {
  double peak = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("cannot normalize a non-finite vector");
    peak = std::max(peak, std::abs(x));
  }
  NormalizationState state{1.0, mode};
  if (peak > 0.0) state.factor = peak / kNormalizationTarget;
  for (double& x : v) x = QuantizeStorage(x / state.factor, mode);
  return state;
}

std::pair<std::vector<double>, NormalizationState> Normalize(std::span<const double> v,
                                                             Precision mode) {
  std::vector<double> scaled(v.begin(), v.end());
  const NormalizationState state = NormalizeInPlace(scaled, mode);
  return {std::move(scaled), state};
}

void DenormalizeInPlace(std::span<double> v, const NormalizationState& state) {
  for (double& x : v) x *= state.factor;
}

std::vector<double> Denormalize(std::span<const double> v, const NormalizationState& state) {
  std::vector<double> out(v.begin(), v.end());
  DenormalizeInPlace(out, state);
  return out;
}

}  // namespace xct
