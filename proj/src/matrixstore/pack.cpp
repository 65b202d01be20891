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
#include <string>

#include "xct/matrixstore.hpp"

namespace xct {

PackResult Pack(std::span<const std::uint32_t> indices, std::span<const double> lengths) {
  if (indices.size() != lengths.size()) {
    throw std::invalid_argument("pack: index and length arrays differ in size");
  }
  PackResult out;
  out.entries.resize(indices.size());
  out.report.count = indices.size();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= kMaxStageElements) {
      throw StageSplitRequired("stage-local index " + std::to_string(indices[i]) +
                               " does not fit 16 bits; split the stage further");
    }
    const double len = lengths[i];
    Half h(len);
    if (len != 0.0 && std::abs(len) < kHalfMinSubnormal) {
      ++out.report.underflows;
      h = Half(std::copysign(kHalfMinSubnormal, len));
    } else if (std::abs(len) < kHalfMinNormal && len != 0.0) {
      ++out.report.subnormals;
    }
    if (len != 0.0) {
      const double err = std::abs(h.ToDouble() - len) / std::abs(len);
      out.report.max_rel_error = std::max(out.report.max_rel_error, err);
    }
    out.entries[i] = PackedEntry{static_cast<std::uint16_t>(indices[i]), h};
  }
  return out;
}

void Unpack(std::span<const PackedEntry> entries, std::vector<std::uint32_t>* indices,
            std::vector<double>* lengths) {
  indices->resize(entries.size());
  lengths->resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    (*indices)[i] = entries[i].index;
    (*lengths)[i] = entries[i].length.ToDouble();
  }
}

double RescaleForHalf(CsrMatrix* m) {
  if (m->val.empty()) return 1.0;
  std::vector<double> sorted = m->val;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  const double median = *mid;
  if (!(median > 0.0) || !std::isfinite(median)) {
    throw std::invalid_argument("cannot rescale a matrix whose median length is not positive");
  }
  const double scale = 1.0 / median;
  for (double& v : m->val) v *= scale;
  return scale;
}

}  // namespace xct
