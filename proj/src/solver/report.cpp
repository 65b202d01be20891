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
#include <sstream>
#include <stdexcept>

#include "xct/solver.hpp"

namespace xct {

std::string ResidualCurveReport(const std::vector<ModeHistory>& histories) {
  if (histories.empty()) throw std::invalid_argument("residual report needs at least one history");
  std::size_t rows = 0;
  for (const auto& h : histories) {
    if (h.residual.empty()) {
      throw std::invalid_argument("residual report: history for " + h.mode + " is empty");
    }
    if (!h.time_s.empty() && h.time_s.size() != h.residual.size()) {
      throw std::invalid_argument("residual report: time and residual lengths differ for " +
                                  h.mode);
    }
    rows = std::max(rows, h.residual.size());
  }
  std::ostringstream out;
  out.precision(10);
  out << "iteration";
  for (const auto& h : histories) out << ',' << h.mode << "_residual," << h.mode << "_time_s";
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    out << i + 1;
    for (const auto& h : histories) {
      out << ',';
      if (i < h.residual.size()) out << h.residual[i];
      out << ',';
      if (i < h.time_s.size()) out << h.time_s[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace xct
