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

#include "xct/cli.hpp"

namespace xct {

std::vector<std::uint8_t> EncodePgm16(std::span<const double> plane, std::size_t width,
                                      std::size_t height) {
  if (plane.size() != width * height) throw std::invalid_argument("pgm: plane size mismatch");
  const std::string header =
      "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  double lo = 0.0;
  double hi = 0.0;
  if (!plane.empty()) {
    const auto [mn, mx] = std::minmax_element(plane.begin(), plane.end());
    lo = *mn;
    hi = *mx;
  }
  const double span = hi - lo;
  for (double v : plane) {
    double level = span > 0.0 ? (v - lo) / span * 65535.0 : 0.0;
    const auto sample = static_cast<std::uint16_t>(std::clamp(std::lround(level), 0L, 65535L));
    out.push_back(static_cast<std::uint8_t>(sample >> 8));
    out.push_back(static_cast<std::uint8_t>(sample & 0xFF));
  }
  return out;
}

}  // namespace xct
