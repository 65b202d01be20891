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

#include <stdexcept>
#include <string>

#include "xct/hilbert.hpp"

namespace xct {

Footprint ComputeFootprint(const Subdomain& subdomain, const SystemMatrix& a,
                           Direction direction) {
  Footprint fp;
  fp.source = subdomain.id;
  if (direction == Direction::kProjection) {
    if (subdomain.domain != Domain::kTomogram) {
      throw std::invalid_argument("projection footprints start from a tomogram subdomain");
    }
    fp.target = Domain::kSinogram;
    std::vector<char> in_subdomain(a.num_cols, 0);
    for (auto e : subdomain.elements) {
      if (e >= a.num_cols) {
        throw std::invalid_argument("subdomain element " + std::to_string(e) +
                                    " exceeds the matrix column count " +
                                    std::to_string(a.num_cols));
      }
      in_subdomain[e] = 1;
    }
    for (std::size_t r = 0; r < a.num_rows; ++r) {
      for (auto c : a.row_cols(r)) {
        if (in_subdomain[c]) {
          fp.elements.push_back(static_cast<std::uint32_t>(r));
          break;
        }
      }
    }
    return fp;
  }

  if (subdomain.domain != Domain::kSinogram) {
    throw std::invalid_argument("backprojection footprints start from a sinogram subdomain");
  }
  fp.target = Domain::kTomogram;
  std::vector<char> touched(a.num_cols, 0);
  for (auto r : subdomain.elements) {
    if (r >= a.num_rows) {
      throw std::invalid_argument("subdomain element " + std::to_string(r) +
                                  " exceeds the matrix row count " + std::to_string(a.num_rows));
    }
    for (auto c : a.row_cols(r)) touched[c] = 1;
  }
  for (std::size_t c = 0; c < a.num_cols; ++c) {
    if (touched[c]) fp.elements.push_back(static_cast<std::uint32_t>(c));
  }
  return fp;
}

}  // namespace xct
