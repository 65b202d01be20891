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

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include "xct/cli.hpp"
#include "xct/engine.hpp"
#include "xct/matrixstore.hpp"

namespace xct {

double EstimateNnzPerSlice(const ScanGeometry& geometry, std::size_t max_samples) {
  const std::size_t rays = geometry.rays_per_slice();
  if (rays == 0 || max_samples == 0) return 0.0;
  const std::size_t samples = std::min(rays, max_samples);
  const auto n = static_cast<std::size_t>(geometry.num_detector_cols);
  double total = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t r = i * rays / samples;
    total += static_cast<double>(
        TraceRay(geometry, static_cast<int>(r / n), static_cast<int>(r % n)).size());
  }
  return total / static_cast<double>(samples) * static_cast<double>(rays);
}

MemoryEstimate EstimateProcessMemory(const ScanGeometry& geometry, double nnz_per_slice, int pd,
                                     int ffactor, Precision precision) {
  if (pd < 1) throw std::invalid_argument("P_d must be positive");
  const double p = pd;
  const double voxels = static_cast<double>(geometry.voxels_per_slice());
  const double rays = static_cast<double>(geometry.rays_per_slice());
  MemoryEstimate m;
  m.nnz_per_slice = nnz_per_slice;
  m.matrix_bytes = 2.0 * nnz_per_slice / p * static_cast<double>(EntryBytes(precision));
  // Owned elements of both planes plus the footprints of a compact subdomain,
  // which cover about one detector strip per angle.
  const double elements = voxels / p + rays / p + rays / std::sqrt(p) + voxels / std::sqrt(p);
  m.vector_bytes = 2.0 * ffactor * static_cast<double>(StorageBytes(precision)) * elements;
  m.staging_bytes = static_cast<double>(kDefaultStageCapacityBytes);
  return m;
}

int AutoDataProcesses(const ScanGeometry& geometry, double nnz_per_slice, int ffactor,
                      Precision precision, double cap_bytes) {
  for (int pd = 1; pd <= (1 << 24); ++pd) {
    if (EstimateProcessMemory(geometry, nnz_per_slice, pd, ffactor, precision).total() <=
        cap_bytes) {
      return pd;
    }
  }
  throw std::invalid_argument("no data partitioning fits the memory cap");
}

double ParseByteSize(const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad byte size '" + text + "'");
  }
  std::string unit = text.substr(used);
  for (char& c : unit) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  double scale = 1.0;
  if (unit.empty() || unit == "B") {
    scale = 1.0;
  } else if (unit == "K" || unit == "KB") {
    scale = 1e3;
  } else if (unit == "M" || unit == "MB") {
    scale = 1e6;
  } else if (unit == "G" || unit == "GB") {
    scale = 1e9;
  } else if (unit == "T" || unit == "TB") {
    scale = 1e12;
  } else if (unit == "KIB") {
    scale = 1024.0;
  } else if (unit == "MIB") {
    scale = 1024.0 * 1024.0;
  } else if (unit == "GIB") {
    scale = 1024.0 * 1024.0 * 1024.0;
  } else {
    throw std::invalid_argument("bad byte size unit in '" + text + "'");
  }
  if (!(value > 0.0)) throw std::invalid_argument("byte size must be positive: '" + text + "'");
  return value * scale;
}

}  // namespace xct
