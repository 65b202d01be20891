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

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "xct/geometry.hpp"
#include "xct/parallel.hpp"

namespace xct {

SystemMatrix BuildSystemMatrix(const ScanGeometry& g, int workers) {
  const auto num_angles = static_cast<std::size_t>(g.num_angles);
  const int cols = g.num_detector_cols;
  // Angles are traced independently, then concatenated in row order.
  std::vector<std::vector<RaySegmentList>> per_angle(num_angles);
  ParallelFor(workers, num_angles, [&](std::size_t a) {
    auto& rays = per_angle[a];
    rays.resize(static_cast<std::size_t>(cols));
    for (int c = 0; c < cols; ++c) {
      rays[static_cast<std::size_t>(c)] = TraceRay(g, static_cast<int>(a), c);
    }
  });

  SystemMatrix m;
  m.num_rows = g.rays_per_slice();
  m.num_cols = g.voxels_per_slice();
  m.row_ptr.assign(m.num_rows + 1, 0);
  std::size_t r = 0;
  for (const auto& rays : per_angle) {
    for (const auto& ray : rays) {
      m.row_ptr[r + 1] = m.row_ptr[r] + ray.size();
      ++r;
    }
  }
  m.col.reserve(m.row_ptr.back());
  m.val.reserve(m.row_ptr.back());
  for (const auto& rays : per_angle) {
    for (const auto& ray : rays) {
      for (const auto& seg : ray) {
        m.col.push_back(seg.voxel);
        m.val.push_back(seg.length);
      }
    }
  }
  return m;
}

const SystemMatrix& SystemMatrixCache::Get() {
  if (!built_) {
    matrix_ = BuildSystemMatrix(geometry_, workers_);
    built_ = true;
    ++builds_;
  }
  return matrix_;
}

Volume SimulateMeasurements(const ScanGeometry& g, const SystemMatrix& a, const Volume& tomogram,
                            double noise_sigma, std::uint64_t seed) {
  if (tomogram.plane_size() != a.num_cols) {
    throw std::invalid_argument("tomogram slice has " + std::to_string(tomogram.plane_size()) +
                                " voxels but the system matrix expects " +
                                std::to_string(a.num_cols));
  }
  if (a.num_rows != g.rays_per_slice()) {
    throw std::invalid_argument("system matrix rows do not match the geometry");
  }
  if (noise_sigma < 0.0 || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("noise sigma must be a finite non-negative number");
  }
  const std::size_t slices = tomogram.slices();
  Volume sino(VolumeRole::kSinogram, slices, static_cast<std::size_t>(g.num_angles),
              static_cast<std::size_t>(g.num_detector_cols));
  double peak = 0.0;
  for (std::size_t k = 0; k < slices; ++k) {
    const auto x = tomogram.slice(k);
    auto y = sino.slice(k);
    for (std::size_t r = 0; r < a.num_rows; ++r) {
      double acc = 0.0;
      for (std::size_t e = a.row_ptr[r]; e < a.row_ptr[r + 1]; ++e) acc += a.val[e] * x[a.col[e]];
      y[r] = acc;
      peak = std::max(peak, std::abs(acc));
    }
  }
  if (noise_sigma > 0.0 && peak > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sigma * peak);
    for (double& v : sino.values) v += noise(rng);
  }
  return sino;
}

}  // namespace xct
