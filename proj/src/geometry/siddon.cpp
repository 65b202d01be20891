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
#include <limits>
#include <stdexcept>
#include <string>

#include "xct/geometry.hpp"

namespace xct {
namespace {

// Direction components below this are treated as exactly parallel to an axis
// (cos(pi/2) evaluates to ~6e-17, not 0).
constexpr double kParallelEps = 1e-12;
// Segments shorter than this fraction of a voxel are dropped (corner grazing).
constexpr double kMinSegment = 1e-12;

struct Ray {
  double px, pz;  // point at t = 0
  double dx, dz;  // unit direction
};

Ray MakeRay(const ScanGeometry& g, int angle_index, int detector_col) {
  if (angle_index < 0 || angle_index >= g.num_angles) {
    throw std::out_of_range("angle index " + std::to_string(angle_index) + " outside [0, " +
                            std::to_string(g.num_angles) + ")");
  }
  if (detector_col < 0 || detector_col >= g.num_detector_cols) {
    throw std::out_of_range("detector column " + std::to_string(detector_col) + " outside [0, " +
                            std::to_string(g.num_detector_cols) + ")");
  }
  const double theta = g.angles[static_cast<std::size_t>(angle_index)];
  double c = std::cos(theta);
  double s = std::sin(theta);
  if (std::abs(c) < kParallelEps) c = 0.0;
  if (std::abs(s) < kParallelEps) s = 0.0;
  const double offset = (detector_col - (g.num_detector_cols - 1) / 2.0) * g.detector_pitch;
  return Ray{-offset * s, offset * c, c, s};
}

// Parametric interval [t_enter, t_exit] of the ray inside the grid square.
// Returns false when the ray misses it.
bool ClipToGrid(const Ray& ray, double half_extent, double* t_enter, double* t_exit) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  const double p[2] = {ray.px, ray.pz};
  const double d[2] = {ray.dx, ray.dz};
  for (int axis = 0; axis < 2; ++axis) {
    if (d[axis] == 0.0) {
      // Voxels are half-open [lo, hi): a ray on the far boundary misses.
      if (p[axis] < -half_extent || p[axis] >= half_extent) return false;
      continue;
    }
    const double t1 = (-half_extent - p[axis]) / d[axis];
    const double t2 = (half_extent - p[axis]) / d[axis];
    lo = std::max(lo, std::min(t1, t2));
    hi = std::min(hi, std::max(t1, t2));
  }
  *t_enter = lo;
  *t_exit = hi;
  return hi > lo;
}

// Parameters where the ray crosses interior planes of one axis, increasing.
void PlaneCrossings(double p, double d, int n, double voxel, double half_extent, double t_enter,
                    double t_exit, std::vector<double>* out) {
  out->clear();
  if (d == 0.0) return;
  out->reserve(static_cast<std::size_t>(n));
  for (int k = 1; k < n; ++k) {
    const double t = (-half_extent + k * voxel - p) / d;
    if (t > t_enter && t < t_exit) out->push_back(t);
  }
  if (d < 0.0) std::reverse(out->begin(), out->end());
}

int VoxelCoord(double position, double half_extent, double voxel, int n) {
  const int i = static_cast<int>(std::floor((position + half_extent) / voxel));
  return std::clamp(i, 0, n - 1);
}

}  // namespace

RaySegmentList TraceRay(const ScanGeometry& g, int angle_index, int detector_col) {
  const Ray ray = MakeRay(g, angle_index, detector_col);
  const int n = g.grid_n;
  const double voxel = g.voxel_size;
  const double half_extent = 0.5 * n * voxel;
  RaySegmentList segments;
  double t_enter = 0.0;
  double t_exit = 0.0;
  if (!ClipToGrid(ray, half_extent, &t_enter, &t_exit)) return segments;

  std::vector<double> tx;
  std::vector<double> tz;
  PlaneCrossings(ray.px, ray.dx, n, voxel, half_extent, t_enter, t_exit, &tx);
  PlaneCrossings(ray.pz, ray.dz, n, voxel, half_extent, t_enter, t_exit, &tz);
  std::vector<double> alphas;
  alphas.reserve(tx.size() + tz.size() + 2);
  alphas.push_back(t_enter);
  std::merge(tx.begin(), tx.end(), tz.begin(), tz.end(), std::back_inserter(alphas));
  alphas.push_back(t_exit);

  segments.reserve(alphas.size());
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
    const double length = alphas[i + 1] - alphas[i];
    if (length < kMinSegment * voxel) continue;
    const double mid = 0.5 * (alphas[i] + alphas[i + 1]);
    const int ix = VoxelCoord(ray.px + mid * ray.dx, half_extent, voxel, n);
    const int iz = VoxelCoord(ray.pz + mid * ray.dz, half_extent, voxel, n);
    segments.push_back({static_cast<std::uint32_t>(iz * n + ix), length});
  }
  return segments;
}

double ChordLength(const ScanGeometry& g, int angle_index, int detector_col) {
  const Ray ray = MakeRay(g, angle_index, detector_col);
  double t_enter = 0.0;
  double t_exit = 0.0;
  if (!ClipToGrid(ray, 0.5 * g.grid_n * g.voxel_size, &t_enter, &t_exit)) return 0.0;
  return t_exit - t_enter;
}

}  // namespace xct
