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
#include <stdexcept>
#include <string>

#include "xct/geometry.hpp"

namespace xct {
namespace {

void CheckDimensions(int num_angles, int num_rows, int num_cols) {
  if (num_angles < 1 || num_rows < 1 || num_cols < 1) {
    throw std::invalid_argument("geometry dimensions must be positive (K=" +
                                std::to_string(num_angles) + ", M=" + std::to_string(num_rows) +
                                ", N=" + std::to_string(num_cols) + ")");
  }
}

}  // namespace

ScanGeometry MakeGeometry(int num_angles, int num_rows, int num_cols, double angle_start,
                          double angle_end, double voxel_size) {
  CheckDimensions(num_angles, num_rows, num_cols);
  if (!(angle_start < angle_end)) {
    throw std::invalid_argument("inverted angle range: start must be below end");
  }
  if (angle_start < 0.0 || angle_end > kPi * (1.0 + 1e-12)) {
    throw std::invalid_argument("angle range must lie within [0, pi]");
  }
  std::vector<double> angles(static_cast<std::size_t>(num_angles));
  const double step = (angle_end - angle_start) / num_angles;
  for (int k = 0; k < num_angles; ++k) angles[static_cast<std::size_t>(k)] = angle_start + k * step;
  return MakeGeometryFromAngles(std::move(angles), num_rows, num_cols, voxel_size);
}

ScanGeometry MakeGeometryFromAngles(std::vector<double> angles, int num_rows, int num_cols,
                                    double voxel_size) {
  CheckDimensions(static_cast<int>(angles.size()), num_rows, num_cols);
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw std::invalid_argument("voxel size must be positive");
  }
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (!(angles[k] >= 0.0 && angles[k] < kPi)) {
      throw std::invalid_argument("angle " + std::to_string(k) + " outside [0, pi)");
    }
    if (k > 0 && !(angles[k] > angles[k - 1])) {
      throw std::invalid_argument("angles must be strictly increasing");
    }
  }
  ScanGeometry g;
  g.num_angles = static_cast<int>(angles.size());
  g.angles = std::move(angles);
  g.num_rows = num_rows;
  g.num_detector_cols = num_cols;
  g.grid_n = num_cols;
  g.voxel_size = voxel_size;
  g.detector_pitch = voxel_size;
  return g;
}

std::size_t DTypeBytes(DType d) {
  switch (d) {
    case DType::kDouble: return 8;
    case DType::kSingle: return 4;
    case DType::kHalf: return 2;
  }
  return 8;
}

std::string_view DTypeName(DType d) {
  switch (d) {
    case DType::kDouble: return "double";
    case DType::kSingle: return "single";
    case DType::kHalf: return "half";
  }
  return "unknown";
}

DType ParseDType(std::string_view name) {
  if (name == "double") return DType::kDouble;
  if (name == "single") return DType::kSingle;
  if (name == "half") return DType::kHalf;
  throw std::invalid_argument("unknown dtype '" + std::string(name) + "'");
}

Volume::Volume(VolumeRole r, std::size_t slices, std::size_t rows, std::size_t cols, DType d)
    : shape{slices, rows, cols}, dtype(d), role(r), values(slices * rows * cols, 0.0) {}

void Volume::Quantize() {
  for (double& v : values) {
    switch (dtype) {
      case DType::kDouble: break;
      case DType::kSingle: v = RoundToSingle(v); break;
      case DType::kHalf: v = RoundToHalf(v); break;
    }
  }
  Validate();
}

void Volume::Validate() const {
  if (values.size() != shape[0] * shape[1] * shape[2]) {
    throw std::invalid_argument("volume payload length does not match its shape");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("volume holds a non-finite value");
  }
}

}  // namespace xct
