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

#ifndef XCT_GEOMETRY_HPP_
#define XCT_GEOMETRY_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "xct/precision.hpp"
#include "xct/sparse.hpp"

namespace xct {

inline constexpr double kPi = 3.14159265358979323846;

// Parallel-beam scan. The slice grid is grid_n x grid_n voxels centered on the
// rotation axis; detector columns are spaced one voxel apart and rays pass
// through column centers. Rows (slices) are stacked along the rotation axis.
struct ScanGeometry {
  int num_angles = 0;         // K
  std::vector<double> angles; // radians, strictly increasing in [0, pi)
  int num_rows = 0;           // M, slices
  int num_detector_cols = 0;  // N
  int grid_n = 0;             // == N
  double voxel_size = 1.0;
  double detector_pitch = 1.0;

  std::size_t rays_per_slice() const {
    return static_cast<std::size_t>(num_angles) * static_cast<std::size_t>(num_detector_cols);
  }
  std::size_t voxels_per_slice() const {
    return static_cast<std::size_t>(grid_n) * static_cast<std::size_t>(grid_n);
  }
};

// K equally spaced angles in [angle_start, angle_end). Cheap: suitable for
// metadata-only geometries used by the planner.
ScanGeometry MakeGeometry(int num_angles, int num_rows, int num_cols,
                          double angle_start, double angle_end, double voxel_size = 1.0);

// Geometry from an explicit angle list.
ScanGeometry MakeGeometryFromAngles(std::vector<double> angles, int num_rows, int num_cols,
                                    double voxel_size = 1.0);

struct RaySegment {
  std::uint32_t voxel;  // iz * grid_n + ix
  double length;
};
using RaySegmentList = std::vector<RaySegment>;

// Siddon traversal of one ray. At angle 0 rays run along +x; detector column c
// sits at offset (c - (N-1)/2) * pitch along the (-sin, cos) normal.
RaySegmentList TraceRay(const ScanGeometry& geometry, int angle_index, int detector_col);

// Length of the ray's chord through the grid's bounding square.
double ChordLength(const ScanGeometry& geometry, int angle_index, int detector_col);

// Row r = angle_index * N + detector_col holds TraceRay output verbatim.
using SystemMatrix = CsrMatrix;
SystemMatrix BuildSystemMatrix(const ScanGeometry& geometry, int workers = 1);

// Memoizes the system matrix of one geometry; it is traced once and reused for
// every slice and iteration.
class SystemMatrixCache {
 public:
  explicit SystemMatrixCache(ScanGeometry geometry, int workers = 1)
      : geometry_(std::move(geometry)), workers_(workers) {}

  const SystemMatrix& Get();
  int builds() const { return builds_; }
  const ScanGeometry& geometry() const { return geometry_; }

 private:
  ScanGeometry geometry_;
  int workers_;
  bool built_ = false;
  int builds_ = 0;
  SystemMatrix matrix_;
};

enum class VolumeRole : std::uint8_t { kTomogram = 0, kSinogram = 1 };
enum class DType : std::uint8_t { kDouble = 0, kSingle = 1, kHalf = 2 };

std::size_t DTypeBytes(DType d);
std::string_view DTypeName(DType d);
DType ParseDType(std::string_view name);

// Dense stack of 2D planes. Tomograms are (slices, grid_n, grid_n); sinograms
// are (slices, angles, detector cols). Values are kept as doubles that are
// exactly representable in the tagged dtype.
struct Volume {
  std::array<std::size_t, 3> shape{0, 0, 0};
  DType dtype = DType::kDouble;
  VolumeRole role = VolumeRole::kTomogram;
  std::vector<double> values;

  Volume() = default;
  Volume(VolumeRole r, std::size_t slices, std::size_t rows, std::size_t cols,
         DType d = DType::kDouble);

  std::size_t slices() const { return shape[0]; }
  std::size_t plane_size() const { return shape[1] * shape[2]; }
  std::span<double> slice(std::size_t k) { return {values.data() + k * plane_size(), plane_size()}; }
  std::span<const double> slice(std::size_t k) const {
    return {values.data() + k * plane_size(), plane_size()};
  }

  // Rounds every value to the dtype. Throws on non-finite values.
  void Quantize();
  void Validate() const;
};

enum class PhantomKind { kUniformDisk, kSheppLogan, kRandomBlobs };
PhantomKind ParsePhantomKind(std::string_view name);
std::string_view PhantomKindName(PhantomKind kind);

// Values in [0, 1], zero outside the inscribed circle. Only kRandomBlobs uses
// the seed; its slices differ from each other.
Volume GeneratePhantom(PhantomKind kind, int grid_n, int num_slices, std::uint64_t seed = 0);

// y = A x per slice plus N(0, (noise_sigma * max(Ax))^2) noise.
Volume SimulateMeasurements(const ScanGeometry& geometry, const SystemMatrix& a,
                            const Volume& tomogram, double noise_sigma, std::uint64_t seed);

}  // namespace xct

#endif  // XCT_GEOMETRY_HPP_
