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
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "xct/geometry.hpp"

namespace xct {
namespace {

struct Ellipse {
  double intensity;
  double semi_x, semi_z;
  double center_x, center_z;
  double tilt_deg;
};

// Modified Shepp-Logan (Toft) on [-1, 1]^2.
constexpr std::array<Ellipse, 10> kSheppLogan = {{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

// Voxel center in normalized [-1, 1] coordinates.
double Normalized(int i, int n) { return (2.0 * i + 1.0) / n - 1.0; }

bool InsideCircle(double x, double z) { return x * x + z * z <= 1.0; }

void FillSheppLogan(std::span<double> plane, int n) {
  for (int iz = 0; iz < n; ++iz) {
    for (int ix = 0; ix < n; ++ix) {
      const double x = Normalized(ix, n);
      const double z = Normalized(iz, n);
      double v = 0.0;
      for (const auto& e : kSheppLogan) {
        const double phi = e.tilt_deg * kPi / 180.0;
        const double u = (x - e.center_x) * std::cos(phi) + (z - e.center_z) * std::sin(phi);
        const double w = -(x - e.center_x) * std::sin(phi) + (z - e.center_z) * std::cos(phi);
        if ((u * u) / (e.semi_x * e.semi_x) + (w * w) / (e.semi_z * e.semi_z) <= 1.0) {
          v += e.intensity;
        }
      }
      plane[static_cast<std::size_t>(iz * n + ix)] = std::clamp(v, 0.0, 1.0);
    }
  }
}

void FillBlobs(std::span<double> plane, int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count_dist(4, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int count = count_dist(rng);
  std::fill(plane.begin(), plane.end(), 0.0);
  for (int b = 0; b < count; ++b) {
    const double radius = 0.7 * std::sqrt(unit(rng));
    const double angle = 2.0 * kPi * unit(rng);
    const double cx = radius * std::cos(angle);
    const double cz = radius * std::sin(angle);
    const double sigma = 0.06 + 0.14 * unit(rng);
    const double amplitude = 0.3 + 0.7 * unit(rng);
    for (int iz = 0; iz < n; ++iz) {
      for (int ix = 0; ix < n; ++ix) {
        const double dx = Normalized(ix, n) - cx;
        const double dz = Normalized(iz, n) - cz;
        plane[static_cast<std::size_t>(iz * n + ix)] +=
            amplitude * std::exp(-(dx * dx + dz * dz) / (2.0 * sigma * sigma));
      }
    }
  }
  const double peak = *std::max_element(plane.begin(), plane.end());
  if (peak > 0.0) {
    for (double& v : plane) v /= peak;
  }
}

}  // namespace

PhantomKind ParsePhantomKind(std::string_view name) {
  if (name == "uniform-disk") return PhantomKind::kUniformDisk;
  if (name == "shepp-logan-like") return PhantomKind::kSheppLogan;
  if (name == "random-blobs") return PhantomKind::kRandomBlobs;
  throw std::invalid_argument("unknown phantom kind '" + std::string(name) +
                              "' (expected uniform-disk|shepp-logan-like|random-blobs)");
}

std::string_view PhantomKindName(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::kUniformDisk: return "uniform-disk";
    case PhantomKind::kSheppLogan: return "shepp-logan-like";
    case PhantomKind::kRandomBlobs: return "random-blobs";
  }
  return "unknown";
}

Volume GeneratePhantom(PhantomKind kind, int grid_n, int num_slices, std::uint64_t seed) {
  if (grid_n < 1 || num_slices < 1) {
    throw std::invalid_argument("phantom size and slice count must be positive");
  }
  const auto n = static_cast<std::size_t>(grid_n);
  Volume vol(VolumeRole::kTomogram, static_cast<std::size_t>(num_slices), n, n);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < vol.slices(); ++k) {
    auto plane = vol.slice(k);
    switch (kind) {
      case PhantomKind::kUniformDisk:
        std::fill(plane.begin(), plane.end(), 1.0);
        break;
      case PhantomKind::kSheppLogan:
        FillSheppLogan(plane, grid_n);
        break;
      case PhantomKind::kRandomBlobs:
        FillBlobs(plane, grid_n, rng);
        break;
    }
    for (int iz = 0; iz < grid_n; ++iz) {
      for (int ix = 0; ix < grid_n; ++ix) {
        if (!InsideCircle(Normalized(ix, grid_n), Normalized(iz, grid_n))) {
          plane[static_cast<std::size_t>(iz * grid_n + ix)] = 0.0;
        }
      }
    }
  }
  return vol;
}

}  // namespace xct
