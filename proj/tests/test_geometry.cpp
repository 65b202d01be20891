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
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "xct/geometry.hpp"

namespace xct {
namespace {

std::map<std::uint32_t, double> AsMap(const RaySegmentList& segs) {
  std::map<std::uint32_t, double> m;
  for (const auto& s : segs) m[s.voxel] += s.length;
  return m;
}

void ExpectMatchesOracle(const ScanGeometry& g, int a, int c) {
  const auto got = AsMap(TraceRay(g, a, c));
  const auto want = oracle::MarchRay(g, a, c);
  ASSERT_EQ(got.size(), want.size()) << "angle " << a << " col " << c;
  for (const auto& [voxel, len] : want) {
    const auto it = got.find(voxel);
    ASSERT_NE(it, got.end()) << "voxel " << voxel;
    EXPECT_LE(std::abs(it->second - len), 1e-6 * len) << "voxel " << voxel;
  }
}

TEST(MakeGeometry, UniformSpacing) {
  const auto g = MakeGeometry(180, 1, 64, 0.0, kPi);
  ASSERT_EQ(g.angles.size(), 180u);
  EXPECT_EQ(g.grid_n, 64);
  for (int k = 0; k < 180; ++k) EXPECT_NEAR(g.angles[k], k * kPi / 180, 1e-15);
  EXPECT_EQ(g.voxels_per_slice(), 64u * 64u);
  EXPECT_EQ(g.rays_per_slice(), 180u * 64u);
}

TEST(MakeGeometry, DegenerateMinimum) {
  const auto g = MakeGeometry(1, 1, 1, 0.0, kPi);
  ASSERT_EQ(g.angles.size(), 1u);
  EXPECT_EQ(g.angles[0], 0.0);
  EXPECT_EQ(g.grid_n, 1);
  const auto segs = TraceRay(g, 0, 0);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_DOUBLE_EQ(segs[0].length, 1.0);
}

TEST(MakeGeometry, LargeMetadataGeometry) {
  const auto g = MakeGeometry(4500, 9209, 11283, 0.0, kPi);
  EXPECT_EQ(g.num_angles, 4500);
  EXPECT_EQ(g.num_rows, 9209);
  EXPECT_EQ(g.grid_n, 11283);
}

TEST(MakeGeometry, RejectsBadInput) {
  EXPECT_THROW(MakeGeometry(0, 1, 4, 0.0, kPi), std::invalid_argument);
  EXPECT_THROW(MakeGeometry(4, 0, 4, 0.0, kPi), std::invalid_argument);
  EXPECT_THROW(MakeGeometry(4, 1, 0, 0.0, kPi), std::invalid_argument);
  EXPECT_THROW(MakeGeometry(4, 1, 4, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(MakeGeometry(4, 1, 4, 0.0, 4.0), std::invalid_argument);
  EXPECT_THROW(MakeGeometryFromAngles({0.5, 0.2}, 1, 4), std::invalid_argument);
}

TEST(TraceRay, AxisAlignedRow) {
  const auto g = MakeGeometry(1, 1, 4, 0.0, kPi);
  const auto segs = TraceRay(g, 0, 2);
  ASSERT_EQ(segs.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(segs[i].voxel, static_cast<std::uint32_t>(8 + i));
    EXPECT_NEAR(segs[i].length, 1.0, 1e-15);
  }
}

TEST(TraceRay, MissingRayIsEmpty) {
  auto g = MakeGeometry(1, 1, 4, 0.0, kPi);
  g.detector_pitch = 3.0;  // outer columns fall outside the grid
  EXPECT_TRUE(TraceRay(g, 0, 0).empty());
  EXPECT_TRUE(TraceRay(g, 0, 3).empty());
  EXPECT_FALSE(TraceRay(g, 0, 1).empty());
}

TEST(TraceRay, OutOfRange) {
  const auto g = MakeGeometry(2, 1, 4, 0.0, kPi);
  EXPECT_THROW(TraceRay(g, 2, 0), std::out_of_range);
  EXPECT_THROW(TraceRay(g, -1, 0), std::out_of_range);
  EXPECT_THROW(TraceRay(g, 0, 4), std::out_of_range);
}

TEST(TraceRay, DiagonalMatchesRayMarching) {
  const auto g = MakeGeometryFromAngles({kPi / 4}, 1, 8);
  for (int c = 0; c < 8; ++c) ExpectMatchesOracle(g, 0, c);
}

TEST(TraceRay, GenericAnglesMatchRayMarching) {
  const auto g = MakeGeometry(7, 1, 10, 0.1, kPi);
  for (int a = 0; a < 7; ++a) {
    for (int c = 0; c < 10; c += 3) ExpectMatchesOracle(g, a, c);
  }
}

TEST(TraceRay, SegmentInvariants) {
  const auto g = MakeGeometry(48, 1, 32, 0.0, kPi);
  for (int a = 0; a < g.num_angles; ++a) {
    for (int c = 0; c < g.num_detector_cols; ++c) {
      const auto segs = TraceRay(g, a, c);
      std::set<std::uint32_t> seen;
      double sum = 0.0;
      for (const auto& s : segs) {
        EXPECT_LT(s.voxel, g.voxels_per_slice());
        EXPECT_GT(s.length, 0.0);
        EXPECT_TRUE(seen.insert(s.voxel).second);
        sum += s.length;
      }
      EXPECT_LE(sum, g.grid_n * g.voxel_size * std::sqrt(2.0) * (1 + 1e-12));
      const double chord = ChordLength(g, a, c);
      EXPECT_LE(std::abs(sum - chord), 1e-9 * chord);
    }
  }
}

TEST(TraceRay, QuarterTurnRotatesVoxels) {
  const int n = 16;
  for (double theta : {0.0, 0.13, 0.7, kPi / 4, 1.2}) {
    const auto g = MakeGeometryFromAngles({theta, theta + kPi / 2}, 1, n);
    for (int c = 0; c < n; ++c) {
      std::map<std::uint32_t, double> rotated;
      for (const auto& s : TraceRay(g, 0, c)) {
        const int ix = static_cast<int>(s.voxel) % n;
        const int iz = static_cast<int>(s.voxel) / n;
        rotated[static_cast<std::uint32_t>(ix * n + (n - 1 - iz))] = s.length;
      }
      const auto other = AsMap(TraceRay(g, 1, c));
      ASSERT_EQ(rotated.size(), other.size()) << theta << " " << c;
      for (const auto& [v, len] : rotated) {
        ASSERT_TRUE(other.count(v));
        EXPECT_NEAR(other.at(v), len, 1e-12);
      }
    }
  }
}

TEST(TraceRay, DiagonalReflectionTransposesVoxels) {
  const int n = 12;
  for (double theta : {0.0, 0.3, 0.6}) {
    const auto g = MakeGeometryFromAngles({theta, kPi / 2 - theta}, 1, n);
    for (int c = 0; c < n; ++c) {
      std::map<std::uint32_t, double> transposed;
      for (const auto& s : TraceRay(g, 0, c)) {
        const int ix = static_cast<int>(s.voxel) % n;
        const int iz = static_cast<int>(s.voxel) / n;
        transposed[static_cast<std::uint32_t>(ix * n + iz)] = s.length;
      }
      const auto other = AsMap(TraceRay(g, 1, n - 1 - c));
      ASSERT_EQ(transposed.size(), other.size());
      for (const auto& [v, len] : transposed) {
        ASSERT_TRUE(other.count(v));
        EXPECT_NEAR(other.at(v), len, 1e-12);
      }
    }
  }
}

TEST(SystemMatrix, TwoByTwoAtAngleZero) {
  const auto g = MakeGeometry(1, 1, 2, 0.0, kPi);
  const auto a = BuildSystemMatrix(g);
  ASSERT_EQ(a.num_rows, 2u);
  ASSERT_EQ(a.num_cols, 4u);
  const std::vector<double> dense = ToDense(a);
  const std::vector<double> want = {1, 1, 0, 0, 0, 0, 1, 1};
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(dense[i], want[i], 1e-15);

  auto scaled = MakeGeometry(1, 1, 2, 0.0, kPi, 2.5);
  const auto b = BuildSystemMatrix(scaled);
  const auto db = ToDense(b);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(db[i], 2.5 * want[i], 1e-14);
}

TEST(SystemMatrix, ShapeAndRowsEqualTraces) {
  const auto g = MakeGeometry(48, 1, 32, 0.0, kPi);
  const auto a = BuildSystemMatrix(g, 3);
  EXPECT_EQ(a.num_rows, 1536u);
  EXPECT_EQ(a.num_cols, 1024u);
  a.Validate();
  for (int k = 0; k < 48; ++k) {
    for (int c = 0; c < 32; ++c) {
      const auto segs = TraceRay(g, k, c);
      const std::size_t r = static_cast<std::size_t>(k) * 32 + c;
      ASSERT_EQ(a.row_size(r), segs.size());
      for (std::size_t i = 0; i < segs.size(); ++i) {
        EXPECT_EQ(a.row_cols(r)[i], segs[i].voxel);
        EXPECT_EQ(a.row_vals(r)[i], segs[i].length);
      }
    }
  }
}

TEST(SystemMatrix, WorkerCountDoesNotChangeResult) {
  const auto g = MakeGeometry(30, 1, 24, 0.0, kPi);
  const auto a1 = BuildSystemMatrix(g, 1);
  const auto a4 = BuildSystemMatrix(g, 4);
  EXPECT_EQ(a1.row_ptr, a4.row_ptr);
  EXPECT_EQ(a1.col, a4.col);
  EXPECT_EQ(a1.val, a4.val);
}

TEST(SystemMatrix, NnzGrowsCubically) {
  const auto small = BuildSystemMatrix(MakeGeometry(48, 1, 32, 0.0, kPi));
  const auto large = BuildSystemMatrix(MakeGeometry(96, 1, 64, 0.0, kPi));
  const double ratio = static_cast<double>(large.nnz()) / static_cast<double>(small.nnz());
  EXPECT_NEAR(ratio, 8.0, 8.0 * 0.15);
}

TEST(SystemMatrix, NnzAddsOverAngleSets) {
  const std::vector<double> first = {0.0, 0.4, 1.1};
  const std::vector<double> second = {1.7, 2.2, 3.0};
  std::vector<double> both = first;
  both.insert(both.end(), second.begin(), second.end());
  const auto a = BuildSystemMatrix(MakeGeometryFromAngles(first, 1, 20));
  const auto b = BuildSystemMatrix(MakeGeometryFromAngles(second, 1, 20));
  const auto ab = BuildSystemMatrix(MakeGeometryFromAngles(both, 1, 20));
  EXPECT_EQ(ab.nnz(), a.nnz() + b.nnz());
}

TEST(SystemMatrix, CacheBuildsOnce) {
  SystemMatrixCache cache(MakeGeometry(8, 4, 8, 0.0, kPi));
  const auto& a = cache.Get();
  const auto& b = cache.Get();
  EXPECT_EQ(&a, &b);
  EXPECT_EQ(cache.builds(), 1);
}

TEST(Phantom, UniformDiskMask) {
  const Volume v = GeneratePhantom(PhantomKind::kUniformDisk, 4, 1);
  for (int i : {5, 6, 9, 10}) EXPECT_EQ(v.values[static_cast<std::size_t>(i)], 1.0);
  for (int i : {0, 3, 12, 15}) EXPECT_EQ(v.values[static_cast<std::size_t>(i)], 0.0);
}

TEST(Phantom, SheppLoganSlicesIdentical) {
  const Volume v = GeneratePhantom(PhantomKind::kSheppLogan, 64, 16);
  const Volume w = GeneratePhantom(PhantomKind::kSheppLogan, 64, 16);
  EXPECT_EQ(v.values, w.values);
  for (std::size_t k = 1; k < 16; ++k) {
    EXPECT_TRUE(std::equal(v.slice(0).begin(), v.slice(0).end(), v.slice(k).begin()));
  }
  const auto [mn, mx] = std::minmax_element(v.values.begin(), v.values.end());
  EXPECT_GE(*mn, 0.0);
  EXPECT_LE(*mx, 1.0);
  EXPECT_GT(*mx, 0.0);
}

TEST(Phantom, RandomBlobsSeeded) {
  const Volume a = GeneratePhantom(PhantomKind::kRandomBlobs, 32, 8, 7);
  const Volume b = GeneratePhantom(PhantomKind::kRandomBlobs, 32, 8, 7);
  const Volume c = GeneratePhantom(PhantomKind::kRandomBlobs, 32, 8, 8);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  for (double x : a.values) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
  for (int iz = 0; iz < 32; ++iz) {
    for (int ix = 0; ix < 32; ++ix) {
      const double x = (2.0 * ix + 1) / 32 - 1;
      const double z = (2.0 * iz + 1) / 32 - 1;
      if (x * x + z * z > 1.0) {
        EXPECT_EQ(a.values[static_cast<std::size_t>(iz * 32 + ix)], 0.0);
      }
    }
  }
}

TEST(Phantom, UnknownKind) {
  EXPECT_THROW(ParsePhantomKind("cube"), std::invalid_argument);
  EXPECT_EQ(ParsePhantomKind("random-blobs"), PhantomKind::kRandomBlobs);
}

TEST(Measurements, ZeroInZeroOut) {
  const auto g = MakeGeometry(10, 2, 16, 0.0, kPi);
  const auto a = BuildSystemMatrix(g);
  const Volume zero(VolumeRole::kTomogram, 2, 16, 16);
  const Volume y = SimulateMeasurements(g, a, zero, 0.0, 1);
  EXPECT_EQ(y.role, VolumeRole::kSinogram);
  for (double v : y.values) EXPECT_EQ(v, 0.0);
}

TEST(Measurements, UniformDiskProfilesAgreeUnderSymmetry) {
  const int n = 32;
  const auto g = MakeGeometryFromAngles({0.0, kPi / 4, kPi / 2, 3 * kPi / 4}, 1, n);
  const auto a = BuildSystemMatrix(g);
  const Volume disk = GeneratePhantom(PhantomKind::kUniformDisk, n, 1);
  const Volume y = SimulateMeasurements(g, a, disk, 0.0, 0);
  auto at = [&](int k, int c) { return y.values[static_cast<std::size_t>(k * n + c)]; };
  for (int c = 0; c < n; ++c) {
    EXPECT_NEAR(at(0, c), at(2, c), 1e-9);
    EXPECT_NEAR(at(1, c), at(3, c), 1e-9);
    EXPECT_NEAR(at(0, c), at(0, n - 1 - c), 1e-9);
  }
}

TEST(Measurements, SeededNoiseIsReproducible) {
  const auto g = MakeGeometry(12, 3, 16, 0.0, kPi);
  const auto a = BuildSystemMatrix(g);
  const Volume x = GeneratePhantom(PhantomKind::kSheppLogan, 16, 3);
  const Volume y1 = SimulateMeasurements(g, a, x, 0.01, 42);
  const Volume y2 = SimulateMeasurements(g, a, x, 0.01, 42);
  const Volume y3 = SimulateMeasurements(g, a, x, 0.01, 43);
  const Volume clean = SimulateMeasurements(g, a, x, 0.0, 42);
  EXPECT_EQ(y1.values, y2.values);
  EXPECT_NE(y1.values, y3.values);
  EXPECT_NE(y1.values, clean.values);
}

TEST(Measurements, ShapeMismatch) {
  const auto g = MakeGeometry(12, 1, 16, 0.0, kPi);
  const auto a = BuildSystemMatrix(g);
  const Volume wrong(VolumeRole::kTomogram, 1, 8, 8);
  EXPECT_THROW(SimulateMeasurements(g, a, wrong, 0.0, 0), std::invalid_argument);
}

TEST(Volume, QuantizeAndValidate) {
  Volume v(VolumeRole::kTomogram, 1, 2, 2, DType::kHalf);
  v.values = {0.1, 1.0, 2.0, 3.0};
  v.Quantize();
  EXPECT_EQ(v.values[0], RoundToHalf(0.1));
  v.values[1] = std::nan("");
  EXPECT_THROW(v.Validate(), std::invalid_argument);
  EXPECT_EQ(ParseDType("single"), DType::kSingle);
  EXPECT_EQ(DTypeBytes(DType::kHalf), 2u);
}

}  // namespace
}  // namespace xct
