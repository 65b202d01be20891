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
#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "xct/cli.hpp"
#include "xct/geometry.hpp"
#include "xct/precision.hpp"

namespace xct {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult Xct(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Per-test scratch directory under the working directory.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path("cli_scratch") / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

json LoadJson(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

Volume RandomVolume(DType dtype, VolumeRole role, unsigned seed) {
  Volume v(role, 3, 5, 7, dtype);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 40.0);
  for (auto& x : v.values) x = dist(rng);
  v.values[0] = 0.0;
  v.values[1] = -0.0;
  v.values[2] = 1e-30;
  v.Quantize();
  return v;
}

TEST(Dataset, RoundtripIsBitExactForEveryDtype) {
  for (DType d : {DType::kDouble, DType::kSingle, DType::kHalf}) {
    for (VolumeRole role : {VolumeRole::kTomogram, VolumeRole::kSinogram}) {
      const Volume v = RandomVolume(d, role, 11);
      const auto bytes = EncodeDataset(v);
      const Volume back = DecodeDataset(bytes);
      EXPECT_EQ(back.dtype, d);
      EXPECT_EQ(back.role, role);
      EXPECT_EQ(back.shape, v.shape);
      ASSERT_EQ(back.values.size(), v.values.size());
      for (std::size_t i = 0; i < v.values.size(); ++i) {
        EXPECT_EQ(std::signbit(back.values[i]), std::signbit(v.values[i]));
        EXPECT_EQ(back.values[i], v.values[i]) << DTypeName(d) << " @" << i;
      }
      EXPECT_EQ(EncodeDataset(back), bytes);
    }
  }
}

TEST(Dataset, HeaderLayout) {
  Volume v(VolumeRole::kSinogram, 2, 3, 4, DType::kHalf);
  v.values.assign(24, 1.0);
  const auto b = EncodeDataset(v);
  ASSERT_EQ(b.size(), 4u + 3u + 3u * 4u + 24u * 2u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "XCT1");
  EXPECT_EQ(b[4], 2);
  EXPECT_EQ(b[5], 1);
  EXPECT_EQ(b[6], 3);
  EXPECT_EQ(b[7], 2);
  EXPECT_EQ(b[8], 0);
  EXPECT_EQ(b[11], 3);
  EXPECT_EQ(b[15], 4);
  // 1.0 in binary16 is 0x3C00, little-endian.
  EXPECT_EQ(b[19], 0x00);
  EXPECT_EQ(b[20], 0x3C);
}

TEST(Dataset, DecodeRejectsCorruptInput) {
  Volume v(VolumeRole::kTomogram, 1, 2, 2, DType::kSingle);
  v.values = {1, 2, 3, 4};
  auto good = EncodeDataset(v);

  auto bad_magic = good;
  bad_magic[3] = '2';
  EXPECT_THROW(DecodeDataset(bad_magic), std::exception);

  auto short_payload = good;
  short_payload.pop_back();
  EXPECT_THROW(DecodeDataset(short_payload), std::exception);

  auto long_payload = good;
  long_payload.push_back(0);
  EXPECT_THROW(DecodeDataset(long_payload), std::exception);

  auto bad_dtype = good;
  bad_dtype[4] = 7;
  EXPECT_THROW(DecodeDataset(bad_dtype), std::exception);

  EXPECT_THROW(DecodeDataset(std::vector<std::uint8_t>{'X', 'C'}), std::exception);
}

TEST_F(CliTest, FileRoundtrip) {
  const Volume v = RandomVolume(DType::kSingle, VolumeRole::kTomogram, 5);
  WriteDataset(P("v.xct"), v);
  const Volume back = ReadDataset(P("v.xct"));
  EXPECT_EQ(back.values, v.values);
  EXPECT_EQ(ReadFile(P("v.xct")), EncodeDataset(v));
}

TEST(ByteSize, Parses) {
  EXPECT_DOUBLE_EQ(ParseByteSize("64MB"), 64e6);
  EXPECT_DOUBLE_EQ(ParseByteSize("16GB"), 16e9);
  EXPECT_DOUBLE_EQ(ParseByteSize("96KiB"), 96.0 * 1024);
  EXPECT_DOUBLE_EQ(ParseByteSize("1e9"), 1e9);
  EXPECT_DOUBLE_EQ(ParseByteSize("4096"), 4096.0);
  EXPECT_THROW(ParseByteSize("lots"), std::exception);
  EXPECT_THROW(ParseByteSize("-3MB"), std::exception);
}

TEST(Pgm, ZeroPlaneIsBlack) {
  const std::vector<double> plane(6 * 4, 0.0);
  const auto img = EncodePgm16(plane, 6, 4);
  const std::string header = "P5\n6 4\n65535\n";
  ASSERT_EQ(img.size(), header.size() + 2 * plane.size());
  EXPECT_EQ(std::string(img.begin(), img.begin() + static_cast<long>(header.size())), header);
  for (std::size_t i = header.size(); i < img.size(); ++i) EXPECT_EQ(img[i], 0);
}

TEST(Pgm, WindowsMinToZeroAndMaxToFullScale) {
  const std::vector<double> plane = {-2.0, 0.0, 2.0};
  const auto img = EncodePgm16(plane, 3, 1);
  const std::size_t h = img.size() - 6;
  auto sample = [&](std::size_t i) { return img[h + 2 * i] << 8 | img[h + 2 * i + 1]; };
  EXPECT_EQ(sample(0), 0);
  EXPECT_EQ(sample(2), 65535);
  EXPECT_NEAR(sample(1), 32768, 1);
}

TEST_F(CliTest, ExportOfZeroVolumeIsBlack) {
  Volume v(VolumeRole::kTomogram, 2, 8, 8);
  WriteDataset(P("zero.xct"), v);
  const CliResult r = Xct({"export", "--in", P("zero.xct"), "--slice", "1", "--out", P("z.pgm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto img = ReadFile(P("z.pgm"));
  ASSERT_GT(img.size(), 128u);
  for (std::size_t i = img.size() - 128; i < img.size(); ++i) EXPECT_EQ(img[i], 0);
}

TEST_F(CliTest, UnknownFlagIsRejected) {
  const CliResult r = Xct({"phantom", "--size", "8", "--out", P("p.xct"), "--colour", "red"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--colour"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(P("p.xct")));
}

TEST_F(CliTest, UnknownCommandAndMissingCommandAreRejected) {
  EXPECT_NE(Xct({"reconstruct"}).code, 0);
  EXPECT_NE(Xct({}).code, 0);
}

TEST_F(CliTest, MissingFileIsReportedWithPath) {
  const std::string missing = P("does_not_exist.xct");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"export", "--in", missing, "--out", P("x.pgm")},
           {"recon", "--in", missing, "--out", P("r.xct")},
           {"project", "--geometry", "8,1,8", "--in", missing, "--out", P("s.xct")},
           {"replay", "--manifest", missing}}) {
    const CliResult r = Xct(args);
    EXPECT_NE(r.code, 0) << args[0];
    EXPECT_NE(r.err.find(missing), std::string::npos) << args[0] << ": " << r.err;
  }
}

TEST_F(CliTest, BadArgumentsFailWithMessage) {
  const CliResult a = Xct({"phantom", "--kind", "teapot", "--size", "8", "--out", P("p.xct")});
  EXPECT_NE(a.code, 0);
  EXPECT_FALSE(a.err.empty());
  const CliResult b = Xct({"plan", "--geometry", "8,x,8"});
  EXPECT_NE(b.code, 0);
  EXPECT_FALSE(b.err.empty());
  const CliResult c = Xct({"recon", "--in", "x", "--out", "y", "--precision", "quad"});
  EXPECT_NE(c.code, 0);
}

TEST_F(CliTest, ReconRejectsGeometryMismatch) {
  ASSERT_EQ(Xct({"phantom", "--size", "8", "--out", P("p.xct")}).code, 0);
  ASSERT_EQ(Xct({"project", "--geometry", "12,1,8", "--in", P("p.xct"), "--out", P("s.xct")}).code,
            0);
  const CliResult r = Xct({"recon", "--in", P("s.xct"), "--geometry", "10,1,8", "--out", P("r.xct")});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, PhantomIsSeedDeterministic) {
  for (const char* name : {"a.xct", "b.xct"}) {
    ASSERT_EQ(Xct({"phantom", "--kind", "random-blobs", "--size", "16", "--slices", "2", "--seed",
                   "9", "--out", P(name)})
                  .code,
              0);
  }
  ASSERT_EQ(Xct({"phantom", "--kind", "random-blobs", "--size", "16", "--slices", "2", "--seed",
                 "10", "--out", P("c.xct")})
                .code,
            0);
  EXPECT_EQ(ReadFile(P("a.xct")), ReadFile(P("b.xct")));
  EXPECT_NE(ReadFile(P("a.xct")), ReadFile(P("c.xct")));
}

TEST_F(CliTest, NoiselessPipelineConverges) {
  ASSERT_EQ(Xct({"phantom", "--kind", "uniform-disk", "--size", "16", "--slices", "2", "--out",
                 P("p.xct")})
                .code,
            0);
  ASSERT_EQ(Xct({"project", "--geometry", "24,2,16", "--in", P("p.xct"), "--noise", "0", "--out",
                 P("s.xct")})
                .code,
            0);
  const CliResult r = Xct({"recon", "--in", P("s.xct"), "--geometry", "24,2,16", "--iters", "30",
                     "--precision", "double", "--out", P("r.xct"), "--manifest", P("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = LoadJson(P("m.json"));
  const auto hist = m["residual_history"].get<std::vector<double>>();
  ASSERT_EQ(hist.size(), 30u);
  EXPECT_LT(hist.back(), 1e-4);
  EXPECT_EQ(m["counters"]["projections"].get<int>(), 30);
  EXPECT_EQ(m["counters"]["backprojections"].get<int>(), 31);

  const Volume truth = ReadDataset(P("p.xct"));
  const Volume x = ReadDataset(P("r.xct"));
  ASSERT_EQ(x.shape, truth.shape);
  EXPECT_EQ(x.role, VolumeRole::kTomogram);
}

TEST_F(CliTest, SinogramShapeFollowsGeometry) {
  ASSERT_EQ(Xct({"phantom", "--size", "11", "--slices", "3", "--out", P("p.xct")}).code, 0);
  ASSERT_EQ(Xct({"project", "--geometry", "5,3,11", "--in", P("p.xct"), "--out", P("s.xct")}).code,
            0);
  const Volume s = ReadDataset(P("s.xct"));
  EXPECT_EQ(s.role, VolumeRole::kSinogram);
  EXPECT_EQ(s.shape, (std::array<std::size_t, 3>{3, 5, 11}));
}

TEST_F(CliTest, PlanAutoSplitsLargeScanAcrossProcesses) {
  const CliResult r = Xct({"plan", "--geometry", "4501,9209,11283", "--pd", "auto", "--memory-cap",
                     "16GB", "--manifest", P("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = LoadJson(P("m.json"));
  const int pd = m["config"]["pd"].get<int>();
  EXPECT_GT(pd, 1);
  EXPECT_LE(m["memory"]["total_bytes"].get<double>(), 16e9);
  EXPECT_NE(r.out.find("P_d " + std::to_string(pd)), std::string::npos) << r.out;
}

TEST_F(CliTest, PlanAutoOnSmallScanDependsOnCap) {
  const CliResult a = Xct({"plan", "--geometry", "96,4,64", "--manifest", P("a.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(LoadJson(P("a.json"))["config"]["pd"].get<int>(), 1);
  const CliResult b =
      Xct({"plan", "--geometry", "96,4,64", "--memory-cap", "2MB", "--manifest", P("b.json")});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_GT(LoadJson(P("b.json"))["config"]["pd"].get<int>(), 1);
}

struct CsvRow {
  std::string plan, level;
  double bytes = 0, inter = 0, retained = 0;
};

std::vector<CsvRow> ReadPlanCsv(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "plan,level,bytes,inter_node_bytes,retained_bytes,messages,time_s");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string f;
    CsvRow r;
    std::getline(ss, r.plan, ',');
    std::getline(ss, r.level, ',');
    std::getline(ss, f, ',');
    r.bytes = std::stod(f);
    std::getline(ss, f, ',');
    r.inter = std::stod(f);
    std::getline(ss, f, ',');
    r.retained = std::stod(f);
    rows.push_back(r);
  }
  return rows;
}

TEST_F(CliTest, PlanReportGlobalBytesNeverExceedDirect) {
  for (const char* pd : {"2", "4", "6", "12", "24"}) {
    const std::string csv = P(std::string("plan_") + pd + ".csv");
    const CliResult r = Xct({"plan", "--geometry", "96,1,64", "--pd", pd, "--pb", "1", "--report", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    double direct = 0, global = -1;
    int hier_rows = 0;
    for (const auto& row : ReadPlanCsv(csv)) {
      if (row.plan == "direct") direct += row.bytes;
      if (row.plan == "hierarchical") ++hier_rows;
      if (row.plan == "hierarchical" && row.level == "global") global = row.bytes;
    }
    EXPECT_EQ(hier_rows, 3) << pd;
    ASSERT_GE(global, 0) << pd;
    EXPECT_LE(global, direct) << "pd=" << pd;
  }
}

TEST_F(CliTest, BenchReportHasOneRowPerFfactorAndPrecision) {
  const CliResult r = Xct({"bench", "--geometry", "24,1,16", "--ffactor-sweep", "1..4", "--precision",
                     "double,mixed", "--report", P("b.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(P("b.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 8);
}

// Runs the recorded recon with a different worker count and compares the
// output file bytes.
TEST_F(CliTest, ReplayIsByteIdenticalAcrossWorkerCounts) {
  ASSERT_EQ(Xct({"phantom", "--kind", "shepp-logan-like", "--size", "24", "--slices", "3", "--out",
                 P("p.xct")})
                .code,
            0);
  ASSERT_EQ(Xct({"project", "--geometry", "36,3,24", "--in", P("p.xct"), "--noise", "0.01",
                 "--seed", "4", "--out", P("s.xct")})
                .code,
            0);
  for (const char* prec : {"double", "mixed"}) {
    const std::string tag = prec;
    const CliResult first = Xct({"recon", "--in", P("s.xct"), "--geometry", "36,3,24", "--iters", "12",
                           "--precision", prec, "--pd", "4", "--ffactor", "2", "--workers", "1",
                           "--out", P(tag + "_w1.xct"), "--manifest", P(tag + ".json")});
    ASSERT_EQ(first.code, 0) << first.err;
    const auto reference = ReadFile(P(tag + "_w1.xct"));
    for (const char* w : {"1", "4", "8"}) {
      const std::string out = P(tag + "_replay_w" + w + ".xct");
      const CliResult r = Xct({"replay", "--manifest", P(tag + ".json"), "--workers", w, "--out", out});
      ASSERT_EQ(r.code, 0) << r.err;
      EXPECT_EQ(ReadFile(out), reference) << prec << " workers=" << w;
    }
  }
}

TEST_F(CliTest, SeededProjectionIsReproducible) {
  ASSERT_EQ(Xct({"phantom", "--size", "16", "--out", P("p.xct")}).code, 0);
  const std::vector<std::string> args = {"project", "--geometry", "20,1,16", "--in", P("p.xct"),
                                         "--noise", "0.05", "--seed", "3", "--out", P("s1.xct"),
                                         "--manifest", P("m.json")};
  ASSERT_EQ(Xct(args).code, 0);
  ASSERT_EQ(Xct({"replay", "--manifest", P("m.json"), "--out", P("s2.xct")}).code, 0);
  EXPECT_EQ(ReadFile(P("s1.xct")), ReadFile(P("s2.xct")));
  ASSERT_EQ(Xct({"project", "--geometry", "20,1,16", "--in", P("p.xct"), "--noise", "0.05",
                 "--seed", "4", "--out", P("s3.xct")})
                .code,
            0);
  EXPECT_NE(ReadFile(P("s1.xct")), ReadFile(P("s3.xct")));
}

TEST_F(CliTest, ReplayRefusesManifestWithoutArgv) {
  WriteTextFile(P("m.json"), "{\"command\": \"recon\"}");
  const CliResult r = Xct({"replay", "--manifest", P("m.json")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("argv"), std::string::npos);
}

TEST(MemoryModel, FootprintShrinksWithMoreProcesses) {
  const ScanGeometry g = MakeGeometry(180, 8, 128, 0.0, kPi);
  const double nnz = EstimateNnzPerSlice(g, 512);
  EXPECT_GT(nnz, 128.0 * 180.0);
  double prev = 1e300;
  for (int pd : {1, 2, 4, 8, 16}) {
    const double t = EstimateProcessMemory(g, nnz, pd, 8, Precision::kMixed).total();
    EXPECT_LT(t, prev);
    prev = t;
  }
  const double one = EstimateProcessMemory(g, nnz, 1, 8, Precision::kMixed).total();
  EXPECT_EQ(AutoDataProcesses(g, nnz, 8, Precision::kMixed, one * 1.01), 1);
  const int pd = AutoDataProcesses(g, nnz, 8, Precision::kMixed, one / 3);
  EXPECT_GT(pd, 1);
  EXPECT_LE(EstimateProcessMemory(g, nnz, pd, 8, Precision::kMixed).total(), one / 3);
  EXPECT_GT(EstimateProcessMemory(g, nnz, pd - 1, 8, Precision::kMixed).total(), one / 3);
}

}  // namespace
}  // namespace xct
