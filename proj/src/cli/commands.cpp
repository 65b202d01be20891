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
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xct/cli.hpp"
#include "xct/comm.hpp"
#include "xct/engine.hpp"
#include "xct/hilbert.hpp"
#include "xct/matrixstore.hpp"
#include "xct/solver.hpp"

namespace xct {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::vector<std::string> SplitList(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

int ParseInt(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument("bad " + what + ": '" + text + "'");
  return v;
}

double ParseAngle(const std::string& text) {
  if (text == "pi") return kPi;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw std::invalid_argument("bad angle: '" + text + "'");
  return v;
}

struct GeometrySpec {
  int k = 0;
  int m = 0;
  int n = 0;
};

GeometrySpec ParseGeometrySpec(const std::string& text) {
  const auto parts = SplitList(text, ',');
  if (parts.size() != 3) throw std::invalid_argument("--geometry expects K,M,N, got '" + text + "'");
  return {ParseInt(parts[0], "K"), ParseInt(parts[1], "M"), ParseInt(parts[2], "N")};
}

std::pair<double, double> ParseAngleRange(const std::string& text) {
  const auto parts = SplitList(text, ',');
  if (parts.size() != 2) throw std::invalid_argument("--angles expects a0,a1, got '" + text + "'");
  return {ParseAngle(parts[0]), ParseAngle(parts[1])};
}

ScanGeometry GeometryFrom(const GeometrySpec& spec, const std::string& angles) {
  const auto [a0, a1] = ParseAngleRange(angles);
  return MakeGeometry(spec.k, spec.m, spec.n, a0, a1);
}

std::vector<int> ParseSweep(const std::string& text) {
  std::vector<int> out;
  for (const auto& part : SplitList(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(ParseInt(part, "sweep value"));
      continue;
    }
    const int lo = ParseInt(part.substr(0, dots), "sweep start");
    const int hi = ParseInt(part.substr(dots + 2), "sweep end");
    if (lo > hi) throw std::invalid_argument("empty sweep range '" + part + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty sweep");
  return out;
}

std::vector<Precision> ParsePrecisionList(const std::string& text) {
  if (text == "all") {
    return {Precision::kDouble, Precision::kSingle, Precision::kHalf, Precision::kMixed};
  }
  std::vector<Precision> out;
  for (const auto& part : SplitList(text, ',')) out.push_back(ParsePrecision(part));
  return out;
}

json TopologyJson(const Topology& t) {
  return {{"nodes", t.num_nodes},       {"sockets", t.sockets_per_node},
          {"gpus", t.gpus_per_socket},  {"bw_socket", t.bw_socket},
          {"bw_node", t.bw_node},       {"bw_inter", t.bw_inter},
          {"lat", t.latency},           {"staging", t.staging_multiplier}};
}

json LevelsJson(const std::vector<LevelVolume>& levels) {
  json arr = json::array();
  for (const auto& v : levels) {
    arr.push_back({{"level", std::string(CommLevelName(v.level))},
                   {"bytes", v.bytes},
                   {"inter_node_bytes", v.inter_node_bytes},
                   {"retained_bytes", v.retained_bytes},
                   {"messages", v.messages},
                   {"time_s", v.time_s}});
  }
  return arr;
}

// Manifest of one command run. argv is enough to repeat the run.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv) {
    doc_["tool"] = "xct";
    doc_["format"] = 1;
    doc_["command"] = std::move(command);
    doc_["argv"] = argv;
    doc_["timings_s"] = json::object();
  }
  json& operator[](const char* key) { return doc_[key]; }
  void Time(const char* phase, double seconds) { doc_["timings_s"][phase] = seconds; }
  void Save(const std::string& path) const {
    if (!path.empty()) WriteTextFile(path, doc_.dump(2) + "\n");
  }

 private:
  json doc_;
};

struct Common {
  int workers = 1;
  std::string manifest;
};

void AddCommon(CLI::App* sub, Common* c) {
  sub->add_option("--workers", c->workers, "worker threads")->check(CLI::Range(1, 1024));
  sub->add_option("--manifest", c->manifest, "write a run manifest (JSON) to this path");
}

// phantom ------------------------------------------------------------------

struct PhantomArgs {
  Common common;
  std::string kind = "shepp-logan-like";
  int size = 0;
  int slices = 1;
  std::uint64_t seed = 0;
  std::string dtype = "double";
  std::string out;
};

int CmdPhantom(const PhantomArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const auto t0 = Clock::now();
  Manifest m("phantom", argv);
  Volume vol = GeneratePhantom(ParsePhantomKind(a.kind), a.size, a.slices, a.seed);
  vol.dtype = ParseDType(a.dtype);
  vol.Quantize();
  WriteDataset(a.out, vol);
  m["seeds"] = {{"phantom", a.seed}};
  m["outputs"] = {{"out", a.out}};
  m.Time("total", Seconds(t0));
  m.Save(a.common.manifest);
  out << "phantom " << a.kind << " " << a.slices << "x" << a.size << "x" << a.size << " -> "
      << a.out << "\n";
  return 0;
}

// project ------------------------------------------------------------------

struct ProjectArgs {
  Common common;
  std::string geometry;
  std::string angles = "0,pi";
  std::string in;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string dtype = "double";
  std::string out;
};

int CmdProject(const ProjectArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const auto t0 = Clock::now();
  Manifest m("project", argv);
  const Volume tomo = ReadDataset(a.in);
  if (tomo.role != VolumeRole::kTomogram) throw std::invalid_argument(a.in + " is not a tomogram");
  const ScanGeometry g = GeometryFrom(ParseGeometrySpec(a.geometry), a.angles);
  if (tomo.slices() != static_cast<std::size_t>(g.num_rows) ||
      tomo.shape[1] != static_cast<std::size_t>(g.grid_n) ||
      tomo.shape[2] != static_cast<std::size_t>(g.grid_n)) {
    throw std::invalid_argument("tomogram " + a.in + " does not match geometry " + a.geometry);
  }
  auto t = Clock::now();
  const SystemMatrix A = BuildSystemMatrix(g, a.common.workers);
  m.Time("system_matrix", Seconds(t));
  t = Clock::now();
  Volume sino = SimulateMeasurements(g, A, tomo, a.noise, a.seed);
  sino.dtype = ParseDType(a.dtype);
  sino.Quantize();
  m.Time("project", Seconds(t));
  WriteDataset(a.out, sino);
  m["seeds"] = {{"noise", a.seed}};
  m["config"] = {{"geometry", a.geometry}, {"angles", a.angles}, {"noise", a.noise}};
  m["outputs"] = {{"out", a.out}};
  m["nnz_per_slice"] = A.nnz();
  m.Time("total", Seconds(t0));
  m.Save(a.common.manifest);
  out << "projected " << g.num_rows << " slices, " << g.num_angles << " angles x "
      << g.num_detector_cols << " channels, nnz/slice " << A.nnz() << " -> " << a.out << "\n";
  return 0;
}

// plan ---------------------------------------------------------------------

struct PlanArgs {
  Common common;
  std::string geometry;
  std::string angles = "0,pi";
  std::string pb = "auto";
  std::string pd = "auto";
  int ffactor = kDefaultFfactor;
  std::string topology;
  std::string precision = "mixed";
  std::string report;
  std::string memory_cap = "16GB";
  int desk_limit = 256;
};

int CmdPlan(const PlanArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const auto t0 = Clock::now();
  Manifest m("plan", argv);
  const GeometrySpec spec = ParseGeometrySpec(a.geometry);
  const ScanGeometry g = GeometryFrom(spec, a.angles);
  const Precision prec = ParsePrecision(a.precision);
  Topology topo = a.topology.empty() ? Topology{} : Topology::Load(a.topology);
  const double cap = ParseByteSize(a.memory_cap);

  const double nnz = EstimateNnzPerSlice(g, 2048);
  const int pd = a.pd == "auto" ? AutoDataProcesses(g, nnz, a.ffactor, prec, cap)
                                : ParseInt(a.pd, "--pd");
  if (pd < 1) throw std::invalid_argument("--pd must be positive");
  int pb = 1;
  if (a.pb == "auto") {
    pb = std::max(1, std::min(g.num_rows, topo.total_gpus() / pd));
  } else {
    pb = ParseInt(a.pb, "--pb");
    if (pb < 1) throw std::invalid_argument("--pb must be positive");
  }
  const long long needed = static_cast<long long>(pb) * pd;
  bool extended = false;
  if (needed > topo.total_gpus()) {
    topo.num_nodes = static_cast<int>((needed + topo.gpus_per_node() - 1) / topo.gpus_per_node());
    extended = true;
  }
  const MemoryEstimate mem = EstimateProcessMemory(g, nnz, pd, a.ffactor, prec);

  // Communication is planned on a desk-sized geometry with the same aspect.
  ScanGeometry pg = g;
  if (g.num_detector_cols > a.desk_limit) {
    const int n = a.desk_limit;
    const int k = std::max(1, static_cast<int>(std::lround(static_cast<double>(g.num_angles) * n /
                                                           g.num_detector_cols)));
    const auto [a0, a1] = ParseAngleRange(a.angles);
    pg = MakeGeometry(k, 1, n, a0, a1);
  }
  int tile = kDefaultProcessTileSize;
  auto tomo_grid = TomogramTileGrid(pg, tile);
  auto sino_grid = SinogramTileGrid(pg, tile);
  while (tile > 1 && (static_cast<std::size_t>(pd) > tomo_grid.num_tiles() ||
                      static_cast<std::size_t>(pd) > sino_grid.num_tiles())) {
    tile /= 2;
    tomo_grid = TomogramTileGrid(pg, tile);
    sino_grid = SinogramTileGrid(pg, tile);
  }
  auto t = Clock::now();
  const SystemMatrix A = BuildSystemMatrix(pg, a.common.workers);
  m.Time("system_matrix", Seconds(t));
  t = Clock::now();
  const auto tomo_parts = Decompose(tomo_grid, pd);
  const auto sino_parts = Decompose(sino_grid, pd);
  const Ownership sino_own = Ownership::FromSubdomains(sino_parts, A.num_rows);
  std::vector<std::vector<std::uint32_t>> footprints;
  for (const auto& part : tomo_parts) {
    footprints.push_back(ComputeFootprint(part, A, Direction::kProjection).elements);
  }
  const Placement placement = MapPartitions(pb, pd, topo);
  const auto slots = placement.Group(0);
  const CommPlan direct = PlanDirect(footprints, sino_own, slots);
  const CommPlan hier = PlanHierarchical(footprints, sino_own, slots);
  const double bpe = static_cast<double>(StorageBytes(prec)) * a.ffactor;
  const VolumeReport vr = CompareVolumes(direct, hier, slots, topo, bpe);
  m.Time("plan", Seconds(t));

  std::ostringstream csv;
  csv.precision(12);
  csv << "plan,level,bytes,inter_node_bytes,retained_bytes,messages,time_s\n";
  for (const auto* levels : {&vr.direct, &vr.hierarchical}) {
    const char* name = levels == &vr.direct ? "direct" : "hierarchical";
    for (const auto& v : *levels) {
      csv << name << ',' << CommLevelName(v.level) << ',' << v.bytes << ',' << v.inter_node_bytes
          << ',' << v.retained_bytes << ',' << v.messages << ',' << v.time_s << '\n';
    }
  }
  if (!a.report.empty()) WriteTextFile(a.report, csv.str());

  m["config"] = {{"geometry", a.geometry},
                 {"plan_geometry",
                  std::to_string(pg.num_angles) + ",1," + std::to_string(pg.num_detector_cols)},
                 {"precision", a.precision},
                 {"ffactor", a.ffactor},
                 {"pb", pb},
                 {"pd", pd},
                 {"tile_size", tile},
                 {"memory_cap_bytes", cap},
                 {"topology", TopologyJson(topo)},
                 {"topology_extended", extended}};
  m["memory"] = {{"nnz_per_slice", mem.nnz_per_slice},
                 {"matrix_bytes", mem.matrix_bytes},
                 {"vector_bytes", mem.vector_bytes},
                 {"staging_bytes", mem.staging_bytes},
                 {"total_bytes", mem.total()}};
  m["volume_report"] = {{"direct", LevelsJson(vr.direct)},
                        {"hierarchical", LevelsJson(vr.hierarchical)},
                        {"inter_node_direct", vr.inter_node_direct},
                        {"inter_node_hierarchical", vr.inter_node_hierarchical},
                        {"reduction_percent", vr.reduction_percent}};
  m["outputs"] = {{"report", a.report}};
  m.Time("total", Seconds(t0));
  m.Save(a.common.manifest);

  out << std::setprecision(4);
  out << "geometry " << g.num_angles << "x" << g.num_rows << "x" << g.num_detector_cols
      << ", nnz/slice ~" << nnz << "\n";
  out << "P_d " << pd << ", P_b " << pb << ", per-process memory " << mem.total() / 1e9
      << " GB (cap " << cap / 1e9 << " GB)\n";
  if (extended) out << "topology extended to " << topo.num_nodes << " nodes\n";
  out << "plan geometry " << pg.num_angles << "x" << pg.num_detector_cols << ", tile " << tile
      << "\n";
  out << "inter-node bytes direct " << vr.inter_node_direct << ", hierarchical "
      << vr.inter_node_hierarchical << " (" << vr.reduction_percent << "% less)\n";
  if (a.report.empty()) out << csv.str();
  return 0;
}

// recon --------------------------------------------------------------------

struct ReconArgs {
  Common common;
  std::string in;
  std::string geometry;
  std::string angles = "0,pi";
  int iters = 30;
  int early_stop = 0;
  std::string precision = "double";
  int ffactor = kDefaultFfactor;
  int pb = 1;
  int pd = 1;
  std::string topology;
  std::string out;
  std::string dtype = "double";
  std::string residuals;
  std::string stage_capacity = "96KiB";
  bool direct = false;
  bool no_normalize = false;
};

int CmdRecon(const ReconArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  const auto t0 = Clock::now();
  Manifest m("recon", argv);
  const Volume sino = ReadDataset(a.in);
  if (sino.role != VolumeRole::kSinogram) throw std::invalid_argument(a.in + " is not a sinogram");
  GeometrySpec spec{static_cast<int>(sino.shape[1]), static_cast<int>(sino.shape[0]),
                    static_cast<int>(sino.shape[2])};
  if (!a.geometry.empty()) {
    const GeometrySpec given = ParseGeometrySpec(a.geometry);
    if (given.k != spec.k || given.m != spec.m || given.n != spec.n) {
      throw std::invalid_argument("sinogram " + a.in + " does not match geometry " + a.geometry);
    }
  }
  const ScanGeometry g = GeometryFrom(spec, a.angles);

  PartitionConfig pc;
  pc.pb = a.pb;
  pc.pd = a.pd;
  pc.ffactor = a.ffactor;
  pc.precision = ParsePrecision(a.precision);
  if (!a.topology.empty()) pc.topology = Topology::Load(a.topology);
  pc.hierarchical = !a.direct;
  pc.normalize = !a.no_normalize;
  pc.workers = a.common.workers;
  pc.stage_capacity_bytes = static_cast<std::size_t>(ParseByteSize(a.stage_capacity));

  SolveConfig sc;
  sc.max_iters = a.iters;
  if (a.early_stop > 0) sc.early_stop_iters = a.early_stop;
  sc.precision = pc.precision;
  sc.ffactor = pc.ffactor;
  sc.pb = pc.pb;
  sc.pd = pc.pd;
  sc.topology = pc.topology;
  sc.Validate();

  auto t = Clock::now();
  const SystemMatrix A = BuildSystemMatrix(g, a.common.workers);
  m.Time("system_matrix", Seconds(t));
  t = Clock::now();
  PartitionedOperator op(g, A, pc);
  m.Time("partition", Seconds(t));

  MultiVector y(g.rays_per_slice(), g.num_rows);
  y.values = sino.values;
  t = Clock::now();
  const SolveResult res = CglsSolve(op, y, sc);
  m.Time("solve", Seconds(t));

  Volume tomo(VolumeRole::kTomogram, static_cast<std::size_t>(g.num_rows),
              static_cast<std::size_t>(g.grid_n), static_cast<std::size_t>(g.grid_n),
              ParseDType(a.dtype));
  tomo.values = res.x.values;
  tomo.Quantize();
  WriteDataset(a.out, tomo);
  if (!a.residuals.empty()) {
    WriteTextFile(a.residuals, ResidualCurveReport({{a.precision, res.residual_history,
                                                     res.time_history}}));
  }

  const double bpe = static_cast<double>(StorageBytes(pc.precision)) * pc.ffactor;
  const auto slots = op.placement().Group(0);
  m["config"] = {{"geometry", std::to_string(spec.k) + "," + std::to_string(spec.m) + "," +
                                  std::to_string(spec.n)},
                 {"angles", a.angles},
                 {"iters", a.iters},
                 {"early_stop", a.early_stop},
                 {"precision", a.precision},
                 {"ffactor", a.ffactor},
                 {"pb", a.pb},
                 {"pd", a.pd},
                 {"hierarchical", pc.hierarchical},
                 {"normalize", pc.normalize},
                 {"stage_capacity_bytes", pc.stage_capacity_bytes},
                 {"topology", TopologyJson(pc.topology)},
                 {"workers", a.common.workers}};
  m["seeds"] = {{"solver", sc.seed}};
  m["iterations"] = res.iterations;
  m["residual_history"] = res.residual_history;
  m["counters"] = {{"projections", res.counters.projections},
                   {"backprojections", res.counters.backprojections},
                   {"flops", res.counters.flops},
                   {"comm_bytes", res.counters.comm_bytes},
                   {"inter_node_bytes", res.counters.inter_node_bytes}};
  m["volume_report"] = {
      {"projection", LevelsJson(SummarizePlan(op.projection_plan(), slots, pc.topology, bpe))},
      {"backprojection",
       LevelsJson(SummarizePlan(op.backprojection_plan(), slots, pc.topology, bpe))}};
  const QuantizationReport q = op.quantization();
  m["quantization"] = {{"entries", q.count},
                       {"underflows", q.underflows},
                       {"subnormals", q.subnormals},
                       {"max_rel_error", q.max_rel_error},
                       {"matrix_scale", op.matrix_scale()}};
  m["outputs"] = {{"out", a.out}, {"residuals", a.residuals}};
  m.Time("total", Seconds(t0));
  m.Save(a.common.manifest);

  out << std::setprecision(6);
  out << "recon " << a.precision << ": " << res.iterations << " iterations, relative residual "
      << (res.residual_history.empty() ? 0.0 : res.residual_history.back()) << ", "
      << res.counters.projections << " projections / " << res.counters.backprojections
      << " backprojections -> " << a.out << "\n";
  return 0;
}

// export -------------------------------------------------------------------

struct ExportArgs {
  Common common;
  std::string in;
  int slice = 0;
  std::string out;
};

int CmdExport(const ExportArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest m("export", argv);
  const Volume vol = ReadDataset(a.in);
  if (a.slice < 0 || static_cast<std::size_t>(a.slice) >= vol.slices()) {
    throw std::invalid_argument("slice " + std::to_string(a.slice) + " out of range for " + a.in +
                                " with " + std::to_string(vol.slices()) + " slices");
  }
  WriteFile(a.out, EncodePgm16(vol.slice(static_cast<std::size_t>(a.slice)), vol.shape[2],
                               vol.shape[1]));
  m["outputs"] = {{"out", a.out}};
  m.Save(a.common.manifest);
  out << "exported slice " << a.slice << " (" << vol.shape[2] << "x" << vol.shape[1] << ") -> "
      << a.out << "\n";
  return 0;
}

// bench --------------------------------------------------------------------

struct BenchArgs {
  Common common;
  std::string geometry;
  std::string angles = "0,pi";
  std::string sweep = "1..50";
  std::string precision = "all";
  std::string stage_capacity = "96KiB";
  std::string report;
  bool time = false;
};

int CmdBench(const BenchArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  Manifest m("bench", argv);
  const ScanGeometry g = GeometryFrom(ParseGeometrySpec(a.geometry), a.angles);
  const auto sweep = ParseSweep(a.sweep);
  for (int f : sweep) {
    if (f < 1 || f > kMaxFfactor) {
      throw std::invalid_argument("FFACTOR " + std::to_string(f) + " outside [1, 50]");
    }
  }
  const auto precisions = ParsePrecisionList(a.precision);
  const auto cap = static_cast<std::size_t>(ParseByteSize(a.stage_capacity));
  const SystemMatrix A = BuildSystemMatrix(g, a.common.workers);

  std::ostringstream csv;
  csv.precision(12);
  csv << "ffactor,precision,nnz,flops,bytes,intensity";
  if (a.time) csv << ",seconds,gflops";
  csv << '\n';
  for (Precision prec : precisions) {
    MatrixBlock block;
    block.local = A;
    if (prec == Precision::kHalf || prec == Precision::kMixed) RescaleForHalf(&block.local);
    block.row_ids.resize(A.num_rows);
    std::iota(block.row_ids.begin(), block.row_ids.end(), 0u);
    block.col_ids.resize(A.num_cols);
    std::iota(block.col_ids.begin(), block.col_ids.end(), 0u);
    const auto partitions = ContiguousRowPartitions(A.num_rows, kDefaultRowsPerPartition);
    for (int f : sweep) {
      const PackedStagedMatrix staged = BuildStaged(block, partitions, {cap, f, prec});
      const KernelCounters c = FlopsAndBytes(staged, f, prec);
      csv << f << ',' << PrecisionName(prec) << ',' << staged.nnz << ',' << c.flops << ','
          << c.bytes << ',' << c.intensity;
      if (a.time) {
        MultiVector x(A.num_cols, f);
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (double& v : x.values) v = QuantizeStorage(unit(rng), prec);
        const auto t = Clock::now();
        const MultiVector y = ApplyStaged(staged, x);
        const double s = Seconds(t);
        csv << ',' << s << ',' << (s > 0.0 ? c.flops / s / 1e9 : 0.0);
      }
      csv << '\n';
    }
  }
  if (a.report.empty()) {
    out << csv.str();
  } else {
    WriteTextFile(a.report, csv.str());
    out << "bench: " << sweep.size() * precisions.size() << " rows -> " << a.report << "\n";
  }
  m["outputs"] = {{"report", a.report}};
  m.Save(a.common.manifest);
  return 0;
}

// replay -------------------------------------------------------------------

struct ReplayArgs {
  std::string manifest;
  int workers = 0;
  std::string out;
  std::string manifest_out;
};

void SetFlag(std::vector<std::string>* argv, const std::string& flag, const std::string& value) {
  for (std::size_t i = 0; i < argv->size(); ++i) {
    auto& tok = (*argv)[i];
    if (tok == flag && i + 1 < argv->size()) {
      (*argv)[i + 1] = value;
      return;
    }
    if (tok.rfind(flag + "=", 0) == 0) {
      tok = flag + "=" + value;
      return;
    }
  }
  argv->push_back(flag);
  argv->push_back(value);
}

void DropFlag(std::vector<std::string>* argv, const std::string& flag) {
  for (std::size_t i = 0; i < argv->size();) {
    if ((*argv)[i] == flag) {
      argv->erase(argv->begin() + static_cast<std::ptrdiff_t>(i),
                  argv->begin() + static_cast<std::ptrdiff_t>(std::min(i + 2, argv->size())));
    } else if ((*argv)[i].rfind(flag + "=", 0) == 0) {
      argv->erase(argv->begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"xct: iterative parallel-beam CT reconstruction toolkit", "xct"};
  app.require_subcommand(1);

  PhantomArgs phantom;
  auto* sp = app.add_subcommand("phantom", "generate a synthetic tomogram");
  sp->add_option("--kind", phantom.kind, "uniform-disk | shepp-logan-like | random-blobs");
  sp->add_option("--size", phantom.size, "voxels per side")->required()->check(CLI::PositiveNumber);
  sp->add_option("--slices", phantom.slices, "number of slices")->check(CLI::PositiveNumber);
  sp->add_option("--seed", phantom.seed, "random seed");
  sp->add_option("--dtype", phantom.dtype, "double | single | half");
  sp->add_option("--out", phantom.out, "output dataset")->required();
  AddCommon(sp, &phantom.common);

  ProjectArgs project;
  auto* pr = app.add_subcommand("project", "simulate measurements of a tomogram");
  pr->add_option("--geometry", project.geometry, "K,M,N")->required();
  pr->add_option("--angles", project.angles, "a0,a1 in radians ('pi' allowed)");
  pr->add_option("--in", project.in, "input tomogram")->required();
  pr->add_option("--noise", project.noise, "noise sigma relative to the peak")
      ->check(CLI::NonNegativeNumber);
  pr->add_option("--seed", project.seed, "noise seed");
  pr->add_option("--dtype", project.dtype, "double | single | half");
  pr->add_option("--out", project.out, "output sinogram")->required();
  AddCommon(pr, &project.common);

  PlanArgs plan;
  auto* pl = app.add_subcommand("plan", "partition and plan communication");
  pl->add_option("--geometry", plan.geometry, "K,M,N")->required();
  pl->add_option("--angles", plan.angles, "a0,a1 in radians");
  pl->add_option("--pb", plan.pb, "batch groups: auto | n");
  pl->add_option("--pd", plan.pd, "data processes: auto | n");
  pl->add_option("--ffactor", plan.ffactor, "slices per minibatch")->check(CLI::Range(1, kMaxFfactor));
  pl->add_option("--topology", plan.topology, "topology file");
  pl->add_option("--precision", plan.precision, "double | single | half | mixed");
  pl->add_option("--report", plan.report, "CSV report path");
  pl->add_option("--memory-cap", plan.memory_cap, "per-process memory cap, e.g. 16GB or 64MB");
  pl->add_option("--desk-limit", plan.desk_limit, "largest detector width planned exactly")
      ->check(CLI::Range(8, 4096));
  AddCommon(pl, &plan.common);

  ReconArgs recon;
  auto* rc = app.add_subcommand("recon", "reconstruct a sinogram with CGLS");
  rc->add_option("--in", recon.in, "input sinogram")->required();
  rc->add_option("--geometry", recon.geometry, "K,M,N (checked against the sinogram)");
  rc->add_option("--angles", recon.angles, "a0,a1 in radians");
  rc->add_option("--iters", recon.iters, "maximum iterations")->check(CLI::PositiveNumber);
  rc->add_option("--early-stop", recon.early_stop, "stop after this many iterations")
      ->check(CLI::PositiveNumber);
  rc->add_option("--precision", recon.precision, "double | single | half | mixed");
  rc->add_option("--ffactor", recon.ffactor, "slices per minibatch")->check(CLI::Range(1, kMaxFfactor));
  rc->add_option("--pb", recon.pb, "batch groups")->check(CLI::PositiveNumber);
  rc->add_option("--pd", recon.pd, "data processes per group")->check(CLI::PositiveNumber);
  rc->add_option("--topology", recon.topology, "topology file");
  rc->add_option("--out", recon.out, "output tomogram")->required();
  rc->add_option("--dtype", recon.dtype, "output dtype");
  rc->add_option("--residuals", recon.residuals, "residual history CSV");
  rc->add_option("--stage-capacity", recon.stage_capacity, "staging buffer bytes, e.g. 96KiB");
  rc->add_flag("--direct", recon.direct, "use direct instead of hierarchical communication");
  rc->add_flag("--no-normalize", recon.no_normalize, "disable adaptive normalization");
  AddCommon(rc, &recon.common);

  ExportArgs exp;
  auto* ex = app.add_subcommand("export", "write one slice as a 16-bit PGM");
  ex->add_option("--in", exp.in, "input dataset")->required();
  ex->add_option("--slice", exp.slice, "slice index");
  ex->add_option("--out", exp.out, "output image")->required();
  AddCommon(ex, &exp.common);

  BenchArgs bench;
  auto* bn = app.add_subcommand("bench", "arithmetic intensity over an FFACTOR sweep");
  bn->add_option("--geometry", bench.geometry, "K,M,N")->required();
  bn->add_option("--angles", bench.angles, "a0,a1 in radians");
  bn->add_option("--ffactor-sweep", bench.sweep, "e.g. 1..50 or 1,2,4,16");
  bn->add_option("--precision", bench.precision, "all or a comma list");
  bn->add_option("--stage-capacity", bench.stage_capacity, "staging buffer bytes");
  bn->add_option("--report", bench.report, "CSV output (stdout when omitted)");
  bn->add_flag("--time", bench.time, "also time one kernel call per row");
  AddCommon(bn, &bench.common);

  ReplayArgs replay;
  auto* rp = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  rp->add_option("--manifest", replay.manifest, "manifest to replay")->required();
  rp->add_option("--workers", replay.workers, "override the worker count")
      ->check(CLI::Range(1, 1024));
  rp->add_option("--out", replay.out, "override the output path");
  rp->add_option("--manifest-out", replay.manifest_out, "write a manifest for the replayed run");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (sp->parsed()) return CmdPhantom(phantom, args, out);
    if (pr->parsed()) return CmdProject(project, args, out);
    if (pl->parsed()) return CmdPlan(plan, args, out);
    if (rc->parsed()) return CmdRecon(recon, args, out);
    if (ex->parsed()) return CmdExport(exp, args, out);
    if (bn->parsed()) return CmdBench(bench, args, out);
    if (rp->parsed()) {
      const auto bytes = ReadFile(replay.manifest);
      json doc;
      try {
        doc = json::parse(bytes.begin(), bytes.end());
      } catch (const json::exception& e) {
        throw std::invalid_argument(replay.manifest + ": not a manifest (" + e.what() + ")");
      }
      if (!doc.contains("argv") || !doc["argv"].is_array()) {
        throw std::invalid_argument(replay.manifest + ": manifest has no argv");
      }
      auto argv = doc["argv"].get<std::vector<std::string>>();
      if (!argv.empty() && argv.front() == "replay") {
        throw std::invalid_argument("refusing to replay a replay manifest");
      }
      DropFlag(&argv, "--manifest");
      if (!replay.manifest_out.empty()) SetFlag(&argv, "--manifest", replay.manifest_out);
      if (replay.workers > 0) SetFlag(&argv, "--workers", std::to_string(replay.workers));
      if (!replay.out.empty()) SetFlag(&argv, "--out", replay.out);
      return RunCli(argv, out, err);
    }
  } catch (const std::exception& e) {
    err << "xct: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace xct
