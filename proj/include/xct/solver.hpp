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

#ifndef XCT_SOLVER_HPP_
#define XCT_SOLVER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xct/comm.hpp"
#include "xct/engine.hpp"
#include "xct/geometry.hpp"
#include "xct/hilbert.hpp"
#include "xct/matrixstore.hpp"

namespace xct {

struct OperatorCounters {
  std::size_t projections = 0;
  std::size_t backprojections = 0;
  double flops = 0.0;
  double comm_bytes = 0.0;        // off-process traffic of executed plans
  double inter_node_bytes = 0.0;
};

// A per-slice linear map applied to every column of a MultiVector.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual Precision precision() const { return Precision::kDouble; }
  virtual MultiVector Apply(const MultiVector& x) = 0;
  virtual MultiVector ApplyTranspose(const MultiVector& y) = 0;

  const OperatorCounters& counters() const { return counters_; }
  void ResetCounters() { counters_ = {}; }

 protected:
  OperatorCounters counters_;
};

// Plain double-precision products with A and its transpose.
class ReferenceOperator : public LinearOperator {
 public:
  explicit ReferenceOperator(CsrMatrix a);
  std::size_t rows() const override { return a_.num_rows; }
  std::size_t cols() const override { return a_.num_cols; }
  MultiVector Apply(const MultiVector& x) override;
  MultiVector ApplyTranspose(const MultiVector& y) override;

 private:
  CsrMatrix a_;
  CsrMatrix at_;
};

struct PartitionConfig {
  int pb = 1;
  int pd = 1;
  int ffactor = kDefaultFfactor;
  Precision precision = Precision::kDouble;
  Topology topology;
  bool hierarchical = true;
  bool normalize = true;
  int workers = 1;
  std::size_t stage_capacity_bytes = kDefaultStageCapacityBytes;
  std::size_t rows_per_partition = kDefaultRowsPerPartition;
  int tile_size = kDefaultProcessTileSize;
};

// The distributed pipeline: Hilbert subdomains, staged blocks per data
// process, batch groups over slices, minibatches of FFACTOR slices and
// partial-result exchange through a communication plan.
class PartitionedOperator : public LinearOperator {
 public:
  PartitionedOperator(const ScanGeometry& geometry, const CsrMatrix& a, PartitionConfig config);

  std::size_t rows() const override { return num_rows_; }
  std::size_t cols() const override { return num_cols_; }
  Precision precision() const override { return config_.precision; }
  MultiVector Apply(const MultiVector& x) override;
  MultiVector ApplyTranspose(const MultiVector& y) override;

  const PartitionConfig& config() const { return config_; }
  const Placement& placement() const { return placement_; }
  double matrix_scale() const { return matrix_scale_; }
  const std::vector<Subdomain>& tomogram_parts() const { return tomo_parts_; }
  const std::vector<Subdomain>& sinogram_parts() const { return sino_parts_; }
  const std::vector<PackedStagedMatrix>& projection_blocks() const { return forward_.blocks; }
  const std::vector<PackedStagedMatrix>& backprojection_blocks() const { return backward_.blocks; }
  const CommPlan& projection_plan(int batch_group = 0) const;
  const CommPlan& backprojection_plan(int batch_group = 0) const;
  QuantizationReport quantization() const;

 private:
  struct Side {
    Direction direction = Direction::kProjection;
    std::vector<PackedStagedMatrix> blocks;
    Ownership output;
    std::vector<CommPlan> plans;  // per batch group
    std::size_t in_length = 0;
    std::size_t out_length = 0;
  };

  MultiVector Run(const Side& side, const MultiVector& in);

  PartitionConfig config_;
  std::size_t num_rows_ = 0;
  std::size_t num_cols_ = 0;
  double matrix_scale_ = 1.0;
  Placement placement_;
  std::vector<Subdomain> tomo_parts_;
  std::vector<Subdomain> sino_parts_;
  Side forward_;
  Side backward_;
};

class SolverDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveConfig {
  int max_iters = 30;
  std::optional<int> early_stop_iters;
  Precision precision = Precision::kDouble;
  int ffactor = kDefaultFfactor;
  int pb = 1;
  int pd = 1;
  Topology topology;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct SolveResult {
  MultiVector x;
  std::vector<double> residual_history;  // ||y - A x_i|| / ||y|| after iteration i
  std::vector<double> time_history;      // seconds since the solve started
  OperatorCounters counters;
  int iterations = 0;
};

bool EarlyStop(const SolveConfig& config, const std::vector<double>& history);

// CGLS on every slice (column) of y at once. Vector updates and all scalar
// reductions run in double; the operator decides the product precision.
SolveResult CglsSolve(LinearOperator& op, const MultiVector& y, const SolveConfig& config);

struct ModeHistory {
  std::string mode;
  std::vector<double> residual;
  std::vector<double> time_s;
};

// CSV with an iteration column and <mode>_residual, <mode>_time_s per mode.
std::string ResidualCurveReport(const std::vector<ModeHistory>& histories);

}  // namespace xct

#endif  // XCT_SOLVER_HPP_
