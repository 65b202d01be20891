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
#include <stdexcept>
#include <string>
#include <utility>

#include "xct/parallel.hpp"
#include "xct/solver.hpp"

namespace xct {

ReferenceOperator::ReferenceOperator(CsrMatrix a) : a_(std::move(a)), at_(Transpose(a_)) {}

MultiVector ReferenceOperator::Apply(const MultiVector& x) {
  ++counters_.projections;
  counters_.flops += 2.0 * static_cast<double>(a_.nnz()) * x.columns;
  return SpmmReference(a_, x);
}

MultiVector ReferenceOperator::ApplyTranspose(const MultiVector& y) {
  ++counters_.backprojections;
  counters_.flops += 2.0 * static_cast<double>(at_.nnz()) * y.columns;
  return SpmmReference(at_, y);
}

namespace {

std::vector<std::vector<std::uint32_t>> SortedFootprints(
    const std::vector<PackedStagedMatrix>& blocks) {
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) {
    auto fp = b.row_ids;
    std::sort(fp.begin(), fp.end());
    out.push_back(std::move(fp));
  }
  return out;
}

}  // namespace

PartitionedOperator::PartitionedOperator(const ScanGeometry& geometry, const CsrMatrix& a,
                                         PartitionConfig config)
    : config_(std::move(config)) {
  if (config_.pb < 1 || config_.pd < 1) throw std::invalid_argument("P_b and P_d must be positive");
  if (config_.ffactor < 1 || config_.ffactor > kMaxFfactor) {
    throw std::invalid_argument("FFACTOR must lie in [1, " + std::to_string(kMaxFfactor) + "]");
  }
  if (config_.workers < 1) throw std::invalid_argument("worker count must be positive");
  if (a.num_rows != geometry.rays_per_slice() || a.num_cols != geometry.voxels_per_slice()) {
    throw std::invalid_argument("system matrix shape does not match the geometry");
  }
  num_rows_ = a.num_rows;
  num_cols_ = a.num_cols;

  CsrMatrix scaled = a;
  if (config_.precision == Precision::kHalf || config_.precision == Precision::kMixed) {
    matrix_scale_ = RescaleForHalf(&scaled);
  }
  tomo_parts_ = Decompose(TomogramTileGrid(geometry, config_.tile_size), config_.pd);
  sino_parts_ = Decompose(SinogramTileGrid(geometry, config_.tile_size), config_.pd);
  const PartitionedMatrix pm = PartitionMatrix(scaled, tomo_parts_, sino_parts_);
  placement_ = MapPartitions(config_.pb, config_.pd, config_.topology);

  StagingOptions options;
  options.stage_capacity_bytes = config_.stage_capacity_bytes;
  options.ffactor = config_.ffactor;
  options.precision = config_.precision;
  forward_.direction = Direction::kProjection;
  backward_.direction = Direction::kBackprojection;
  for (int p = 0; p < config_.pd; ++p) {
    const auto& fb = pm.projection[static_cast<std::size_t>(p)];
    forward_.blocks.push_back(BuildStaged(
        fb, ContiguousRowPartitions(fb.local.num_rows, config_.rows_per_partition), options));
    const auto& bb = pm.backprojection[static_cast<std::size_t>(p)];
    backward_.blocks.push_back(BuildStaged(
        bb, ContiguousRowPartitions(bb.local.num_rows, config_.rows_per_partition), options));
  }
  forward_.output = Ownership::FromSubdomains(sino_parts_, num_rows_);
  backward_.output = Ownership::FromSubdomains(tomo_parts_, num_cols_);
  forward_.in_length = backward_.out_length = num_cols_;
  forward_.out_length = backward_.in_length = num_rows_;

  for (Side* side : {&forward_, &backward_}) {
    const auto footprints = SortedFootprints(side->blocks);
    for (int b = 0; b < config_.pb; ++b) {
      const auto slots = placement_.Group(b);
      side->plans.push_back(config_.hierarchical ? PlanHierarchical(footprints, side->output, slots)
                                                 : PlanDirect(footprints, side->output, slots));
    }
  }
}

const CommPlan& PartitionedOperator::projection_plan(int batch_group) const {
  return forward_.plans.at(static_cast<std::size_t>(batch_group));
}

const CommPlan& PartitionedOperator::backprojection_plan(int batch_group) const {
  return backward_.plans.at(static_cast<std::size_t>(batch_group));
}

QuantizationReport PartitionedOperator::quantization() const {
  QuantizationReport total;
  for (const auto* side : {&forward_, &backward_}) {
    for (const auto& b : side->blocks) {
      total.count += b.quantization.count;
      total.underflows += b.quantization.underflows;
      total.subnormals += b.quantization.subnormals;
      total.max_rel_error = std::max(total.max_rel_error, b.quantization.max_rel_error);
    }
  }
  return total;
}

MultiVector PartitionedOperator::Apply(const MultiVector& x) {
  ++counters_.projections;
  return Run(forward_, x);
}

MultiVector PartitionedOperator::ApplyTranspose(const MultiVector& y) {
  ++counters_.backprojections;
  return Run(backward_, y);
}

MultiVector PartitionedOperator::Run(const Side& side, const MultiVector& in) {
  if (in.length != side.in_length) {
    throw std::invalid_argument("operator input has " + std::to_string(in.length) +
                                " elements per slice, expected " + std::to_string(side.in_length));
  }
  const Precision precision = config_.precision;
  const int ff = config_.ffactor;
  const auto pd = static_cast<std::size_t>(config_.pd);
  MultiVector out(side.out_length, in.columns);
  const auto group_sizes =
      BalancedSplit(static_cast<std::size_t>(in.columns), static_cast<std::size_t>(config_.pb));
  const double bytes_per_element = static_cast<double>(StorageBytes(precision)) * ff;

  std::size_t first = 0;
  for (std::size_t b = 0; b < group_sizes.size(); ++b) {
    const CommPlan& plan = side.plans[b];
    const auto slots = placement_.Group(static_cast<int>(b));
    const std::size_t end = first + group_sizes[b];
    for (std::size_t start = first; start < end; start += static_cast<std::size_t>(ff)) {
      const int used = static_cast<int>(std::min<std::size_t>(ff, end - start));
      std::vector<std::vector<double>> columns(static_cast<std::size_t>(used));
      std::vector<double> factor(static_cast<std::size_t>(ff), 1.0);
      for (int f = 0; f < used; ++f) {
        const auto src = in.column(static_cast<int>(start) + f);
        auto& col = columns[static_cast<std::size_t>(f)];
        col.assign(src.begin(), src.end());
        if (config_.normalize) {
          factor[static_cast<std::size_t>(f)] = NormalizeInPlace(col, precision).factor;
        } else {
          for (double& v : col) v = QuantizeStorage(v, precision);
        }
      }

      std::vector<PartialResult> partials(pd);
      ParallelFor(config_.workers, pd, [&](std::size_t p) {
        const PackedStagedMatrix& block = side.blocks[p];
        Minibatch mb;
        mb.precision = precision;
        mb.x = MultiVector(block.num_cols, ff);
        for (int f = 0; f < used; ++f) {
          const auto& col = columns[static_cast<std::size_t>(f)];
          for (std::size_t i = 0; i < block.num_cols; ++i) mb.x.at(i, f) = col[block.col_ids[i]];
        }
        partials[p] = side.direction == Direction::kProjection ? Project(block, mb)
                                                               : Backproject(block, mb);
      });
      const ReducedValues reduced = ExecutePlan(plan, partials, side.output);

      for (std::size_t q = 0; q < pd; ++q) {
        const auto& owned = side.output.owned[q];
        for (std::size_t i = 0; i < owned.size(); ++i) {
          for (int f = 0; f < used; ++f) {
            out.at(owned[i], static_cast<int>(start) + f) =
                reduced.owned[q].at(i, f) * factor[static_cast<std::size_t>(f)] / matrix_scale_;
          }
        }
      }
      for (const auto& block : side.blocks) {
        counters_.flops += 2.0 * static_cast<double>(block.nnz) * ff;
      }
      for (const auto& level : plan.levels) {
        for (const auto& t : level.transfers) {
          const double bytes = static_cast<double>(t.elements.size()) * bytes_per_element;
          counters_.comm_bytes += bytes;
          if (Classify(slots[static_cast<std::size_t>(t.sender)],
                       slots[static_cast<std::size_t>(t.receiver)]) == LinkClass::kInter) {
            counters_.inter_node_bytes += bytes;
          }
        }
      }
    }
    first = end;
  }
  return out;
}

}  // namespace xct
