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
#include <stdexcept>
#include <string>

#include "xct/matrixstore.hpp"

namespace xct {

std::size_t StageElements(std::size_t stage_capacity_bytes, Precision precision, int ffactor) {
  if (ffactor < 1) throw std::invalid_argument("fusing factor must be at least 1");
  const std::size_t per_element = StorageBytes(precision) * static_cast<std::size_t>(ffactor);
  const std::size_t fit = stage_capacity_bytes / per_element;
  if (fit == 0) {
    throw std::invalid_argument("stage capacity of " + std::to_string(stage_capacity_bytes) +
                                " bytes cannot hold one element row of " +
                                std::to_string(per_element) + " bytes");
  }
  return std::min(fit, kMaxStageElements);
}

std::size_t StageCount(std::size_t footprint_elements, std::size_t stage_capacity_bytes,
                       Precision precision, int ffactor) {
  const std::size_t per_stage = StageElements(stage_capacity_bytes, precision, ffactor);
  return std::max<std::size_t>(1, (footprint_elements + per_stage - 1) / per_stage);
}

std::size_t PackedStagedMatrix::entry_bytes() const {
  return std::visit(
      [](const auto& v) { return v.size() * sizeof(typename std::decay_t<decltype(v)>::value_type); },
      entries);
}

std::size_t PackedStagedMatrix::mapped_elements() const { return buffmap.size(); }

std::vector<std::vector<std::uint32_t>> ContiguousRowPartitions(std::size_t num_rows,
                                                                std::size_t rows_per_partition) {
  if (rows_per_partition == 0) throw std::invalid_argument("rows per partition must be positive");
  std::vector<std::vector<std::uint32_t>> parts;
  if (num_rows == 0) return parts;
  const std::size_t count = (num_rows + rows_per_partition - 1) / rows_per_partition;
  std::uint32_t next = 0;
  for (std::size_t size : BalancedSplit(num_rows, count)) {
    auto& p = parts.emplace_back(size);
    for (auto& r : p) r = next++;
  }
  return parts;
}

PackedStagedMatrix BuildStaged(const MatrixBlock& block,
                               const std::vector<std::vector<std::uint32_t>>& partitions,
                               const StagingOptions& options) {
  const CsrMatrix& m = block.local;
  PackedStagedMatrix out;
  out.owner = block.owner;
  out.direction = block.direction;
  out.precision = options.precision;
  out.ffactor = options.ffactor;
  out.stage_capacity_bytes = options.stage_capacity_bytes;
  out.stage_elements = StageElements(options.stage_capacity_bytes, options.precision, options.ffactor);
  out.num_rows = m.num_rows;
  out.num_cols = m.num_cols;
  out.nnz = m.nnz();
  out.row_ids = block.row_ids;
  out.col_ids = block.col_ids;

  std::vector<char> covered(m.num_rows, 0);
  for (const auto& part : partitions) {
    if (part.empty()) throw std::invalid_argument("empty thread-block partition");
    for (auto r : part) {
      if (r >= m.num_rows || covered[r]) {
        throw std::invalid_argument("partitions must cover each block row exactly once");
      }
      covered[r] = 1;
    }
  }
  if (std::find(covered.begin(), covered.end(), 0) != covered.end()) {
    throw std::invalid_argument("partitions leave block rows uncovered");
  }

  const std::size_t se = out.stage_elements;
  std::vector<std::int64_t> stage_slot(m.num_cols, -1);
  std::vector<std::uint32_t> slot_index;
  std::vector<double> slot_length;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> lane_entries(kWarpWidth);

  out.partition_displ.push_back(0);
  out.buffdispl.push_back(0);
  out.displ.push_back(0);
  for (const auto& part : partitions) {
    out.partition_rows.insert(out.partition_rows.end(), part.begin(), part.end());
    out.partition_displ.push_back(static_cast<std::uint32_t>(out.partition_rows.size()));

    std::vector<std::uint32_t> footprint;
    for (auto r : part) {
      const auto cols = m.row_cols(r);
      footprint.insert(footprint.end(), cols.begin(), cols.end());
    }
    std::sort(footprint.begin(), footprint.end());
    footprint.erase(std::unique(footprint.begin(), footprint.end()), footprint.end());

    const std::size_t stages = std::max<std::size_t>(1, (footprint.size() + se - 1) / se);
    const std::size_t warps = (part.size() + kWarpWidth - 1) / kWarpWidth;
    for (std::size_t s = 0; s < stages; ++s) {
      const std::size_t begin = s * se;
      const std::size_t end = std::min(footprint.size(), begin + se);
      out.mapdispl.push_back(static_cast<std::uint32_t>(out.buffmap.size()));
      out.mapnz.push_back(static_cast<std::uint32_t>(end - begin));
      for (std::size_t j = begin; j < end; ++j) {
        out.buffmap.push_back(footprint[j]);
        stage_slot[footprint[j]] = static_cast<std::int64_t>(j - begin);
      }
      out.warpdispl.push_back(static_cast<std::uint32_t>(out.displ.size() - 1));
      for (std::size_t w = 0; w < warps; ++w) {
        std::size_t slots = 0;
        for (int lane = 0; lane < kWarpWidth; ++lane) {
          auto& le = lane_entries[static_cast<std::size_t>(lane)];
          le.clear();
          const std::size_t i = w * kWarpWidth + static_cast<std::size_t>(lane);
          if (i >= part.size()) continue;
          const auto r = part[i];
          for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
            const auto slot = stage_slot[m.col[k]];
            if (slot >= 0) le.emplace_back(static_cast<std::uint32_t>(slot), m.val[k]);
          }
          slots = std::max(slots, le.size());
        }
        for (std::size_t n = 0; n < slots; ++n) {
          for (const auto& le : lane_entries) {
            if (n < le.size()) {
              slot_index.push_back(le[n].first);
              slot_length.push_back(le[n].second);
            } else {
              slot_index.push_back(0);
              slot_length.push_back(0.0);
            }
          }
        }
        out.displ.push_back(static_cast<std::uint32_t>(out.displ.back() + slots));
      }
      for (std::size_t j = begin; j < end; ++j) stage_slot[footprint[j]] = -1;
    }
    out.buffdispl.push_back(static_cast<std::uint32_t>(out.mapnz.size()));
  }

  switch (options.precision) {
    case Precision::kDouble: {
      std::vector<StagedEntry<double>> e(slot_index.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = {static_cast<std::uint16_t>(slot_index[i]), slot_length[i]};
      }
      out.entries = std::move(e);
      out.quantization.count = out.nnz;
      break;
    }
    case Precision::kSingle: {
      std::vector<StagedEntry<float>> e(slot_index.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = {static_cast<std::uint16_t>(slot_index[i]), static_cast<float>(slot_length[i])};
      }
      out.entries = std::move(e);
      out.quantization.count = out.nnz;
      break;
    }
    case Precision::kHalf:
    case Precision::kMixed: {
      PackResult packed = Pack(slot_index, slot_length);
      out.quantization = packed.report;
      out.quantization.count = out.nnz;
      out.entries = std::move(packed.entries);
      break;
    }
  }
  return out;
}

namespace {

template <typename Entry>
double LengthOf(const Entry& e) {
  if constexpr (std::is_same_v<Entry, PackedEntry>) {
    return e.length.ToDouble();
  } else {
    return static_cast<double>(e.length);
  }
}

}  // namespace

CsrMatrix Unstage(const PackedStagedMatrix& staged) {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(staged.num_rows);
  std::visit(
      [&](const auto& entries) {
        for (std::size_t p = 0; p < staged.num_partitions(); ++p) {
          const std::uint32_t row_base = staged.partition_displ[p];
          const std::size_t part_rows = staged.partition_displ[p + 1] - row_base;
          for (std::uint32_t s = staged.buffdispl[p]; s < staged.buffdispl[p + 1]; ++s) {
            const std::size_t warps = (part_rows + kWarpWidth - 1) / kWarpWidth;
            for (std::size_t w = 0; w < warps; ++w) {
              const std::size_t warp = staged.warpdispl[s] + w;
              for (std::uint32_t n = staged.displ[warp]; n < staged.displ[warp + 1]; ++n) {
                for (int lane = 0; lane < kWarpWidth; ++lane) {
                  const auto& e = entries[static_cast<std::size_t>(n) * kWarpWidth +
                                          static_cast<std::size_t>(lane)];
                  const double len = LengthOf(e);
                  if (len == 0.0) continue;
                  const std::size_t i = w * kWarpWidth + static_cast<std::size_t>(lane);
                  const auto row = staged.partition_rows[row_base + i];
                  const auto col = staged.buffmap[staged.mapdispl[s] + e.index];
                  rows[row].emplace_back(col, len);
                }
              }
            }
          }
        }
      },
      staged.entries);
  CsrMatrix m;
  m.num_rows = staged.num_rows;
  m.num_cols = staged.num_cols;
  m.row_ptr.assign(m.num_rows + 1, 0);
  for (std::size_t r = 0; r < m.num_rows; ++r) {
    std::sort(rows[r].begin(), rows[r].end());
    for (const auto& [c, v] : rows[r]) {
      m.col.push_back(c);
      m.val.push_back(v);
    }
    m.row_ptr[r + 1] = m.col.size();
  }
  return m;
}

}  // namespace xct
