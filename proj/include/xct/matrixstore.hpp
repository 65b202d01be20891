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

#ifndef XCT_MATRIXSTORE_HPP_
#define XCT_MATRIXSTORE_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "xct/hilbert.hpp"
#include "xct/precision.hpp"
#include "xct/sparse.hpp"

namespace xct {

// Which process owns each element of a domain.
struct Ownership {
  std::size_t domain_size = 0;
  std::vector<int> owner_of;                   // element -> process
  std::vector<std::vector<std::uint32_t>> owned;  // process -> elements

  // Throws if the subdomains overlap or leave elements uncovered.
  static Ownership FromSubdomains(const std::vector<Subdomain>& parts, std::size_t domain_size);
  static Ownership FromLists(std::size_t domain_size,
                             std::vector<std::vector<std::uint32_t>> lists);
  int num_procs() const { return static_cast<int>(owned.size()); }
};

// A slice of A (projection) or A^T (backprojection) held by one process, with
// local row/column numbering. row_ids/col_ids map local -> global.
struct MatrixBlock {
  int owner = 0;
  Direction direction = Direction::kProjection;
  std::vector<std::uint32_t> row_ids;
  std::vector<std::uint32_t> col_ids;
  CsrMatrix local;
};

struct PartitionedMatrix {
  std::vector<MatrixBlock> projection;      // columns = tomogram subdomain p
  std::vector<MatrixBlock> backprojection;  // columns = sinogram subdomain p
};

// Every nonzero of A lands in exactly one projection block and exactly one
// backprojection block. Block rows are ordered along the target domain's
// curve so thread-block partitions stay compact.
PartitionedMatrix PartitionMatrix(const CsrMatrix& a, const std::vector<Subdomain>& tomogram_parts,
                                  const std::vector<Subdomain>& sinogram_parts);

MatrixBlock TransposeBlock(const MatrixBlock& block);

// Scatters blocks back into one global matrix of the given shape.
CsrMatrix Reassemble(const std::vector<MatrixBlock>& blocks, std::size_t num_rows,
                     std::size_t num_cols);

// 4-byte packed entry: stage-local index plus half-precision length.
struct PackedEntry {
  std::uint16_t index = 0;
  Half length;
};
static_assert(sizeof(PackedEntry) == 4);

template <typename Length>
struct StagedEntry {
  std::uint16_t index = 0;
  Length length{};
};

class StageSplitRequired : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuantizationReport {
  std::size_t count = 0;
  std::size_t underflows = 0;  // nonzero lengths below the half subnormal minimum
  std::size_t subnormals = 0;
  double max_rel_error = 0.0;
};

struct PackResult {
  std::vector<PackedEntry> entries;
  QuantizationReport report;
};

// Throws StageSplitRequired if an index does not fit 16 bits. Underflowing
// lengths are reported (they would round to zero) and clamped to the smallest
// subnormal so the entry stays structurally nonzero.
PackResult Pack(std::span<const std::uint32_t> indices, std::span<const double> lengths);
void Unpack(std::span<const PackedEntry> entries, std::vector<std::uint32_t>* indices,
            std::vector<double>* lengths);

// Multiplies every length by 1/median so the median maps to 1.0 (the voxel
// size is scaled up by the same factor). Returns the factor applied.
double RescaleForHalf(CsrMatrix* m);

inline constexpr int kWarpWidth = 32;
inline constexpr std::size_t kDefaultStageCapacityBytes = 96 * 1024;
inline constexpr std::size_t kUnboundedStageCapacity = std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t kMaxStageElements = 65536;
inline constexpr std::size_t kDefaultRowsPerPartition = 256;

struct StagingOptions {
  std::size_t stage_capacity_bytes = kDefaultStageCapacityBytes;
  int ffactor = 16;
  Precision precision = Precision::kDouble;
};

// Input elements one stage can hold: capacity / (storage bytes * ffactor),
// capped by the 16-bit index range. Throws if not even one element fits.
std::size_t StageElements(std::size_t stage_capacity_bytes, Precision precision, int ffactor);
std::size_t StageCount(std::size_t footprint_elements, std::size_t stage_capacity_bytes,
                       Precision precision, int ffactor);

using EntryStore = std::variant<std::vector<StagedEntry<double>>,
                                std::vector<StagedEntry<float>>, std::vector<PackedEntry>>;

// Execution layout of one block. Thread-block partitions own contiguous local
// rows; each partition walks its input footprint in stages that fit the
// scratch capacity. Inside a stage, rows are grouped W at a time and their
// entries interleaved (slot n, lane l at entries[n*W + l]) with zero padding
// up to the longest row of the group.
struct PackedStagedMatrix {
  int owner = 0;
  Direction direction = Direction::kProjection;
  Precision precision = Precision::kDouble;
  int ffactor = 1;
  std::size_t stage_capacity_bytes = kDefaultStageCapacityBytes;
  std::size_t stage_elements = 0;
  std::size_t num_rows = 0;
  std::size_t num_cols = 0;
  std::size_t nnz = 0;
  std::vector<std::uint32_t> row_ids;
  std::vector<std::uint32_t> col_ids;

  std::vector<std::uint32_t> partition_displ;  // partition -> range in partition_rows
  std::vector<std::uint32_t> partition_rows;   // local rows, lane order
  std::vector<std::uint32_t> buffdispl;        // partition -> stage range
  std::vector<std::uint32_t> mapdispl;         // stage -> offset in buffmap
  std::vector<std::uint32_t> mapnz;            // stage -> mapped elements
  std::vector<std::uint32_t> buffmap;          // stage slot -> local input column
  std::vector<std::uint32_t> warpdispl;        // stage -> first warp group
  std::vector<std::uint32_t> displ;            // warp group -> slot range
  EntryStore entries;
  QuantizationReport quantization;

  std::size_t num_partitions() const { return buffdispl.empty() ? 0 : buffdispl.size() - 1; }
  std::size_t num_stages() const { return mapnz.size(); }
  std::size_t stored_slots() const { return displ.empty() ? 0 : displ.back(); }
  std::size_t entry_bytes() const;
  std::size_t mapped_elements() const;
};

std::vector<std::vector<std::uint32_t>> ContiguousRowPartitions(std::size_t num_rows,
                                                                std::size_t rows_per_partition);

PackedStagedMatrix BuildStaged(const MatrixBlock& block,
                               const std::vector<std::vector<std::uint32_t>>& partitions,
                               const StagingOptions& options);

// Replays stage maps and entries back into a local CSR matrix (values as
// stored, padding dropped).
CsrMatrix Unstage(const PackedStagedMatrix& staged);

// Headroom kept below the half maximum (65504) for accumulation overshoot.
inline constexpr double kHalfSafeMax = 60000.0;
inline constexpr double kNormalizationTarget = 1.0;

struct NormalizationState {
  double factor = 1.0;
  Precision mode = Precision::kDouble;
};

// Scales v so its max-norm equals the target and rounds it to the mode's
// storage type. A zero vector is left alone with factor 1.
std::pair<std::vector<double>, NormalizationState> Normalize(std::span<const double> v,
                                                             Precision mode);
NormalizationState NormalizeInPlace(std::span<double> v, Precision mode);
std::vector<double> Denormalize(std::span<const double> v, const NormalizationState& state);
void DenormalizeInPlace(std::span<double> v, const NormalizationState& state);

}  // namespace xct

#endif  // XCT_MATRIXSTORE_HPP_
