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

#ifndef XCT_ENGINE_HPP_
#define XCT_ENGINE_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xct/matrixstore.hpp"
#include "xct/precision.hpp"
#include "xct/sparse.hpp"

namespace xct {

inline constexpr int kDefaultFfactor = 16;
inline constexpr int kMaxFfactor = 50;

// FFACTOR slices fused into one multiply. Columns hold values already
// representable in the storage type of the precision mode.
struct Minibatch {
  Precision precision = Precision::kDouble;
  MultiVector x;

  int ffactor() const { return x.columns; }
};

struct PartialResult {
  int owner = 0;
  std::vector<std::uint32_t> elements;  // global ids of the output rows
  Precision precision = Precision::kDouble;
  MultiVector values;                   // elements.size() x FFACTOR
};

// Row-ordered accumulation in double. Ground truth for the staged kernels.
MultiVector SpmmReference(const CsrMatrix& block, const MultiVector& x);

// Staged kernel on block-local vectors: x has block.num_cols rows, the
// result block.num_rows rows, both FFACTOR columns wide. Output values are
// rounded to the storage type of the block's precision.
MultiVector ApplyStaged(const PackedStagedMatrix& block, const MultiVector& x);

// Both take a minibatch over the block's input elements (col_ids order) and
// return the partial result over its footprint (row_ids order).
PartialResult Project(const PackedStagedMatrix& block, const Minibatch& minibatch);
PartialResult Backproject(const PackedStagedMatrix& block, const Minibatch& minibatch);

// a + b as performed by the compute type of p, rounded back to storage.
double AccumulateStep(double a, double b, Precision p);

// Owned totals per process, each in the order of ownership.owned[q].
struct ReducedValues {
  std::vector<MultiVector> owned;
};

// Sums contributions per element with contributors ordered by process id.
ReducedValues ReducePartials(const std::vector<PartialResult>& partials,
                             const Ownership& ownership);

struct KernelCounters {
  double flops = 0.0;
  double bytes = 0.0;
  double intensity = 0.0;
};

// Entry bytes per stored slot under a precision mode (16, 8, 4, 4).
std::size_t EntryBytes(Precision p);

KernelCounters FlopsAndBytes(const PackedStagedMatrix& block, int ffactor, Precision precision);

}  // namespace xct

#endif  // XCT_ENGINE_HPP_
