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

#include "xct/engine.hpp"

namespace xct {

std::size_t EntryBytes(Precision p) {
  switch (p) {
    case Precision::kDouble:
      return sizeof(StagedEntry<double>);
    case Precision::kSingle:
      return sizeof(StagedEntry<float>);
    case Precision::kHalf:
    case Precision::kMixed:
      return sizeof(PackedEntry);
  }
  return sizeof(PackedEntry);
}

KernelCounters FlopsAndBytes(const PackedStagedMatrix& block, int ffactor, Precision precision) {
  KernelCounters c;
  const double ff = static_cast<double>(ffactor);
  const double storage = static_cast<double>(StorageBytes(precision));
  c.flops = 2.0 * static_cast<double>(block.nnz) * ff;
  c.bytes = static_cast<double>(block.stored_slots()) * kWarpWidth *
                static_cast<double>(EntryBytes(precision)) +
            static_cast<double>(block.mapped_elements()) * ff * storage +
            static_cast<double>(block.num_rows) * ff * storage;
  c.intensity = c.bytes > 0.0 ? c.flops / c.bytes : 0.0;
  return c;
}

}  // namespace xct
