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

#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>

#include "xct/engine.hpp"

namespace xct {

MultiVector SpmmReference(const CsrMatrix& block, const MultiVector& x) {
  if (x.length != block.num_cols) {
    throw std::invalid_argument("spmm: input has " + std::to_string(x.length) +
                                " rows, block has " + std::to_string(block.num_cols) + " columns");
  }
  MultiVector y(block.num_rows, x.columns);
  for (int f = 0; f < x.columns; ++f) {
    const auto in = x.column(f);
    auto out = y.column(f);
    for (std::size_t r = 0; r < block.num_rows; ++r) {
      double acc = 0.0;
      for (std::size_t k = block.row_ptr[r]; k < block.row_ptr[r + 1]; ++k) {
        acc += block.val[k] * in[block.col[k]];
      }
      out[r] = acc;
    }
  }
  return y;
}

namespace {

// Arithmetic of each mode. Half mode keeps its accumulator in double but
// rounds every product and sum to binary16, which is exact emulation since
// both operands are binary16 values.
struct DoubleMath {
  using Acc = double;
  static Acc Fma(Acc acc, double len, Acc x) { return acc + len * x; }
};
struct SingleMath {
  using Acc = float;
  static Acc Fma(Acc acc, double len, Acc x) { return acc + static_cast<float>(len) * x; }
};
struct HalfMath {
  using Acc = double;
  static Acc Fma(Acc acc, double len, Acc x) { return RoundToHalf(acc + RoundToHalf(len * x)); }
};

template <typename Entry>
double EntryLength(const Entry& e) {
  if constexpr (std::is_same_v<Entry, PackedEntry>) {
    return e.length.ToDouble();
  } else {
    return static_cast<double>(e.length);
  }
}

template <typename Math, typename Entry>
void RunKernel(const PackedStagedMatrix& m, const std::vector<Entry>& entries,
               const MultiVector& x, MultiVector* y) {
  using Acc = typename Math::Acc;
  const std::size_t ff = static_cast<std::size_t>(x.columns);
  std::vector<Acc> scratch(m.stage_elements * ff);
  std::vector<Acc> acc;
  for (std::size_t p = 0; p < m.num_partitions(); ++p) {
    const std::uint32_t row_base = m.partition_displ[p];
    const std::size_t rows = m.partition_displ[p + 1] - row_base;
    const std::size_t warps = (rows + kWarpWidth - 1) / kWarpWidth;
    acc.assign(rows * ff, Acc(0));
    for (std::uint32_t s = m.buffdispl[p]; s < m.buffdispl[p + 1]; ++s) {
      const std::uint32_t* map = m.buffmap.data() + m.mapdispl[s];
      for (std::uint32_t j = 0; j < m.mapnz[s]; ++j) {
        for (std::size_t f = 0; f < ff; ++f) {
          scratch[j * ff + f] = static_cast<Acc>(x.at(map[j], static_cast<int>(f)));
        }
      }
      for (std::size_t w = 0; w < warps; ++w) {
        const std::size_t warp = m.warpdispl[s] + w;
        for (std::uint32_t n = m.displ[warp]; n < m.displ[warp + 1]; ++n) {
          const Entry* slot = entries.data() + static_cast<std::size_t>(n) * kWarpWidth;
          for (int lane = 0; lane < kWarpWidth; ++lane) {
            const double len = EntryLength(slot[lane]);
            if (len == 0.0) continue;
            const std::size_t i = w * kWarpWidth + static_cast<std::size_t>(lane);
            const Acc* in = scratch.data() + static_cast<std::size_t>(slot[lane].index) * ff;
            Acc* out = acc.data() + i * ff;
            for (std::size_t f = 0; f < ff; ++f) out[f] = Math::Fma(out[f], len, in[f]);
          }
        }
      }
    }
    for (std::size_t i = 0; i < rows; ++i) {
      const std::uint32_t r = m.partition_rows[row_base + i];
      for (std::size_t f = 0; f < ff; ++f) {
        y->at(r, static_cast<int>(f)) =
            QuantizeStorage(static_cast<double>(acc[i * ff + f]), m.precision);
      }
    }
  }
}

void CheckMinibatch(const PackedStagedMatrix& block, const Minibatch& mb) {
  if (mb.ffactor() != block.ffactor) {
    throw std::invalid_argument("minibatch FFACTOR " + std::to_string(mb.ffactor()) +
                                " does not match staging FFACTOR " +
                                std::to_string(block.ffactor));
  }
  if (mb.precision != block.precision) {
    throw std::invalid_argument("minibatch precision " + std::string(PrecisionName(mb.precision)) +
                                " does not match staged precision " +
                                std::string(PrecisionName(block.precision)));
  }
}

PartialResult RunBlock(const PackedStagedMatrix& block, const Minibatch& mb, Direction expected) {
  if (block.direction != expected) {
    throw std::invalid_argument("staged block was built for the other direction");
  }
  CheckMinibatch(block, mb);
  PartialResult out;
  out.owner = block.owner;
  out.elements = block.row_ids;
  out.precision = block.precision;
  out.values = ApplyStaged(block, mb.x);
  return out;
}

}  // namespace

MultiVector ApplyStaged(const PackedStagedMatrix& block, const MultiVector& x) {
  if (x.length != block.num_cols) {
    throw std::invalid_argument("staged kernel: input has " + std::to_string(x.length) +
                                " rows, block has " + std::to_string(block.num_cols) + " columns");
  }
  if (x.columns != block.ffactor) {
    throw std::invalid_argument("staged kernel: input has " + std::to_string(x.columns) +
                                " columns, block was staged for FFACTOR " +
                                std::to_string(block.ffactor));
  }
  MultiVector y(block.num_rows, x.columns);
  std::visit(
      [&](const auto& entries) {
        switch (block.precision) {
          case Precision::kDouble:
            RunKernel<DoubleMath>(block, entries, x, &y);
            break;
          case Precision::kSingle:
          case Precision::kMixed:
            RunKernel<SingleMath>(block, entries, x, &y);
            break;
          case Precision::kHalf:
            RunKernel<HalfMath>(block, entries, x, &y);
            break;
        }
      },
      block.entries);
  return y;
}

PartialResult Project(const PackedStagedMatrix& block, const Minibatch& minibatch) {
  return RunBlock(block, minibatch, Direction::kProjection);
}

PartialResult Backproject(const PackedStagedMatrix& block, const Minibatch& minibatch) {
  return RunBlock(block, minibatch, Direction::kBackprojection);
}

}  // namespace xct
