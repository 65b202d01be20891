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

#ifndef XCT_SPARSE_HPP_
#define XCT_SPARSE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace xct {

// Compressed sparse rows with double values. Entries within a row keep the
// order they were appended in (ray order for system matrices).
struct CsrMatrix {
  std::size_t num_rows = 0;
  std::size_t num_cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const { return col.size(); }
  std::size_t row_size(std::size_t r) const { return row_ptr[r + 1] - row_ptr[r]; }
  std::span<const std::uint32_t> row_cols(std::size_t r) const {
    return {col.data() + row_ptr[r], row_size(r)};
  }
  std::span<const double> row_vals(std::size_t r) const {
    return {val.data() + row_ptr[r], row_size(r)};
  }

  // Throws std::invalid_argument if the arrays are inconsistent.
  void Validate() const;
};

// Structural transpose; output rows list entries in increasing source row.
CsrMatrix Transpose(const CsrMatrix& m);

// Copy with every row's entries sorted by column. Used for comparisons.
CsrMatrix SortedRows(const CsrMatrix& m);

// Exact entrywise equality of two matrices (row orders ignored).
bool SameEntries(const CsrMatrix& a, const CsrMatrix& b);

std::vector<double> ToDense(const CsrMatrix& m);

CsrMatrix Identity(std::size_t n);

// Column-major block of vectors: element i of column f is values[f*length+i].
struct MultiVector {
  std::size_t length = 0;
  int columns = 0;
  std::vector<double> values;

  MultiVector() = default;
  MultiVector(std::size_t len, int cols)
      : length(len), columns(cols), values(len * static_cast<std::size_t>(cols), 0.0) {}

  double& at(std::size_t i, int f) { return values[static_cast<std::size_t>(f) * length + i]; }
  double at(std::size_t i, int f) const {
    return values[static_cast<std::size_t>(f) * length + i];
  }
  std::span<double> column(int f) {
    return {values.data() + static_cast<std::size_t>(f) * length, length};
  }
  std::span<const double> column(int f) const {
    return {values.data() + static_cast<std::size_t>(f) * length, length};
  }
};

}  // namespace xct

#endif  // XCT_SPARSE_HPP_
