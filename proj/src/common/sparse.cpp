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

#include "xct/sparse.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace xct {

void CsrMatrix::Validate() const {
  if (row_ptr.size() != num_rows + 1 || row_ptr.front() != 0 ||
      row_ptr.back() != col.size() || col.size() != val.size()) {
    throw std::invalid_argument("CsrMatrix: inconsistent array sizes");
  }
  for (std::size_t r = 0; r < num_rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) {
      throw std::invalid_argument("CsrMatrix: row_ptr not monotone at row " +
                                  std::to_string(r));
    }
  }
  for (auto c : col) {
    if (c >= num_cols) throw std::invalid_argument("CsrMatrix: column index out of range");
  }
}

CsrMatrix Transpose(const CsrMatrix& m) {
  CsrMatrix t;
  t.num_rows = m.num_cols;
  t.num_cols = m.num_rows;
  t.row_ptr.assign(m.num_cols + 1, 0);
  for (auto c : m.col) ++t.row_ptr[c + 1];
  std::partial_sum(t.row_ptr.begin(), t.row_ptr.end(), t.row_ptr.begin());
  t.col.resize(m.nnz());
  t.val.resize(m.nnz());
  std::vector<std::size_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (std::size_t r = 0; r < m.num_rows; ++r) {
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      const std::size_t slot = next[m.col[k]]++;
      t.col[slot] = static_cast<std::uint32_t>(r);
      t.val[slot] = m.val[k];
    }
  }
  return t;
}

CsrMatrix SortedRows(const CsrMatrix& m) {
  CsrMatrix s = m;
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < m.num_rows; ++r) {
    const std::size_t begin = m.row_ptr[r];
    order.resize(m.row_size(r));
    std::iota(order.begin(), order.end(), begin);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return m.col[a] < m.col[b]; });
    for (std::size_t k = 0; k < order.size(); ++k) {
      s.col[begin + k] = m.col[order[k]];
      s.val[begin + k] = m.val[order[k]];
    }
  }
  return s;
}

bool SameEntries(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.num_rows != b.num_rows || a.num_cols != b.num_cols || a.nnz() != b.nnz()) {
    return false;
  }
  const CsrMatrix sa = SortedRows(a);
  const CsrMatrix sb = SortedRows(b);
  return sa.row_ptr == sb.row_ptr && sa.col == sb.col && sa.val == sb.val;
}

std::vector<double> ToDense(const CsrMatrix& m) {
  std::vector<double> dense(m.num_rows * m.num_cols, 0.0);
  for (std::size_t r = 0; r < m.num_rows; ++r) {
    for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      dense[r * m.num_cols + m.col[k]] += m.val[k];
    }
  }
  return dense;
}

CsrMatrix Identity(std::size_t n) {
  CsrMatrix m;
  m.num_rows = n;
  m.num_cols = n;
  m.row_ptr.resize(n + 1);
  std::iota(m.row_ptr.begin(), m.row_ptr.end(), std::size_t{0});
  m.col.resize(n);
  std::iota(m.col.begin(), m.col.end(), std::uint32_t{0});
  m.val.assign(n, 1.0);
  return m;
}

}  // namespace xct
