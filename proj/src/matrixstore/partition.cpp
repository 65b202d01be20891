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
#include <numeric>
#include <stdexcept>
#include <string>

#include "xct/matrixstore.hpp"

namespace xct {
namespace {

// Position of each element along the concatenated subdomain order.
std::vector<std::uint32_t> CurveRank(const std::vector<Subdomain>& parts, std::size_t size) {
  std::vector<std::uint32_t> rank(size, 0);
  std::uint32_t next = 0;
  for (const auto& p : parts) {
    for (auto e : p.elements) rank[e] = next++;
  }
  return rank;
}

}  // namespace

Ownership Ownership::FromLists(std::size_t domain_size,
                               std::vector<std::vector<std::uint32_t>> lists) {
  Ownership o;
  o.domain_size = domain_size;
  o.owner_of.assign(domain_size, -1);
  for (std::size_t p = 0; p < lists.size(); ++p) {
    for (auto e : lists[p]) {
      if (e >= domain_size) {
        throw std::invalid_argument("owned element " + std::to_string(e) +
                                    " outside a domain of " + std::to_string(domain_size));
      }
      if (o.owner_of[e] != -1) {
        throw std::invalid_argument("element " + std::to_string(e) + " claimed by processes " +
                                    std::to_string(o.owner_of[e]) + " and " + std::to_string(p));
      }
      o.owner_of[e] = static_cast<int>(p);
    }
  }
  for (std::size_t e = 0; e < domain_size; ++e) {
    if (o.owner_of[e] == -1) {
      throw std::invalid_argument("element " + std::to_string(e) + " has no owner");
    }
  }
  o.owned = std::move(lists);
  return o;
}

Ownership Ownership::FromSubdomains(const std::vector<Subdomain>& parts, std::size_t domain_size) {
  std::vector<std::vector<std::uint32_t>> lists;
  lists.reserve(parts.size());
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (parts[p].id != static_cast<int>(p)) {
      throw std::invalid_argument("subdomain ids must be 0..P-1 in order");
    }
    lists.push_back(parts[p].elements);
  }
  return FromLists(domain_size, std::move(lists));
}

PartitionedMatrix PartitionMatrix(const CsrMatrix& a, const std::vector<Subdomain>& tomogram_parts,
                                  const std::vector<Subdomain>& sinogram_parts) {
  if (tomogram_parts.size() != sinogram_parts.size()) {
    throw std::invalid_argument("tomogram and sinogram must have the same number of subdomains");
  }
  for (const auto& p : tomogram_parts) {
    if (p.domain != Domain::kTomogram) throw std::invalid_argument("expected tomogram subdomains");
  }
  for (const auto& p : sinogram_parts) {
    if (p.domain != Domain::kSinogram) throw std::invalid_argument("expected sinogram subdomains");
  }
  const Ownership columns = Ownership::FromSubdomains(tomogram_parts, a.num_cols);
  // Rejects sinogram subdomains that do not partition the rows.
  Ownership::FromSubdomains(sinogram_parts, a.num_rows);
  const auto row_rank = CurveRank(sinogram_parts, a.num_rows);
  const auto col_rank = CurveRank(tomogram_parts, a.num_cols);
  const std::size_t procs = tomogram_parts.size();

  PartitionedMatrix out;
  out.projection.resize(procs);
  out.backprojection.resize(procs);

  // Projection: split A by column owner.
  std::vector<std::uint32_t> local_col(a.num_cols, 0);
  for (std::size_t p = 0; p < procs; ++p) {
    const auto& elems = tomogram_parts[p].elements;
    for (std::size_t j = 0; j < elems.size(); ++j) local_col[elems[j]] = static_cast<std::uint32_t>(j);
  }
  std::vector<std::vector<std::uint32_t>> proj_rows(procs);
  for (std::size_t r = 0; r < a.num_rows; ++r) {
    int last = -1;
    std::vector<int> seen;
    for (auto c : a.row_cols(r)) {
      const int p = columns.owner_of[c];
      if (p == last) continue;
      last = p;
      if (std::find(seen.begin(), seen.end(), p) == seen.end()) {
        seen.push_back(p);
        proj_rows[static_cast<std::size_t>(p)].push_back(static_cast<std::uint32_t>(r));
      }
    }
  }
  for (std::size_t p = 0; p < procs; ++p) {
    MatrixBlock& b = out.projection[p];
    b.owner = static_cast<int>(p);
    b.direction = Direction::kProjection;
    b.col_ids = tomogram_parts[p].elements;
    b.row_ids = std::move(proj_rows[p]);
    std::sort(b.row_ids.begin(), b.row_ids.end(),
              [&](std::uint32_t x, std::uint32_t y) { return row_rank[x] < row_rank[y]; });
    b.local.num_rows = b.row_ids.size();
    b.local.num_cols = b.col_ids.size();
    b.local.row_ptr.assign(b.local.num_rows + 1, 0);
    for (std::size_t i = 0; i < b.row_ids.size(); ++i) {
      const auto r = b.row_ids[i];
      for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
        if (columns.owner_of[a.col[k]] != static_cast<int>(p)) continue;
        b.local.col.push_back(local_col[a.col[k]]);
        b.local.val.push_back(a.val[k]);
      }
      b.local.row_ptr[i + 1] = b.local.col.size();
    }
  }

  // Backprojection: rows of A owned by p, transposed. Local rows are the
  // touched voxels in tomogram curve order.
  for (std::size_t p = 0; p < procs; ++p) {
    const auto& sino = sinogram_parts[p].elements;
    CsrMatrix restricted;
    restricted.num_rows = sino.size();
    restricted.num_cols = a.num_cols;
    restricted.row_ptr.assign(sino.size() + 1, 0);
    for (std::size_t i = 0; i < sino.size(); ++i) {
      const auto cols = a.row_cols(sino[i]);
      const auto vals = a.row_vals(sino[i]);
      restricted.col.insert(restricted.col.end(), cols.begin(), cols.end());
      restricted.val.insert(restricted.val.end(), vals.begin(), vals.end());
      restricted.row_ptr[i + 1] = restricted.col.size();
    }
    const CsrMatrix by_voxel = Transpose(restricted);

    MatrixBlock& b = out.backprojection[p];
    b.owner = static_cast<int>(p);
    b.direction = Direction::kBackprojection;
    b.col_ids = sino;
    for (std::size_t c = 0; c < by_voxel.num_rows; ++c) {
      if (by_voxel.row_size(c) > 0) b.row_ids.push_back(static_cast<std::uint32_t>(c));
    }
    std::sort(b.row_ids.begin(), b.row_ids.end(),
              [&](std::uint32_t x, std::uint32_t y) { return col_rank[x] < col_rank[y]; });
    b.local.num_rows = b.row_ids.size();
    b.local.num_cols = sino.size();
    b.local.row_ptr.assign(b.local.num_rows + 1, 0);
    for (std::size_t i = 0; i < b.row_ids.size(); ++i) {
      const auto cols = by_voxel.row_cols(b.row_ids[i]);
      const auto vals = by_voxel.row_vals(b.row_ids[i]);
      b.local.col.insert(b.local.col.end(), cols.begin(), cols.end());
      b.local.val.insert(b.local.val.end(), vals.begin(), vals.end());
      b.local.row_ptr[i + 1] = b.local.col.size();
    }
  }
  return out;
}

MatrixBlock TransposeBlock(const MatrixBlock& block) {
  MatrixBlock t;
  t.owner = block.owner;
  t.direction = block.direction == Direction::kProjection ? Direction::kBackprojection
                                                          : Direction::kProjection;
  t.row_ids = block.col_ids;
  t.col_ids = block.row_ids;
  t.local = Transpose(block.local);
  return t;
}

CsrMatrix Reassemble(const std::vector<MatrixBlock>& blocks, std::size_t num_rows,
                     std::size_t num_cols) {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(num_rows);
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.local.num_rows; ++i) {
      const auto gr = b.row_ids.at(i);
      if (gr >= num_rows) throw std::invalid_argument("block row outside the target shape");
      for (std::size_t k = b.local.row_ptr[i]; k < b.local.row_ptr[i + 1]; ++k) {
        const auto gc = b.col_ids.at(b.local.col[k]);
        if (gc >= num_cols) throw std::invalid_argument("block column outside the target shape");
        rows[gr].emplace_back(gc, b.local.val[k]);
      }
    }
  }
  CsrMatrix m;
  m.num_rows = num_rows;
  m.num_cols = num_cols;
  m.row_ptr.assign(num_rows + 1, 0);
  for (std::size_t r = 0; r < num_rows; ++r) {
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
