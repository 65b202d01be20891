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

#include "xct/hilbert.hpp"

namespace xct {

std::vector<std::size_t> BalancedSplit(std::size_t count, std::size_t parts) {
  if (parts == 0) throw std::invalid_argument("cannot split into zero parts");
  std::vector<std::size_t> sizes(parts, count / parts);
  for (std::size_t i = 0; i < count % parts; ++i) ++sizes[i];
  return sizes;
}

std::vector<Subdomain> Decompose(const TileGrid& grid, int num_parts) {
  if (num_parts < 1) throw std::invalid_argument("process count must be at least 1");
  if (static_cast<std::size_t>(num_parts) > grid.num_tiles()) {
    throw std::invalid_argument("cannot split " + std::to_string(grid.num_tiles()) +
                                " tiles among " + std::to_string(num_parts) + " processes");
  }
  const auto order = PseudoHilbertOrder(grid.tiles_x, grid.tiles_z);
  const auto sizes = BalancedSplit(order.size(), static_cast<std::size_t>(num_parts));
  std::vector<Subdomain> parts(sizes.size());
  std::size_t next = 0;
  for (std::size_t p = 0; p < sizes.size(); ++p) {
    Subdomain& s = parts[p];
    s.id = static_cast<int>(p);
    s.owner = static_cast<int>(p);
    s.domain = grid.domain;
    for (std::size_t i = 0; i < sizes[p]; ++i, ++next) {
      s.tiles.push_back(order[next]);
      const auto tile = grid.TileElements(order[next]);
      s.elements.insert(s.elements.end(), tile.begin(), tile.end());
    }
  }
  return parts;
}

std::vector<BlockPartition> BlockDecompose(const Subdomain& subdomain, int block_count) {
  if (block_count < 1) throw std::invalid_argument("block count must be at least 1");
  if (static_cast<std::size_t>(block_count) > subdomain.elements.size()) {
    throw std::invalid_argument("block count " + std::to_string(block_count) + " exceeds the " +
                                std::to_string(subdomain.elements.size()) +
                                " elements of subdomain " + std::to_string(subdomain.id));
  }
  const auto sizes = BalancedSplit(subdomain.elements.size(), static_cast<std::size_t>(block_count));
  std::vector<BlockPartition> blocks(sizes.size());
  auto it = subdomain.elements.begin();
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    blocks[b].id = static_cast<int>(b);
    blocks[b].elements.assign(it, it + static_cast<std::ptrdiff_t>(sizes[b]));
    it += static_cast<std::ptrdiff_t>(sizes[b]);
  }
  return blocks;
}

}  // namespace xct
