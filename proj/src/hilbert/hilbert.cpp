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

#include "xct/hilbert.hpp"

namespace xct {

TileCoord HilbertD2XY(int order, std::uint64_t d) {
  if (order < 0 || order > 31) throw std::invalid_argument("hilbert order out of range");
  const std::uint64_t side = std::uint64_t{1} << order;
  if (d >= side * side) {
    throw std::out_of_range("hilbert index " + std::to_string(d) + " outside a curve of order " +
                            std::to_string(order));
  }
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  std::uint64_t t = d;
  for (std::uint64_t s = 1; s < side; s <<= 1) {
    const std::uint64_t rx = 1 & (t >> 1);
    const std::uint64_t rz = 1 & (t ^ rx);
    if (rz == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        z = s - 1 - z;
      }
      std::swap(x, z);
    }
    x += s * rx;
    z += s * rz;
    t >>= 2;
  }
  return {static_cast<int>(x), static_cast<int>(z)};
}

std::vector<TileCoord> PseudoHilbertOrder(int tiles_x, int tiles_z) {
  if (tiles_x < 1 || tiles_z < 1) {
    throw std::invalid_argument("tile grid dimensions must be positive");
  }
  int order = 0;
  while ((1 << order) < tiles_x || (1 << order) < tiles_z) ++order;
  const std::uint64_t cells = std::uint64_t{1} << (2 * order);
  std::vector<TileCoord> out;
  out.reserve(static_cast<std::size_t>(tiles_x) * static_cast<std::size_t>(tiles_z));
  for (std::uint64_t d = 0; d < cells; ++d) {
    const TileCoord c = HilbertD2XY(order, d);
    if (c.x < tiles_x && c.z < tiles_z) out.push_back(c);
  }
  return out;
}

TileGrid MakeTileGrid(Domain domain, int extent_x, int extent_z, int tile_size) {
  if (extent_x < 1 || extent_z < 1) throw std::invalid_argument("domain extent must be positive");
  if (tile_size < 1) throw std::invalid_argument("tile size must be at least 1");
  TileGrid g;
  g.domain = domain;
  g.extent_x = extent_x;
  g.extent_z = extent_z;
  g.tile_size = tile_size;
  g.tiles_x = (extent_x + tile_size - 1) / tile_size;
  g.tiles_z = (extent_z + tile_size - 1) / tile_size;
  return g;
}

TileGrid TomogramTileGrid(const ScanGeometry& g, int tile_size) {
  return MakeTileGrid(Domain::kTomogram, g.grid_n, g.grid_n, tile_size);
}

TileGrid SinogramTileGrid(const ScanGeometry& g, int tile_size) {
  return MakeTileGrid(Domain::kSinogram, g.num_detector_cols, g.num_angles, tile_size);
}

std::vector<std::uint32_t> TileGrid::TileElements(TileCoord tile) const {
  const int x0 = tile.x * tile_size;
  const int z0 = tile.z * tile_size;
  const int w = std::min(tile_size, extent_x - x0);
  const int h = std::min(tile_size, extent_z - z0);
  if (tile.x < 0 || tile.z < 0 || w <= 0 || h <= 0) {
    throw std::out_of_range("tile outside the grid");
  }
  std::vector<std::uint32_t> out;
  out.reserve(static_cast<std::size_t>(w * h));
  for (const TileCoord c : PseudoHilbertOrder(w, h)) {
    out.push_back(static_cast<std::uint32_t>((z0 + c.z) * extent_x + (x0 + c.x)));
  }
  return out;
}

std::vector<std::uint32_t> CurveOrder(const TileGrid& grid) {
  std::vector<std::uint32_t> out;
  out.reserve(grid.num_elements());
  for (const TileCoord t : PseudoHilbertOrder(grid.tiles_x, grid.tiles_z)) {
    const auto tile = grid.TileElements(t);
    out.insert(out.end(), tile.begin(), tile.end());
  }
  return out;
}

}  // namespace xct
