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

#ifndef XCT_HILBERT_HPP_
#define XCT_HILBERT_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "xct/geometry.hpp"
#include "xct/sparse.hpp"

namespace xct {

// Plane a tile grid lives on. Tomogram: x (fast) by z, element = z*width + x.
// Sinogram: rho (fast) by theta, element = theta*N + rho, i.e. the row index
// of the system matrix.
enum class Domain : std::uint8_t { kTomogram, kSinogram };

struct TileCoord {
  int x = 0;
  int z = 0;
  friend bool operator==(const TileCoord&, const TileCoord&) = default;
};

// Hilbert curve of the given order: position d -> cell on a 2^order square.
// Base motif d=0..3 -> (0,0), (0,1), (1,1), (1,0).
TileCoord HilbertD2XY(int order, std::uint64_t d);

// Bijection over a tiles_x x tiles_z grid. Pads to the enclosing power-of-two
// square, walks its Hilbert curve and skips cells outside the grid.
std::vector<TileCoord> PseudoHilbertOrder(int tiles_x, int tiles_z);

struct TileGrid {
  Domain domain = Domain::kTomogram;
  int extent_x = 0;  // elements along the fast axis
  int extent_z = 0;
  int tile_size = 1;
  int tiles_x = 0;
  int tiles_z = 0;

  std::size_t num_elements() const {
    return static_cast<std::size_t>(extent_x) * static_cast<std::size_t>(extent_z);
  }
  std::size_t num_tiles() const {
    return static_cast<std::size_t>(tiles_x) * static_cast<std::size_t>(tiles_z);
  }
  // Elements of one tile in pseudo-Hilbert order inside the tile.
  std::vector<std::uint32_t> TileElements(TileCoord tile) const;
};

inline constexpr int kDefaultProcessTileSize = 8;

TileGrid MakeTileGrid(Domain domain, int extent_x, int extent_z, int tile_size);
TileGrid TomogramTileGrid(const ScanGeometry& g, int tile_size = kDefaultProcessTileSize);
TileGrid SinogramTileGrid(const ScanGeometry& g, int tile_size = kDefaultProcessTileSize);

// Every element of the grid in curve order: tiles in pseudo-Hilbert order,
// elements inside each tile likewise.
std::vector<std::uint32_t> CurveOrder(const TileGrid& grid);

struct Subdomain {
  int id = 0;
  Domain domain = Domain::kTomogram;
  std::vector<TileCoord> tiles;        // contiguous run of the tile curve
  int owner = 0;                       // process id
  std::vector<std::uint32_t> elements; // flat indices, in curve order
};

// Sizes of `parts` contiguous pieces of `count` items; the first
// (count mod parts) pieces get one extra.
std::vector<std::size_t> BalancedSplit(std::size_t count, std::size_t parts);

// P contiguous, tile-balanced segments of the pseudo-Hilbert tile order.
std::vector<Subdomain> Decompose(const TileGrid& grid, int num_parts);

struct BlockPartition {
  int id = 0;
  std::vector<std::uint32_t> elements;  // curve order
};

// Splits a subdomain's curve-ordered elements (block-level tile size 1) into
// contiguous, balanced thread-block partitions.
std::vector<BlockPartition> BlockDecompose(const Subdomain& subdomain, int block_count);

enum class Direction : std::uint8_t { kProjection, kBackprojection };

struct Footprint {
  int source = 0;
  Domain target = Domain::kSinogram;
  std::vector<std::uint32_t> elements;  // ascending
};

// Projection: rows of A with a nonzero in the (tomogram) subdomain's columns.
// Backprojection: columns of A touched by the (sinogram) subdomain's rows.
Footprint ComputeFootprint(const Subdomain& subdomain, const SystemMatrix& a, Direction direction);

}  // namespace xct

#endif  // XCT_HILBERT_HPP_
