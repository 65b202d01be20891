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

#ifndef XCT_CLI_HPP_
#define XCT_CLI_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "xct/geometry.hpp"
#include "xct/precision.hpp"

namespace xct {

// Container layout: "XCT1", u8 dtype, u8 role, u8 ndim, ndim x u32 dims,
// then the row-major payload. Everything little-endian.
std::vector<std::uint8_t> EncodeDataset(const Volume& volume);
Volume DecodeDataset(std::span<const std::uint8_t> bytes);
void WriteDataset(const std::string& path, const Volume& volume);
Volume ReadDataset(const std::string& path);

// Binary 16-bit PGM (P5, maxval 65535, big-endian samples), windowed so the
// plane minimum maps to 0 and the maximum to 65535. A constant plane is black.
std::vector<std::uint8_t> EncodePgm16(std::span<const double> plane, std::size_t width,
                                      std::size_t height);

void WriteFile(const std::string& path, std::span<const std::uint8_t> bytes);
void WriteTextFile(const std::string& path, const std::string& text);
std::vector<std::uint8_t> ReadFile(const std::string& path);

inline constexpr double kDefaultMemoryCapBytes = 16e9;

struct MemoryEstimate {
  double nnz_per_slice = 0.0;
  double matrix_bytes = 0.0;   // projection and backprojection copies
  double vector_bytes = 0.0;   // input and output minibatch buffers
  double staging_bytes = 0.0;
  double total() const { return matrix_bytes + vector_bytes + staging_bytes; }
};

// Average nonzeros per ray measured on an evenly spaced sample of rays.
double EstimateNnzPerSlice(const ScanGeometry& geometry, std::size_t max_samples = 4096);

MemoryEstimate EstimateProcessMemory(const ScanGeometry& geometry, double nnz_per_slice, int pd,
                                     int ffactor, Precision precision);

// Smallest P_d whose per-process estimate fits the cap.
int AutoDataProcesses(const ScanGeometry& geometry, double nnz_per_slice, int ffactor,
                      Precision precision, double cap_bytes);

// "64MB", "16GB", "1e9" -> bytes.
double ParseByteSize(const std::string& text);

// Entry point of the xct tool. Returns the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xct

#endif  // XCT_CLI_HPP_
