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

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "xct/cli.hpp"

namespace xct {

namespace {

constexpr char kMagic[4] = {'X', 'C', 'T', '1'};

void PutLE(std::vector<std::uint8_t>* out, std::uint64_t bits, int bytes) {
  for (int i = 0; i < bytes; ++i) out->push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint64_t GetLE(std::span<const std::uint8_t> in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[at + static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> EncodeDataset(const Volume& volume) {
  volume.Validate();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(static_cast<std::uint8_t>(volume.dtype));
  out.push_back(static_cast<std::uint8_t>(volume.role));
  out.push_back(3);
  for (std::size_t d : volume.shape) {
    if (d > UINT32_MAX) throw std::invalid_argument("dataset dimension exceeds 32 bits");
    PutLE(&out, d, 4);
  }
  const int width = static_cast<int>(DTypeBytes(volume.dtype));
  out.reserve(out.size() + volume.values.size() * static_cast<std::size_t>(width));
  for (double v : volume.values) {
    switch (volume.dtype) {
      case DType::kDouble:
        PutLE(&out, std::bit_cast<std::uint64_t>(v), 8);
        break;
      case DType::kSingle:
        PutLE(&out, std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
        break;
      case DType::kHalf:
        PutLE(&out, Half(v).bits(), 2);
        break;
    }
  }
  return out;
}

Volume DecodeDataset(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 7 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::invalid_argument("not an XCT1 dataset (bad magic)");
  }
  const std::uint8_t dtype = bytes[4];
  const std::uint8_t role = bytes[5];
  const std::uint8_t ndim = bytes[6];
  if (dtype > 2) throw std::invalid_argument("dataset has unknown dtype code " + std::to_string(dtype));
  if (role > 1) throw std::invalid_argument("dataset has unknown role code " + std::to_string(role));
  if (ndim < 1 || ndim > 3) {
    throw std::invalid_argument("dataset has unsupported rank " + std::to_string(ndim));
  }
  const std::size_t header = 7 + 4 * static_cast<std::size_t>(ndim);
  if (bytes.size() < header) throw std::invalid_argument("dataset header is truncated");
  std::array<std::size_t, 3> shape{1, 1, 1};
  for (std::size_t i = 0; i < ndim; ++i) {
    shape[3 - ndim + i] = static_cast<std::size_t>(GetLE(bytes, 7 + 4 * i, 4));
  }
  Volume vol(static_cast<VolumeRole>(role), shape[0], shape[1], shape[2],
             static_cast<DType>(dtype));
  const std::size_t width = DTypeBytes(vol.dtype);
  if (bytes.size() - header != vol.values.size() * width) {
    throw std::invalid_argument("dataset payload is " + std::to_string(bytes.size() - header) +
                                " bytes, header implies " +
                                std::to_string(vol.values.size() * width));
  }
  for (std::size_t i = 0; i < vol.values.size(); ++i) {
    const std::uint64_t raw = GetLE(bytes, header + i * width, static_cast<int>(width));
    switch (vol.dtype) {
      case DType::kDouble:
        vol.values[i] = std::bit_cast<double>(raw);
        break;
      case DType::kSingle:
        vol.values[i] = std::bit_cast<float>(static_cast<std::uint32_t>(raw));
        break;
      case DType::kHalf:
        vol.values[i] = Half::FromBits(static_cast<std::uint16_t>(raw)).ToDouble();
        break;
    }
  }
  return vol;
}

void WriteFile(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

void WriteTextFile(const std::string& path, const std::string& text) {
  WriteFile(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

std::vector<std::uint8_t> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteDataset(const std::string& path, const Volume& volume) {
  WriteFile(path, EncodeDataset(volume));
}

Volume ReadDataset(const std::string& path) {
  try {
    return DecodeDataset(ReadFile(path));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace xct
