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
#include <cmath>
#include <stdexcept>
#include <string>

#include "xct/precision.hpp"

namespace xct {

std::uint16_t Half::FromDouble(double value) {
  const std::uint64_t x = std::bit_cast<std::uint64_t>(value);
  const std::uint16_t sign = static_cast<std::uint16_t>((x >> 48) & 0x8000u);
  const std::uint64_t abs_bits = x & 0x7fffffffffffffffull;
  if (abs_bits >= 0x7ff0000000000000ull) {
    const bool is_nan = abs_bits > 0x7ff0000000000000ull;
    return sign | 0x7c00u | (is_nan ? 0x0200u : 0u);
  }
  const double a = std::bit_cast<double>(abs_bits);
  if (a < kHalfMinNormal) {
    // Subnormal range: the encoding is the value in units of 2^-24. The
    // scaling is exact and nearbyint rounds half to even.
    const double units = std::nearbyint(a * 16777216.0);
    return sign | static_cast<std::uint16_t>(units);
  }
  const int exponent = static_cast<int>(abs_bits >> 52) - 1023;
  if (exponent > 15) return sign | 0x7c00u;
  const std::uint64_t mantissa = abs_bits & 0x000fffffffffffffull;
  std::uint32_t h = (static_cast<std::uint32_t>(exponent + 15) << 10) |
                    static_cast<std::uint32_t>(mantissa >> 42);
  const std::uint64_t rest = mantissa & ((1ull << 42) - 1);
  constexpr std::uint64_t kHalfway = 1ull << 41;
  if (rest > kHalfway || (rest == kHalfway && (h & 1u))) ++h;  // may carry to inf
  return sign | static_cast<std::uint16_t>(h);
}

float Half::ToFloat() const {
  const std::uint32_t sign = static_cast<std::uint32_t>(bits_ & 0x8000u) << 16;
  const std::uint32_t exponent = (bits_ >> 10) & 0x1fu;
  const std::uint32_t mantissa = bits_ & 0x3ffu;
  if (exponent == 0) {
    const float magnitude = std::ldexp(static_cast<float>(mantissa), -24);
    return sign ? -magnitude : magnitude;
  }
  if (exponent == 31) {
    return std::bit_cast<float>(sign | 0x7f800000u | (mantissa << 13));
  }
  return std::bit_cast<float>(sign | ((exponent + 112) << 23) | (mantissa << 13));
}

double RoundToHalf(double value) { return Half(value).ToDouble(); }

double RoundToSingle(double value) {
  return static_cast<double>(static_cast<float>(value));
}

std::string_view PrecisionName(Precision p) {
  switch (p) {
    case Precision::kDouble: return "double";
    case Precision::kSingle: return "single";
    case Precision::kHalf: return "half";
    case Precision::kMixed: return "mixed";
  }
  return "unknown";
}

Precision ParsePrecision(std::string_view name) {
  if (name == "double") return Precision::kDouble;
  if (name == "single") return Precision::kSingle;
  if (name == "half") return Precision::kHalf;
  if (name == "mixed") return Precision::kMixed;
  throw std::invalid_argument("unknown precision mode '" + std::string(name) +
                              "' (expected double|single|half|mixed)");
}

std::size_t StorageBytes(Precision p) {
  switch (p) {
    case Precision::kDouble: return 8;
    case Precision::kSingle: return 4;
    case Precision::kHalf:
    case Precision::kMixed: return 2;
  }
  return 8;
}

double QuantizeStorage(double value, Precision p) {
  switch (p) {
    case Precision::kDouble: return value;
    case Precision::kSingle: return RoundToSingle(value);
    case Precision::kHalf:
    case Precision::kMixed: return RoundToHalf(value);
  }
  return value;
}

}  // namespace xct
