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

#ifndef XCT_PRECISION_HPP_
#define XCT_PRECISION_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace xct {

// IEEE 754 binary16 value held as raw bits. Conversions round to nearest,
// ties to even; arithmetic is done by the caller in float or double.
class Half {
 public:
  constexpr Half() = default;
  explicit Half(double value) : bits_(FromDouble(value)) {}

  static constexpr Half FromBits(std::uint16_t bits) {
    Half h;
    h.bits_ = bits;
    return h;
  }

  constexpr std::uint16_t bits() const { return bits_; }
  float ToFloat() const;
  double ToDouble() const { return ToFloat(); }

  static std::uint16_t FromDouble(double value);

 private:
  std::uint16_t bits_ = 0;
};

static_assert(sizeof(Half) == 2);

inline constexpr double kHalfMax = 65504.0;
// Smallest positive subnormal, 2^-24.
inline constexpr double kHalfMinSubnormal = 5.9604644775390625e-08;
// Smallest positive normal, 2^-14.
inline constexpr double kHalfMinNormal = 6.103515625e-05;

double RoundToHalf(double value);
double RoundToSingle(double value);

// Storage/compute policy of a run.
//   double: store double, compute double
//   single: store float,  compute float
//   half:   store half,   compute half (every operation rounded)
//   mixed:  store half,   compute float
enum class Precision : std::uint8_t { kDouble, kSingle, kHalf, kMixed };

std::string_view PrecisionName(Precision p);
Precision ParsePrecision(std::string_view name);

// Bytes per stored vector element.
std::size_t StorageBytes(Precision p);

// Rounds a double to what the storage type of p can hold.
double QuantizeStorage(double value, Precision p);

}  // namespace xct

#endif  // XCT_PRECISION_HPP_
