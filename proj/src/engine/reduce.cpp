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

#include "xct/engine.hpp"

namespace xct {

double AccumulateStep(double a, double b, Precision p) {
  switch (p) {
    case Precision::kDouble:
      return a + b;
    case Precision::kSingle:
      return static_cast<double>(static_cast<float>(a) + static_cast<float>(b));
    case Precision::kMixed:
      return RoundToHalf(static_cast<double>(static_cast<float>(a) + static_cast<float>(b)));
    case Precision::kHalf:
      return RoundToHalf(a + b);
  }
  return a + b;
}

ReducedValues ReducePartials(const std::vector<PartialResult>& partials,
                             const Ownership& ownership) {
  if (partials.empty()) throw std::invalid_argument("reduce: no partial results");
  const Precision precision = partials.front().precision;
  const int ff = partials.front().values.columns;
  for (const auto& part : partials) {
    if (part.precision != precision || part.values.columns != ff) {
      throw std::invalid_argument("reduce: partials disagree on precision or FFACTOR");
    }
    if (part.values.length != part.elements.size()) {
      throw std::invalid_argument("reduce: partial from process " + std::to_string(part.owner) +
                                  " has mismatched element count");
    }
  }
  std::vector<std::size_t> order(partials.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return partials[a].owner < partials[b].owner;
  });

  const std::size_t n = ownership.domain_size;
  MultiVector total(n, ff);
  std::vector<char> touched(n, 0);
  for (std::size_t idx : order) {
    const auto& part = partials[idx];
    for (std::size_t i = 0; i < part.elements.size(); ++i) {
      const std::uint32_t e = part.elements[i];
      if (e >= n) throw std::out_of_range("reduce: element outside the ownership domain");
      for (int f = 0; f < ff; ++f) {
        // The first contributor is taken verbatim so a single source is exact.
        total.at(e, f) = touched[e] ? AccumulateStep(total.at(e, f), part.values.at(i, f), precision)
                                    : part.values.at(i, f);
      }
      touched[e] = 1;
    }
  }

  ReducedValues out;
  out.owned.reserve(ownership.owned.size());
  for (const auto& elems : ownership.owned) {
    MultiVector v(elems.size(), ff);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      for (int f = 0; f < ff; ++f) v.at(i, f) = total.at(elems[i], f);
    }
    out.owned.push_back(std::move(v));
  }
  return out;
}

}  // namespace xct
