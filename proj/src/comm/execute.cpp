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
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "xct/comm.hpp"

namespace xct {

namespace {

using Values = std::vector<double>;
using Held = std::map<std::uint32_t, Values>;

Values Fold(std::vector<std::pair<int, Values>>* parts, Precision precision) {
  std::sort(parts->begin(), parts->end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Values total = std::move(parts->front().second);
  for (std::size_t k = 1; k < parts->size(); ++k) {
    const Values& v = (*parts)[k].second;
    for (std::size_t f = 0; f < total.size(); ++f) {
      total[f] = AccumulateStep(total[f], v[f], precision);
    }
  }
  return total;
}

}  // namespace

ReducedValues ExecutePlan(const CommPlan& plan, const std::vector<PartialResult>& partials,
                          const Ownership& ownership) {
  const std::size_t procs = plan.footprints.size();
  if (partials.size() != procs) {
    throw std::invalid_argument("execute plan: expected " + std::to_string(procs) +
                                " partial results, got " + std::to_string(partials.size()));
  }
  if (ownership.domain_size != plan.domain_size) {
    throw std::invalid_argument("execute plan: ownership domain differs from the plan");
  }
  const Precision precision = partials.front().precision;
  const int ff = partials.front().values.columns;
  std::vector<Held> state(procs);
  for (std::size_t p = 0; p < procs; ++p) {
    const auto& part = partials[p];
    if (part.precision != precision || part.values.columns != ff) {
      throw std::invalid_argument("execute plan: partials disagree on precision or FFACTOR");
    }
    if (part.values.length != part.elements.size()) {
      throw std::invalid_argument("execute plan: malformed partial from process " +
                                  std::to_string(p));
    }
    for (std::size_t i = 0; i < part.elements.size(); ++i) {
      Values v(static_cast<std::size_t>(ff));
      for (int f = 0; f < ff; ++f) v[static_cast<std::size_t>(f)] = part.values.at(i, f);
      if (!state[p].emplace(part.elements[i], std::move(v)).second) {
        throw std::invalid_argument("execute plan: duplicate element in partial from process " +
                                    std::to_string(p));
      }
    }
    const auto& fp = plan.footprints[p];
    bool match = fp.size() == state[p].size();
    if (match) {
      std::size_t i = 0;
      for (const auto& kv : state[p]) match = match && kv.first == fp[i++];
    }
    if (!match) {
      throw std::invalid_argument("execute plan: partial from process " + std::to_string(p) +
                                  " does not cover its planned footprint (missing contributor)");
    }
  }

  for (const auto& level : plan.levels) {
    std::vector<std::map<std::uint32_t, std::vector<std::pair<int, Values>>>> inbox(procs);
    for (const auto& t : level.transfers) {
      auto& from = state[static_cast<std::size_t>(t.sender)];
      for (auto e : t.elements) {
        auto it = from.find(e);
        if (it == from.end()) {
          throw std::logic_error("execute plan: process " + std::to_string(t.sender) +
                                 " does not hold element " + std::to_string(e));
        }
        inbox[static_cast<std::size_t>(t.receiver)][e].emplace_back(t.sender,
                                                                    std::move(it->second));
        from.erase(it);
      }
    }
    for (std::size_t q = 0; q < procs; ++q) {
      for (auto& [e, parts] : inbox[q]) {
        if (auto own = state[q].find(e); own != state[q].end()) {
          parts.emplace_back(static_cast<int>(q), std::move(own->second));
        }
        state[q][e] = Fold(&parts, precision);
      }
    }
  }

  ReducedValues out;
  out.owned.reserve(procs);
  for (std::size_t q = 0; q < procs; ++q) {
    const auto& elems = ownership.owned[q];
    MultiVector v(elems.size(), ff);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      auto it = state[q].find(elems[i]);
      if (it == state[q].end()) continue;
      for (int f = 0; f < ff; ++f) v.at(i, f) = it->second[static_cast<std::size_t>(f)];
      state[q].erase(it);
    }
    if (!state[q].empty()) {
      throw std::logic_error("execute plan: process " + std::to_string(q) +
                             " still holds elements it does not own");
    }
    out.owned.push_back(std::move(v));
  }
  return out;
}

}  // namespace xct
