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

std::string_view CommLevelName(CommLevel level) {
  switch (level) {
    case CommLevel::kDirect:
      return "direct";
    case CommLevel::kSocket:
      return "socket";
    case CommLevel::kNode:
      return "node";
    case CommLevel::kGlobal:
      return "global";
  }
  return "unknown";
}

std::vector<std::vector<std::size_t>> LevelPlan::Counts(int num_procs) const {
  const auto n = static_cast<std::size_t>(num_procs);
  std::vector<std::vector<std::size_t>> counts(n, std::vector<std::size_t>(n, 0));
  for (const auto& t : transfers) {
    counts[static_cast<std::size_t>(t.sender)][static_cast<std::size_t>(t.receiver)] +=
        t.elements.size();
  }
  return counts;
}

std::size_t LevelPlan::TotalElements() const {
  std::size_t total = 0;
  for (const auto& t : transfers) total += t.elements.size();
  return total;
}

namespace {

using ElementLists = std::vector<std::vector<std::uint32_t>>;

void CheckInputs(const ElementLists& footprints, const Ownership& ownership,
                 const std::vector<GpuSlot>& slots) {
  if (footprints.empty()) throw std::invalid_argument("comm plan: no processes");
  if (slots.size() != footprints.size()) {
    throw std::invalid_argument("comm plan: placement has " + std::to_string(slots.size()) +
                                " slots for " + std::to_string(footprints.size()) + " processes");
  }
  if (ownership.num_procs() != static_cast<int>(footprints.size())) {
    throw std::invalid_argument("comm plan: ownership covers " +
                                std::to_string(ownership.num_procs()) + " processes, expected " +
                                std::to_string(footprints.size()));
  }
  // A well-formed ownership partitions the domain.
  std::vector<char> seen(ownership.domain_size, 0);
  std::size_t covered = 0;
  for (std::size_t q = 0; q < ownership.owned.size(); ++q) {
    for (auto e : ownership.owned[q]) {
      if (e >= ownership.domain_size || seen[e] ||
          ownership.owner_of[e] != static_cast<int>(q)) {
        throw std::invalid_argument("comm plan: ownership is not a partition");
      }
      seen[e] = 1;
      ++covered;
    }
  }
  if (covered != ownership.domain_size) {
    throw std::invalid_argument("comm plan: ownership is not a partition");
  }
  for (std::size_t p = 0; p < slots.size(); ++p) {
    for (std::size_t q = p + 1; q < slots.size(); ++q) {
      if (slots[p] == slots[q]) throw std::invalid_argument("comm plan: two processes share a GPU");
    }
  }
  for (const auto& fp : footprints) {
    for (std::size_t i = 0; i < fp.size(); ++i) {
      if (fp[i] >= ownership.domain_size || (i > 0 && fp[i] <= fp[i - 1])) {
        throw std::invalid_argument("comm plan: footprints must be ascending and in range");
      }
    }
  }
}

LevelPlan GlobalLevel(const ElementLists& held, const Ownership& ownership, CommLevel level) {
  LevelPlan plan;
  plan.level = level;
  plan.held_before = held;
  for (std::size_t p = 0; p < held.size(); ++p) {
    std::map<int, std::vector<std::uint32_t>> outgoing;
    for (auto e : held[p]) {
      const int q = ownership.owner_of[e];
      if (q != static_cast<int>(p)) outgoing[q].push_back(e);
    }
    for (auto& [q, elems] : outgoing) {
      plan.transfers.push_back({static_cast<int>(p), q, std::move(elems)});
    }
  }
  return plan;
}

// One local reduction level: inside every group, each element held by two or
// more members is gathered to the member with the smallest running load
// among its holders (lower id on ties). Load counts elements a member has
// been assigned to keep so far in the ascending sweep.
LevelPlan LocalLevel(const ElementLists& held, const std::vector<std::vector<int>>& groups,
                     CommLevel level, ElementLists* next) {
  LevelPlan plan;
  plan.level = level;
  plan.held_before = held;
  *next = ElementLists(held.size());
  std::map<std::pair<int, int>, std::vector<std::uint32_t>> outgoing;
  for (const auto& members : groups) {
    std::vector<std::pair<std::uint32_t, int>> items;
    for (int p : members) {
      for (auto e : held[static_cast<std::size_t>(p)]) items.emplace_back(e, p);
    }
    std::sort(items.begin(), items.end());
    std::map<int, std::size_t> load;
    for (int p : members) load[p] = 0;
    for (std::size_t i = 0; i < items.size();) {
      std::size_t j = i;
      while (j < items.size() && items[j].first == items[i].first) ++j;
      const std::uint32_t e = items[i].first;
      int keeper = items[i].second;
      for (std::size_t k = i + 1; k < j; ++k) {
        if (load[items[k].second] < load[keeper]) keeper = items[k].second;
      }
      ++load[keeper];
      (*next)[static_cast<std::size_t>(keeper)].push_back(e);
      for (std::size_t k = i; k < j; ++k) {
        if (items[k].second != keeper) outgoing[{items[k].second, keeper}].push_back(e);
      }
      i = j;
    }
  }
  for (auto& [pair, elems] : outgoing) {
    plan.transfers.push_back({pair.first, pair.second, std::move(elems)});
  }
  return plan;
}

std::vector<std::vector<int>> GroupBy(const std::vector<GpuSlot>& slots, bool by_socket) {
  std::map<std::pair<int, int>, std::vector<int>> groups;
  for (std::size_t p = 0; p < slots.size(); ++p) {
    const auto key = std::make_pair(slots[p].node, by_socket ? slots[p].socket : 0);
    groups[key].push_back(static_cast<int>(p));
  }
  std::vector<std::vector<int>> out;
  for (auto& [key, members] : groups) out.push_back(std::move(members));
  return out;
}

}  // namespace

CommPlan PlanDirect(const ElementLists& footprints, const Ownership& ownership,
                    const std::vector<GpuSlot>& slots) {
  CheckInputs(footprints, ownership, slots);
  CommPlan plan;
  plan.hierarchical = false;
  plan.num_procs = static_cast<int>(footprints.size());
  plan.domain_size = ownership.domain_size;
  plan.footprints = footprints;
  plan.levels.push_back(GlobalLevel(footprints, ownership, CommLevel::kDirect));
  return plan;
}

CommPlan PlanHierarchical(const ElementLists& footprints, const Ownership& ownership,
                          const std::vector<GpuSlot>& slots) {
  CheckInputs(footprints, ownership, slots);
  CommPlan plan;
  plan.hierarchical = true;
  plan.num_procs = static_cast<int>(footprints.size());
  plan.domain_size = ownership.domain_size;
  plan.footprints = footprints;
  ElementLists after_socket;
  plan.levels.push_back(
      LocalLevel(footprints, GroupBy(slots, true), CommLevel::kSocket, &after_socket));
  ElementLists after_node;
  plan.levels.push_back(
      LocalLevel(after_socket, GroupBy(slots, false), CommLevel::kNode, &after_node));
  plan.levels.push_back(GlobalLevel(after_node, ownership, CommLevel::kGlobal));
  return plan;
}

std::vector<std::vector<int>> RoutedContributors(const CommPlan& plan, const Ownership& ownership) {
  std::vector<std::map<std::uint32_t, std::vector<int>>> state(plan.footprints.size());
  for (std::size_t p = 0; p < plan.footprints.size(); ++p) {
    for (auto e : plan.footprints[p]) state[p][e] = {static_cast<int>(p)};
  }
  for (const auto& level : plan.levels) {
    std::vector<std::pair<std::size_t, std::pair<std::uint32_t, std::vector<int>>>> moved;
    for (const auto& t : level.transfers) {
      auto& from = state[static_cast<std::size_t>(t.sender)];
      for (auto e : t.elements) {
        auto it = from.find(e);
        if (it == from.end()) throw std::logic_error("comm plan sends an element it does not hold");
        moved.push_back({static_cast<std::size_t>(t.receiver), {e, std::move(it->second)}});
        from.erase(it);
      }
    }
    for (auto& [q, item] : moved) {
      auto& slot = state[q][item.first];
      slot.insert(slot.end(), item.second.begin(), item.second.end());
    }
  }
  std::vector<std::vector<int>> routed(ownership.domain_size);
  for (std::size_t p = 0; p < state.size(); ++p) {
    for (auto& [e, origins] : state[p]) {
      if (ownership.owner_of[e] != static_cast<int>(p)) {
        throw std::logic_error("comm plan leaves element " + std::to_string(e) +
                               " away from its owner");
      }
      std::sort(origins.begin(), origins.end());
      routed[e] = origins;
    }
  }
  return routed;
}

}  // namespace xct
