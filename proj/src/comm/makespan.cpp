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

#include "xct/comm.hpp"

namespace xct {

double LevelTime(const LevelPlan& level, const std::vector<GpuSlot>& slots,
                 const Topology& topology, double bytes_per_element) {
  std::map<int, double> per_sender;
  for (const auto& t : level.transfers) {
    const double bytes = static_cast<double>(t.elements.size()) * bytes_per_element;
    double seconds = 0.0;
    switch (Classify(slots[static_cast<std::size_t>(t.sender)],
                     slots[static_cast<std::size_t>(t.receiver)])) {
      case LinkClass::kSelf:
        continue;
      case LinkClass::kSocket:
        seconds = bytes / topology.bw_socket;
        break;
      case LinkClass::kNode:
        seconds = bytes / topology.bw_node;
        break;
      case LinkClass::kInter:
        seconds = bytes * topology.staging_multiplier / topology.bw_inter;
        break;
    }
    per_sender[t.sender] += seconds + topology.latency;
  }
  double worst = 0.0;
  for (const auto& kv : per_sender) worst = std::max(worst, kv.second);
  return worst;
}

std::vector<LevelVolume> SummarizePlan(const CommPlan& plan, const std::vector<GpuSlot>& slots,
                                       const Topology& topology, double bytes_per_element) {
  std::vector<LevelVolume> out;
  for (const auto& level : plan.levels) {
    LevelVolume v;
    v.level = level.level;
    for (const auto& t : level.transfers) {
      const double bytes = static_cast<double>(t.elements.size()) * bytes_per_element;
      v.bytes += bytes;
      if (Classify(slots[static_cast<std::size_t>(t.sender)],
                   slots[static_cast<std::size_t>(t.receiver)]) == LinkClass::kInter) {
        v.inter_node_bytes += bytes;
      }
    }
    for (const auto& held : level.held_before) {
      v.retained_bytes += static_cast<double>(held.size()) * bytes_per_element;
    }
    v.messages = level.transfers.size();
    v.time_s = LevelTime(level, slots, topology, bytes_per_element);
    out.push_back(v);
  }
  return out;
}

VolumeReport CompareVolumes(const CommPlan& direct, const CommPlan& hierarchical,
                            const std::vector<GpuSlot>& slots, const Topology& topology,
                            double bytes_per_element) {
  VolumeReport r;
  r.direct = SummarizePlan(direct, slots, topology, bytes_per_element);
  r.hierarchical = SummarizePlan(hierarchical, slots, topology, bytes_per_element);
  for (const auto& v : r.direct) {
    r.inter_node_direct += v.inter_node_bytes;
    r.time_direct_s += v.time_s;
  }
  for (const auto& v : r.hierarchical) {
    r.inter_node_hierarchical += v.inter_node_bytes;
    r.time_hierarchical_s += v.time_s;
  }
  if (r.inter_node_direct > 0.0) {
    r.reduction_percent = 100.0 * (1.0 - r.inter_node_hierarchical / r.inter_node_direct);
  }
  return r;
}

double EstimateMakespan(const MinibatchTimes& t, int num_minibatches, bool overlap) {
  if (num_minibatches < 1) throw std::invalid_argument("makespan needs at least one minibatch");
  if (t.kernel < 0.0 || t.local_comm < 0.0 || t.global_comm < 0.0) {
    throw std::invalid_argument("makespan times must be non-negative");
  }
  const double local = t.kernel + t.local_comm;
  const double b = static_cast<double>(num_minibatches);
  if (!overlap) return b * (local + t.global_comm);
  return local + t.global_comm + (b - 1.0) * std::max(local, t.global_comm);
}

}  // namespace xct
