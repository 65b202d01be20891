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

#ifndef XCT_COMM_HPP_
#define XCT_COMM_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xct/engine.hpp"
#include "xct/matrixstore.hpp"

namespace xct {

struct Topology {
  int num_nodes = 4;
  int sockets_per_node = 2;
  int gpus_per_socket = 3;
  double bw_socket = 50e9;   // bytes/s between GPUs of one socket
  double bw_node = 32e9;     // bytes/s between sockets of one node
  double bw_inter = 12.5e9;  // bytes/s between nodes
  double latency = 1e-6;     // seconds per message
  double staging_multiplier = 1.0;  // per-byte overhead on inter-node legs

  int gpus_per_node() const { return sockets_per_node * gpus_per_socket; }
  int total_gpus() const { return num_nodes * gpus_per_node(); }
  void Validate() const;

  // "nodes=4 sockets=2 gpus=3 bw_socket=5e10 bw_node=3.2e10 bw_inter=1.25e10 lat=1e-6"
  static Topology Parse(std::string_view text);
  static Topology Load(const std::string& path);
  std::string ToString() const;
};

struct GpuSlot {
  int node = 0;
  int socket = 0;  // within the node
  int gpu = 0;     // within the socket
  friend bool operator==(const GpuSlot&, const GpuSlot&) = default;
};

enum class LinkClass : std::uint8_t { kSelf, kSocket, kNode, kInter };

LinkClass Classify(const GpuSlot& a, const GpuSlot& b);

// Process id = batch_group * pd + data_index.
struct Placement {
  int pb = 1;
  int pd = 1;
  std::vector<GpuSlot> slots;

  // Slots of one batch group, indexed by data process.
  std::vector<GpuSlot> Group(int batch_group) const;
};

Placement MapPartitions(int pb, int pd, const Topology& topology);

enum class CommLevel : std::uint8_t { kDirect, kSocket, kNode, kGlobal };

std::string_view CommLevelName(CommLevel level);

struct Transfer {
  int sender = 0;
  int receiver = 0;
  std::vector<std::uint32_t> elements;  // ascending
};

struct LevelPlan {
  CommLevel level = CommLevel::kDirect;
  std::vector<Transfer> transfers;  // sender != receiver, ordered by (sender, receiver)
  std::vector<std::vector<std::uint32_t>> held_before;  // process -> partial elements held

  // counts[p][q] = elements p sends to q.
  std::vector<std::vector<std::size_t>> Counts(int num_procs) const;
  std::size_t TotalElements() const;
};

struct CommPlan {
  bool hierarchical = false;
  int num_procs = 0;
  std::size_t domain_size = 0;
  std::vector<std::vector<std::uint32_t>> footprints;  // ascending, per process
  std::vector<LevelPlan> levels;
};

// Footprints must be ascending element lists, one per data process.
CommPlan PlanDirect(const std::vector<std::vector<std::uint32_t>>& footprints,
                    const Ownership& ownership, const std::vector<GpuSlot>& slots);
CommPlan PlanHierarchical(const std::vector<std::vector<std::uint32_t>>& footprints,
                          const Ownership& ownership, const std::vector<GpuSlot>& slots);

// Origins of every contribution that reaches each element's owner, sorted.
// Equal between two plans iff they route the same contributor multisets.
std::vector<std::vector<int>> RoutedContributors(const CommPlan& plan, const Ownership& ownership);

// Runs the plan level by level. partials are indexed by data process.
ReducedValues ExecutePlan(const CommPlan& plan, const std::vector<PartialResult>& partials,
                          const Ownership& ownership);

struct LevelVolume {
  CommLevel level = CommLevel::kDirect;
  double bytes = 0.0;           // all off-process traffic of the level
  double inter_node_bytes = 0.0;
  double retained_bytes = 0.0;  // partial data held when the level starts
  std::size_t messages = 0;
  double time_s = 0.0;
};

struct VolumeReport {
  std::vector<LevelVolume> direct;
  std::vector<LevelVolume> hierarchical;
  double inter_node_direct = 0.0;
  double inter_node_hierarchical = 0.0;
  double reduction_percent = 0.0;  // inter-node saving of hierarchical over direct
  double time_direct_s = 0.0;
  double time_hierarchical_s = 0.0;
};

double LevelTime(const LevelPlan& level, const std::vector<GpuSlot>& slots,
                 const Topology& topology, double bytes_per_element);

std::vector<LevelVolume> SummarizePlan(const CommPlan& plan, const std::vector<GpuSlot>& slots,
                                       const Topology& topology, double bytes_per_element);

// bytes_per_element already includes FFACTOR.
VolumeReport CompareVolumes(const CommPlan& direct, const CommPlan& hierarchical,
                            const std::vector<GpuSlot>& slots, const Topology& topology,
                            double bytes_per_element);

struct MinibatchTimes {
  double kernel = 0.0;
  double local_comm = 0.0;
  double global_comm = 0.0;
};

double EstimateMakespan(const MinibatchTimes& t, int num_minibatches, bool overlap);

}  // namespace xct

#endif  // XCT_COMM_HPP_
