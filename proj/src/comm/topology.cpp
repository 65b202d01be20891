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

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "xct/comm.hpp"

namespace xct {

void Topology::Validate() const {
  if (num_nodes < 1 || sockets_per_node < 1 || gpus_per_socket < 1) {
    throw std::invalid_argument("topology counts must be positive");
  }
  if (!(bw_inter > 0.0) || bw_node < bw_inter || bw_socket < bw_node) {
    throw std::invalid_argument(
        "topology bandwidths must satisfy bw_socket >= bw_node >= bw_inter > 0");
  }
  if (!(latency >= 0.0)) throw std::invalid_argument("topology latency must be non-negative");
  if (!(staging_multiplier >= 1.0)) {
    throw std::invalid_argument("topology staging multiplier must be at least 1");
  }
}

namespace {

double ParseNumber(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) {
    throw std::invalid_argument("topology: bad value '" + value + "' for " + key);
  }
  return v;
}

int ParseCount(const std::string& key, const std::string& value) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw std::invalid_argument("topology: bad count '" + value + "' for " + key);
  }
  return v;
}

}  // namespace

Topology Topology::Parse(std::string_view text) {
  Topology t;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string token;
    while (words >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("topology: expected key=value, got '" + token + "'");
      }
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "nodes") {
        t.num_nodes = ParseCount(key, value);
      } else if (key == "sockets") {
        t.sockets_per_node = ParseCount(key, value);
      } else if (key == "gpus") {
        t.gpus_per_socket = ParseCount(key, value);
      } else if (key == "bw_socket") {
        t.bw_socket = ParseNumber(key, value);
      } else if (key == "bw_node") {
        t.bw_node = ParseNumber(key, value);
      } else if (key == "bw_inter") {
        t.bw_inter = ParseNumber(key, value);
      } else if (key == "lat") {
        t.latency = ParseNumber(key, value);
      } else if (key == "staging") {
        t.staging_multiplier = ParseNumber(key, value);
      } else {
        throw std::invalid_argument("topology: unknown key '" + key + "'");
      }
    }
  }
  t.Validate();
  return t;
}

Topology Topology::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

std::string Topology::ToString() const {
  std::ostringstream out;
  out.precision(17);
  out << "nodes=" << num_nodes << " sockets=" << sockets_per_node << " gpus=" << gpus_per_socket
      << " bw_socket=" << bw_socket << " bw_node=" << bw_node << " bw_inter=" << bw_inter
      << " lat=" << latency;
  if (staging_multiplier != 1.0) out << " staging=" << staging_multiplier;
  return out.str();
}

LinkClass Classify(const GpuSlot& a, const GpuSlot& b) {
  if (a == b) return LinkClass::kSelf;
  if (a.node != b.node) return LinkClass::kInter;
  if (a.socket != b.socket) return LinkClass::kNode;
  return LinkClass::kSocket;
}

std::vector<GpuSlot> Placement::Group(int batch_group) const {
  if (batch_group < 0 || batch_group >= pb) throw std::out_of_range("batch group out of range");
  const auto first = slots.begin() + static_cast<std::ptrdiff_t>(batch_group) * pd;
  return {first, first + pd};
}

Placement MapPartitions(int pb, int pd, const Topology& topology) {
  topology.Validate();
  if (pb < 1 || pd < 1) throw std::invalid_argument("P_b and P_d must be positive");
  const int per_node = topology.gpus_per_node();
  if (static_cast<long long>(pb) * pd > topology.total_gpus()) {
    throw std::invalid_argument("placement oversubscribes the topology: " + std::to_string(pb) +
                                "x" + std::to_string(pd) + " processes on " +
                                std::to_string(topology.total_gpus()) + " GPUs");
  }
  const int nodes_per_group = (pd + per_node - 1) / per_node;
  // Groups start on fresh nodes when the machine has room for that.
  const bool node_aligned = static_cast<long long>(pb) * nodes_per_group <= topology.num_nodes;
  Placement pl;
  pl.pb = pb;
  pl.pd = pd;
  pl.slots.reserve(static_cast<std::size_t>(pb) * pd);
  for (int b = 0; b < pb; ++b) {
    for (int d = 0; d < pd; ++d) {
      const int flat = node_aligned ? b * nodes_per_group * per_node + d : b * pd + d;
      GpuSlot s;
      s.node = flat / per_node;
      s.socket = (flat % per_node) / topology.gpus_per_socket;
      s.gpu = flat % topology.gpus_per_socket;
      pl.slots.push_back(s);
    }
  }
  return pl;
}

}  // namespace xct
