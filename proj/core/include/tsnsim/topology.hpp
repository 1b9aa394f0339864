#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsnsim/port.hpp"

namespace tsnsim {

struct Node {
  enum class Kind { Source, Switch, Sink };
  std::string id;
  Kind kind = Kind::Switch;
};

/// A directed link. Its head-end egress port is where contention happens;
/// frames are injected at the from-node and handed to the to-node when their
/// transmission completes.
struct Link {
  std::string name;  // "from->to"
  std::int32_t from = 0;
  std::int32_t to = 0;
  PortConfig egress;  // queues/mode filled in by the scenario resolver
};

struct Topology {
  std::vector<Node> nodes;
  std::vector<Link> links;
  /// Attachment of source nodes: the links a frame injected there traverses.
  std::unordered_map<std::string, std::vector<std::int32_t>> source_routes;

  std::int32_t node_index(const std::string& id) const;
  std::int32_t link_index(const std::string& name) const;

  /// Route must be connected, loop-free, and end at a sink.
  void validate_route(const std::vector<std::int32_t>& route) const;
};

struct BuiltinTopology {
  enum class Kind { OneHop, Star, Tree8x8, Automotive };
  Kind kind = Kind::OneHop;
  int n_hp_sources = 1;  // Star only
};

/// Canonical node ids per builtin; see README for the layouts.
Topology expand_builtin(const BuiltinTopology& builtin, std::int64_t link_rate_bps);

}  // namespace tsnsim
