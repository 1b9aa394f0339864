#include "tsnsim/topology.hpp"

#include <unordered_set>

namespace tsnsim {

std::int32_t Topology::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<std::int32_t>(i);
  }
  fail("unknown node: " + id);
}

std::int32_t Topology::link_index(const std::string& name) const {
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].name == name) return static_cast<std::int32_t>(i);
  }
  fail("unknown link: " + name);
}

void Topology::validate_route(const std::vector<std::int32_t>& route) const {
  TSNSIM_CHECK(!route.empty(), "route must name at least one link");
  std::unordered_set<std::int32_t> visited;
  for (std::size_t i = 0; i < route.size(); ++i) {
    const auto li = route[i];
    TSNSIM_CHECK(li >= 0 && li < static_cast<std::int32_t>(links.size()),
                 "route references unknown link");
    const Link& link = links[static_cast<std::size_t>(li)];
    TSNSIM_CHECK(visited.insert(link.from).second, "route revisits a node");
    if (i > 0) {
      TSNSIM_CHECK(links[static_cast<std::size_t>(route[i - 1])].to == link.from,
                   "route is not connected at " + link.name);
    }
  }
  const Link& last = links[static_cast<std::size_t>(route.back())];
  TSNSIM_CHECK(nodes[static_cast<std::size_t>(last.to)].kind == Node::Kind::Sink,
               "route does not end at a sink (" + last.name + ")");
}

namespace {

struct Builder {
  Topology topo;
  std::int64_t rate;

  std::int32_t node(const std::string& id, Node::Kind kind) {
    topo.nodes.push_back({id, kind});
    return static_cast<std::int32_t>(topo.nodes.size() - 1);
  }

  std::int32_t link(const std::string& from, const std::string& to) {
    Link l;
    l.name = from + "->" + to;
    l.from = topo.node_index(from);
    l.to = topo.node_index(to);
    l.egress.node = from;
    l.egress.link = l.name;
    l.egress.link_rate_bps = rate;
    topo.links.push_back(std::move(l));
    return static_cast<std::int32_t>(topo.links.size() - 1);
  }

  void route(const std::string& source, std::vector<std::int32_t> links) {
    topo.source_routes.emplace(source, std::move(links));
  }
};

}  // namespace

Topology expand_builtin(const BuiltinTopology& builtin, std::int64_t link_rate_bps) {
  Builder b;
  b.rate = link_rate_bps;
  using Kind = BuiltinTopology::Kind;

  switch (builtin.kind) {
    case Kind::OneHop: {
      b.node("src_hp", Node::Kind::Source);
      b.node("src_lp", Node::Kind::Source);
      b.node("sw", Node::Kind::Switch);
      b.node("sink", Node::Kind::Sink);
      const auto out = b.link("sw", "sink");
      b.route("src_hp", {out});
      b.route("src_lp", {out});
      break;
    }
    case Kind::Star: {
      TSNSIM_CHECK(builtin.n_hp_sources >= 1, "star needs at least one source");
      for (int i = 1; i <= builtin.n_hp_sources; ++i) {
        b.node("src_hp_" + std::to_string(i), Node::Kind::Source);
      }
      b.node("src_lp", Node::Kind::Source);
      b.node("sw", Node::Kind::Switch);
      b.node("sink", Node::Kind::Sink);
      const auto out = b.link("sw", "sink");
      for (int i = 1; i <= builtin.n_hp_sources; ++i) {
        b.route("src_hp_" + std::to_string(i), {out});
      }
      b.route("src_lp", {out});
      break;
    }
    case Kind::Tree8x8: {
      // Two first-level switches with four HP + four LP sources each, one
      // aggregation switch, one destination. Every flow crosses two hops.
      for (int i = 1; i <= 8; ++i) {
        b.node("src_hp_" + std::to_string(i), Node::Kind::Source);
        b.node("src_lp_" + std::to_string(i), Node::Kind::Source);
      }
      b.node("sw_a", Node::Kind::Switch);
      b.node("sw_b", Node::Kind::Switch);
      b.node("sw_c", Node::Kind::Switch);
      b.node("sink", Node::Kind::Sink);
      const auto a_c = b.link("sw_a", "sw_c");
      const auto b_c = b.link("sw_b", "sw_c");
      const auto c_s = b.link("sw_c", "sink");
      for (int i = 1; i <= 8; ++i) {
        const auto first = i <= 4 ? a_c : b_c;
        b.route("src_hp_" + std::to_string(i), {first, c_s});
        b.route("src_lp_" + std::to_string(i), {first, c_s});
      }
      break;
    }
    case Kind::Automotive: {
      // Two switches in line. Cameras, multimedia and the best-effort source
      // feed the front switch; control units feed the back switch; the
      // multimedia streams exit at a dedicated sink behind the back switch,
      // everything else shares the back->sink port.
      for (int i = 1; i <= 4; ++i) {
        b.node("cam_src_" + std::to_string(i), Node::Kind::Source);
      }
      for (int i = 1; i <= 3; ++i) {
        b.node("ctrl_src_" + std::to_string(i), Node::Kind::Source);
        b.node("mm_src_" + std::to_string(i), Node::Kind::Source);
      }
      b.node("be_src", Node::Kind::Source);
      b.node("front", Node::Kind::Switch);
      b.node("back", Node::Kind::Switch);
      b.node("sink", Node::Kind::Sink);
      b.node("mm_sink", Node::Kind::Sink);
      const auto f_b = b.link("front", "back");
      const auto b_s = b.link("back", "sink");
      const auto b_m = b.link("back", "mm_sink");
      for (int i = 1; i <= 4; ++i) {
        b.route("cam_src_" + std::to_string(i), {f_b, b_s});
      }
      for (int i = 1; i <= 3; ++i) {
        b.route("ctrl_src_" + std::to_string(i), {b_s});
        b.route("mm_src_" + std::to_string(i), {f_b, b_m});
      }
      b.route("be_src", {f_b, b_s});
      break;
    }
  }
  return b.topo;
}

}  // namespace tsnsim
