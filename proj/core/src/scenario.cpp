#include "tsnsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tsnsim/expr.hpp"

namespace tsnsim {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

const json& member(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string req_string(const json& j, const char* key, const std::string& where) {
  const json& v = member(j, key, where);
  if (!v.is_string()) bad(where + "." + key, "expected a string");
  return v.get<std::string>();
}

/// Numeric field: a JSON number or an expression string.
double eval_field(const json& v, const std::map<std::string, double>& vars,
                  const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return eval_expr(v.get<std::string>(), vars);
    } catch (const std::exception& e) {
      bad(where, e.what());
    }
  }
  bad(where, "expected a number or an expression string");
}

double req_num(const json& j, const char* key,
               const std::map<std::string, double>& vars,
               const std::string& where) {
  return eval_field(member(j, key, where), vars, where + "." + key);
}

double opt_num(const json& j, const char* key,
               const std::map<std::string, double>& vars,
               const std::string& where, double fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  return eval_field(*it, vars, where + "." + key);
}

std::int64_t to_int(double v, const std::string& where) {
  const double r = std::llround(v);
  if (std::abs(v - r) > 1e-6 * std::max(1.0, std::abs(v))) {
    bad(where, "value " + std::to_string(v) + " is not close to an integer");
  }
  return static_cast<std::int64_t>(std::llround(v));
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) bad(where, "unknown field '" + it.key() + "'");
  }
}

/// True when `var` appears as a standalone identifier in any expression
/// string below `j`.
bool references_variable(const json& j, const std::string& var) {
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    std::size_t pos = 0;
    while ((pos = s.find(var, pos)) != std::string::npos) {
      const bool left_ok =
          pos == 0 || (!std::isalnum(static_cast<unsigned char>(s[pos - 1])) &&
                       s[pos - 1] != '_');
      const std::size_t end = pos + var.size();
      const bool right_ok =
          end == s.size() || (!std::isalnum(static_cast<unsigned char>(s[end])) &&
                              s[end] != '_');
      if (left_ok && right_ok) return true;
      ++pos;
    }
    return false;
  }
  if (j.is_object() || j.is_array()) {
    for (const auto& child : j) {
      if (references_variable(child, var)) return true;
    }
  }
  return false;
}

std::uint8_t parse_gate_bits(const std::string& s, const std::string& where) {
  if (s.size() != 8) bad(where, "gate string must have 8 characters");
  std::uint8_t gates = 0;
  for (int i = 0; i < 8; ++i) {
    const char c = s[static_cast<std::size_t>(i)];
    if (c != '0' && c != '1') bad(where, "gate string must be 0/1");
    if (c == '1') gates |= static_cast<std::uint8_t>(1u << (7 - i));
  }
  return gates;
}

std::string format_gate_bits(std::uint8_t gates) {
  std::string s(8, '0');
  for (int i = 0; i < 8; ++i) {
    if (gates & (1u << (7 - i))) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

SizeDist parse_size(const json& j, const std::map<std::string, double>& vars,
                    const std::string& where) {
  if (j.contains("size_bytes")) {
    const auto b = to_int(req_num(j, "size_bytes", vars, where), where);
    if (b <= 0) bad(where + ".size_bytes", "size must be positive");
    return SizeDist::fixed_bytes(b);
  }
  if (j.contains("size_uniform_bytes")) {
    const json& u = j["size_uniform_bytes"];
    if (!u.is_array() || u.size() != 2) {
      bad(where + ".size_uniform_bytes", "expected [min, max]");
    }
    const auto lo = to_int(eval_field(u[0], vars, where), where);
    const auto hi = to_int(eval_field(u[1], vars, where), where);
    if (lo <= 0 || hi < lo) bad(where + ".size_uniform_bytes", "need 0 < min <= max");
    return SizeDist::uniform_bytes(lo, hi);
  }
  bad(where, "flow needs size_bytes or size_uniform_bytes");
}

}  // namespace

struct Scenario::Impl {
  std::string name;
  std::string dir;  // for relative gcl_file references
  json j;
};

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return make(buf.str(), std::filesystem::path(path).stem().string(),
              std::filesystem::path(path).parent_path().string());
}

Scenario Scenario::parse(const std::string& text, const std::string& name_hint) {
  return make(text, name_hint, "");
}

Scenario Scenario::make(const std::string& text, const std::string& name_hint,
                        const std::string& dir) {
  auto impl = std::make_shared<Impl>();
  try {
    impl->j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario is not valid json: ") + e.what());
  }
  if (!impl->j.is_object()) throw ScenarioError("scenario must be a json object");
  check_keys(impl->j,
             {"name", "description", "link_rate_bps", "duration_ns",
              "warmup_fraction", "seeds", "processing_delay_ns",
              "overhead_bytes", "moving_average_window", "topology", "sweep",
              "flows", "modes"},
             "scenario");
  impl->name = impl->j.value("name", name_hint);
  impl->dir = dir;
  Scenario s;
  s.impl_ = std::move(impl);

  const auto values = s.sweep_values();
  const std::string var = s.sweep_variable();
  if (!var.empty()) {
    check_keys(s.impl_->j["sweep"], {"variable", "values"}, "scenario.sweep");
    // A sweep variable nobody reads would silently sweep nothing.
    const json& j = s.impl_->j;
    bool referenced = references_variable(j["flows"], var) ||
                      references_variable(j["modes"], var) ||
                      references_variable(j["topology"], var);
    if (var == "N" && j["topology"].value("builtin", "") == "star" &&
        !j["topology"].contains("n_hp_sources")) {
      referenced = true;  // star source count defaults to N
    }
    if (!referenced) {
      bad("scenario.sweep", "variable " + var +
                                " is not referenced by any flow, mode or "
                                "topology parameter");
    }
  }

  // Surface structural errors at load time: resolve each mode at the first
  // sweep point with a placeholder seed.
  for (const std::string& mode : s.modes()) {
    if (values.empty()) {
      (void)s.resolve(mode, std::nullopt, 1);
    } else {
      (void)s.resolve(mode, values.front(), 1);
    }
  }
  return s;
}

const std::string& Scenario::name() const { return impl_->name; }

SimTime Scenario::duration() const {
  return to_int(eval_field(member(impl_->j, "duration_ns", "scenario"), {},
                           "scenario.duration_ns"),
                "scenario.duration_ns");
}

std::vector<std::uint64_t> Scenario::seeds() const {
  std::vector<std::uint64_t> out;
  const json& s = member(impl_->j, "seeds", "scenario");
  if (!s.is_array() || s.empty()) bad("scenario.seeds", "expected a non-empty array");
  for (const auto& v : s) out.push_back(v.get<std::uint64_t>());
  return out;
}

std::vector<std::string> Scenario::modes() const {
  std::vector<std::string> out;
  const json& m = member(impl_->j, "modes", "scenario");
  if (!m.is_object() || m.empty()) bad("scenario.modes", "expected a non-empty object");
  for (auto it = m.begin(); it != m.end(); ++it) {
    if (!parse_mode(it.key())) bad("scenario.modes", "unknown mode '" + it.key() + "'");
    out.push_back(it.key());
  }
  return out;
}

std::string Scenario::sweep_variable() const {
  if (!impl_->j.contains("sweep")) return "";
  return req_string(impl_->j["sweep"], "variable", "scenario.sweep");
}

std::vector<double> Scenario::sweep_values() const {
  std::vector<double> out;
  if (!impl_->j.contains("sweep")) return out;
  const json& sweep = impl_->j["sweep"];
  static const std::set<std::string> known = {"R", "U_h", "b_h", "b_l", "N"};
  const std::string var = req_string(sweep, "variable", "scenario.sweep");
  if (known.count(var) == 0) {
    bad("scenario.sweep.variable", "unknown sweep variable '" + var + "'");
  }
  const json& values = member(sweep, "values", "scenario.sweep");
  if (!values.is_array() || values.empty()) {
    bad("scenario.sweep.values", "expected a non-empty array");
  }
  for (const auto& v : values) out.push_back(v.get<double>());
  return out;
}

std::optional<std::size_t> Scenario::moving_average_window() const {
  if (!impl_->j.contains("moving_average_window")) return std::nullopt;
  const auto w = impl_->j["moving_average_window"].get<std::int64_t>();
  if (w < 1) bad("scenario.moving_average_window", "window must be >= 1");
  return static_cast<std::size_t>(w);
}

namespace {

Topology resolve_topology(const json& j, const std::map<std::string, double>& vars,
                          std::int64_t link_rate) {
  const std::string where = "scenario.topology";
  if (j.contains("builtin")) {
    const std::string b = j["builtin"].get<std::string>();
    BuiltinTopology builtin;
    if (b == "one_hop") {
      builtin.kind = BuiltinTopology::Kind::OneHop;
    } else if (b == "star") {
      builtin.kind = BuiltinTopology::Kind::Star;
      builtin.n_hp_sources = static_cast<int>(
          to_int(opt_num(j, "n_hp_sources", vars, where,
                         vars.count("N") ? vars.at("N") : 1),
                 where + ".n_hp_sources"));
      if (builtin.n_hp_sources < 1) bad(where, "star needs n_hp_sources >= 1");
    } else if (b == "tree8x8") {
      builtin.kind = BuiltinTopology::Kind::Tree8x8;
    } else if (b == "automotive") {
      builtin.kind = BuiltinTopology::Kind::Automotive;
    } else {
      bad(where + ".builtin", "unknown builtin '" + b + "'");
    }
    return expand_builtin(builtin, link_rate);
  }

  Topology topo;
  for (const auto& n : member(j, "nodes", where)) {
    Node node;
    node.id = req_string(n, "id", where + ".nodes");
    const std::string kind = req_string(n, "kind", where + ".nodes");
    if (kind == "source") {
      node.kind = Node::Kind::Source;
    } else if (kind == "switch") {
      node.kind = Node::Kind::Switch;
    } else if (kind == "sink") {
      node.kind = Node::Kind::Sink;
    } else {
      bad(where + ".nodes", "unknown node kind '" + kind + "'");
    }
    topo.nodes.push_back(std::move(node));
  }
  for (const auto& l : member(j, "links", where)) {
    Link link;
    const std::string from = req_string(l, "from", where + ".links");
    const std::string to = req_string(l, "to", where + ".links");
    link.name = from + "->" + to;
    link.from = topo.node_index(from);
    link.to = topo.node_index(to);
    link.egress.node = from;
    link.egress.link = link.name;
    link.egress.link_rate_bps = static_cast<std::int64_t>(
        opt_num(l, "rate_bps", vars, where + ".links",
                static_cast<double>(link_rate)));
    topo.links.push_back(std::move(link));
  }
  return topo;
}

std::string substitute_index(std::string text, int i) {
  const std::string needle = "$i";
  const auto pos = text.find(needle);
  if (pos != std::string::npos) {
    text.replace(pos, needle.size(), std::to_string(i));
  }
  return text;
}

}  // namespace

ResolvedRun Scenario::resolve(const std::string& mode,
                              std::optional<double> sweep_value,
                              std::uint64_t seed,
                              std::optional<SimTime> duration_override) const {
  const json& j = impl_->j;
  const auto fwd_mode = parse_mode(mode);
  if (!fwd_mode) throw ScenarioError("unknown mode '" + mode + "'");
  if (!member(j, "modes", "scenario").contains(mode)) {
    throw ScenarioError("scenario does not declare mode '" + mode + "'");
  }
  const json& mode_cfg = j["modes"][mode];
  {
    const std::string where = "scenario.modes." + mode;
    switch (*fwd_mode) {
      case ForwardingMode::Cbs:
        check_keys(mode_cfg, {"idle_slope_fraction"}, where);
        break;
      case ForwardingMode::Drr:
        check_keys(mode_cfg, {"quantum_bytes"}, where);
        break;
      case ForwardingMode::Tas:
        check_keys(mode_cfg, {"synthesize", "gcls", "gcl_file", "offsets_ns"},
                   where);
        break;
      default:
        check_keys(mode_cfg, {}, where);
        break;
    }
  }

  std::map<std::string, double> vars;
  const std::string sweep_var = sweep_variable();
  if (!sweep_var.empty()) {
    if (!sweep_value) {
      throw ScenarioError("scenario sweeps " + sweep_var +
                          " but no sweep value was given");
    }
    vars[sweep_var] = *sweep_value;
  } else if (sweep_value) {
    throw ScenarioError("scenario has no sweep, but a sweep value was given");
  }

  ResolvedRun run;
  run.scenario = impl_->name;
  run.mode = mode;
  run.sweep_variable = sweep_var;
  run.sweep_value = sweep_value;
  run.seed = seed;

  const auto link_rate = static_cast<std::int64_t>(
      opt_num(j, "link_rate_bps", vars, "scenario", 100e6));
  if (link_rate <= 0) bad("scenario.link_rate_bps", "must be positive");

  run.sim.topo = resolve_topology(member(j, "topology", "scenario"), vars, link_rate);
  run.sim.duration = duration_override
                         ? *duration_override
                         : to_int(req_num(j, "duration_ns", vars, "scenario"),
                                  "scenario.duration_ns");
  if (run.sim.duration < 0) bad("scenario.duration_ns", "must be >= 0");
  run.sim.warmup_fraction = opt_num(j, "warmup_fraction", vars, "scenario", 0.1);
  if (run.sim.warmup_fraction < 0 || run.sim.warmup_fraction >= 1) {
    bad("scenario.warmup_fraction", "must be in [0, 1)");
  }
  run.sim.processing_delay =
      to_int(opt_num(j, "processing_delay_ns", vars, "scenario", 0),
             "scenario.processing_delay_ns");
  run.sim.seed = seed;
  const auto overhead = to_int(opt_num(j, "overhead_bytes", vars, "scenario", 0),
                               "scenario.overhead_bytes");

  // --- flows ------------------------------------------------------------
  const json& flows_j = member(j, "flows", "scenario");
  if (!flows_j.is_array() || flows_j.empty()) {
    bad("scenario.flows", "expected a non-empty array");
  }
  for (const auto& fj : flows_j) {
    const std::string base_id = req_string(fj, "id", "scenario.flows");
    const std::string where = "scenario.flows." + base_id;
    check_keys(fj,
               {"id", "class", "count", "priority", "source", "route",
                "det_burst", "mmpp", "ats", "avg_rate_hint_bps"},
               where);
    const int count = static_cast<int>(
        to_int(opt_num(fj, "count", vars, where, 1), where + ".count"));
    if (count < 1) bad(where + ".count", "must be >= 1");

    for (int i = 1; i <= count; ++i) {
      FlowSpec flow;
      flow.index = static_cast<std::int32_t>(run.sim.flows.size());
      flow.id = count > 1 ? base_id + "_" + std::to_string(i) : base_id;
      flow.cls = fj.value("class", "");
      flow.stream = fnv1a(flow.id.data(), flow.id.size());
      flow.priority = static_cast<int>(
          to_int(req_num(fj, "priority", vars, where), where + ".priority"));
      if (flow.priority < 0 || flow.priority > 7) {
        bad(where + ".priority", "priority must be 0..7");
      }

      if (fj.contains("det_burst")) {
        const json& d = fj["det_burst"];
        check_keys(d, {"period_ns", "offset_ns", "burst_len", "size_bytes",
                       "size_uniform_bytes"},
                   where + ".det_burst");
        DetBurstSpec det;
        det.period = to_int(req_num(d, "period_ns", vars, where), where + ".period_ns");
        det.offset = to_int(opt_num(d, "offset_ns", vars, where, 0), where + ".offset_ns");
        det.burst_len = to_int(req_num(d, "burst_len", vars, where), where + ".burst_len");
        det.size = parse_size(d, vars, where + ".det_burst");
        if (det.period <= 0) bad(where + ".period_ns", "must be positive");
        if (det.offset < 0) bad(where + ".offset_ns", "must be >= 0");
        if (det.burst_len < 1) bad(where + ".burst_len", "must be >= 1");
        flow.source = det;
      } else if (fj.contains("mmpp")) {
        const json& m = fj["mmpp"];
        check_keys(m,
                   {"to_fast_per_s", "to_slow_per_s", "rate_fast_per_s",
                    "rate_slow_per_s", "size_bytes", "size_uniform_bytes"},
                   where + ".mmpp");
        MmppSpec mmpp;
        mmpp.to_fast_per_s = req_num(m, "to_fast_per_s", vars, where);
        mmpp.to_slow_per_s = req_num(m, "to_slow_per_s", vars, where);
        mmpp.rate_fast_per_s = req_num(m, "rate_fast_per_s", vars, where);
        mmpp.rate_slow_per_s = req_num(m, "rate_slow_per_s", vars, where);
        mmpp.size = parse_size(m, vars, where + ".mmpp");
        if (mmpp.to_fast_per_s <= 0 || mmpp.to_slow_per_s <= 0 ||
            mmpp.rate_fast_per_s <= 0 || mmpp.rate_slow_per_s <= 0) {
          bad(where + ".mmpp", "rates must be positive");
        }
        flow.source = mmpp;
      } else {
        bad(where, "flow needs a det_burst or mmpp source");
      }

      if (fj.contains("ats")) {
        const json& a = fj["ats"];
        check_keys(a, {"cir_bps", "cbs_bits"}, where + ".ats");
        flow.ats.cir_bps = to_int(req_num(a, "cir_bps", vars, where), where + ".ats.cir_bps");
        flow.ats.cbs_bits = to_int(req_num(a, "cbs_bits", vars, where), where + ".ats.cbs_bits");
        if (flow.ats.cir_bps <= 0 || flow.ats.cbs_bits <= 0) {
          bad(where + ".ats", "cir and cbs must be positive");
        }
      }

      // Route: explicit link names, or the topology's canonical attachment.
      const std::string source =
          substitute_index(req_string(fj, "source", where), i);
      if (fj.contains("route")) {
        for (const auto& r : fj["route"]) {
          flow.route.push_back(run.sim.topo.link_index(r.get<std::string>()));
        }
      } else {
        const auto it = run.sim.topo.source_routes.find(source);
        if (it == run.sim.topo.source_routes.end()) {
          bad(where, "no route given and topology has no attachment for '" + source + "'");
        }
        flow.route = it->second;
      }
      try {
        run.sim.topo.validate_route(flow.route);
      } catch (const std::exception& e) {
        bad(where + ".route", e.what());
      }

      // Cross-check declared average rates against the primitive parameters.
      if (fj.contains("avg_rate_hint_bps")) {
        const double hint = req_num(fj, "avg_rate_hint_bps", vars, where);
        const double implied = flow.implied_rate_bps();
        if (hint > 0 && std::abs(implied - hint) > 0.15 * hint) {
          run.warnings.push_back(
              flow.id + ": implied rate " + std::to_string(implied / 1e6) +
              " Mbit/s deviates >15% from the declared " +
              std::to_string(hint / 1e6) + " Mbit/s");
        }
      }

      run.sim.flows.push_back(std::move(flow));
    }
  }

  run.be_priority = 7;
  std::int64_t max_frame_bytes = 0;
  for (const FlowSpec& f : run.sim.flows) {
    run.be_priority = std::min(run.be_priority, f.priority);
    max_frame_bytes = std::max(max_frame_bytes, f.max_frame_bits() / 8);
  }

  // --- per-port queue configuration --------------------------------------
  // F (per-port flow count of a priority) is bound per queue for the
  // aggregation-level formulas like "U_h*F/8".
  std::vector<std::vector<std::int32_t>> crossing(run.sim.topo.links.size());
  for (const FlowSpec& f : run.sim.flows) {
    for (const auto li : f.route) {
      crossing[static_cast<std::size_t>(li)].push_back(f.index);
    }
  }

  for (std::size_t li = 0; li < run.sim.topo.links.size(); ++li) {
    PortConfig& port = run.sim.topo.links[li].egress;
    port.mode = *fwd_mode;
    port.overhead_bytes = overhead;
    const std::string where = "scenario.modes." + mode + " (port " + port.link + ")";

    std::map<int, int> prio_flows;  // priority -> crossing flow count
    for (const auto fi : crossing[li]) {
      prio_flows[run.sim.flows[static_cast<std::size_t>(fi)].priority] += 1;
    }
    if (prio_flows.empty()) {
      // No traffic crosses this link; one permissive queue keeps it valid.
      port.queues = {QueueConfig{0, 0, 1, false}};
      if (*fwd_mode == ForwardingMode::Tas) port.gcl = GateControlList::all_open();
      continue;
    }

    if (*fwd_mode == ForwardingMode::Fifo) {
      port.queues = {QueueConfig{0, 0, 0, false}};
      continue;
    }

    std::int64_t slope_sum = 0;
    for (const auto& [prio, n_flows] : prio_flows) {
      QueueConfig qc;
      qc.priority = prio;
      auto qvars = vars;
      qvars["F"] = static_cast<double>(n_flows);

      if (*fwd_mode == ForwardingMode::Cbs && prio != run.be_priority) {
        const json& slopes = member(mode_cfg, "idle_slope_fraction", where);
        const auto it = slopes.find(std::to_string(prio));
        if (it == slopes.end()) {
          bad(where, "cbs needs idle_slope_fraction for priority " +
                         std::to_string(prio));
        }
        const double frac = eval_field(*it, qvars, where + ".idle_slope_fraction");
        if (frac <= 0 || frac > 1) {
          bad(where + ".idle_slope_fraction." + std::to_string(prio),
              "fraction must be in (0, 1]");
        }
        qc.idle_slope_bps = static_cast<std::int64_t>(
            std::llround(frac * static_cast<double>(port.link_rate_bps)));
        slope_sum += qc.idle_slope_bps;
      }

      if (*fwd_mode == ForwardingMode::Drr) {
        const json& quanta = member(mode_cfg, "quantum_bytes", where);
        const auto it = quanta.find(std::to_string(prio));
        if (it == quanta.end()) {
          bad(where, "drr needs quantum_bytes for priority " + std::to_string(prio));
        }
        // Quanta round to whole bytes ("1000*U_h*F/8" style formulas).
        qc.quantum_bytes = static_cast<std::int64_t>(
            std::llround(eval_field(*it, qvars, where + ".quantum_bytes")));
        if (qc.quantum_bytes < 1) {
          bad(where + ".quantum_bytes." + std::to_string(prio), "must be >= 1");
        }
      }

      if (*fwd_mode == ForwardingMode::Ats && prio != run.be_priority) {
        qc.ats_shaped = true;
      }
      port.queues.push_back(qc);
    }
    if (slope_sum > port.link_rate_bps) {
      bad(where, "sum of idleSlopes (" + std::to_string(slope_sum) +
                     " bps) exceeds the link rate");
    }

    if (*fwd_mode == ForwardingMode::Ats) {
      for (const auto fi : crossing[li]) {
        const FlowSpec& f = run.sim.flows[static_cast<std::size_t>(fi)];
        if (f.priority == run.be_priority) continue;
        if (f.ats.cir_bps <= 0 || f.ats.cbs_bits <= 0) {
          bad("scenario.flows." + f.id, "ats mode requires ats {cir_bps, cbs_bits}");
        }
        if (f.max_frame_bits() > f.ats.cbs_bits) {
          bad("scenario.flows." + f.id,
              "largest frame (" + std::to_string(f.max_frame_bits()) +
                  " bits) exceeds the committed burst size (" +
                  std::to_string(f.ats.cbs_bits) + " bits)");
        }
      }
    }
  }

  // --- time-aware mode: synthesized or file-provided schedules -----------
  if (*fwd_mode == ForwardingMode::Tas) {
    const bool synthesize = mode_cfg.value("synthesize", false);
    if (synthesize) {
      run.tas = synthesize_no_wait(run.sim.topo, run.sim.flows, run.be_priority,
                                   max_frame_bytes);
    } else if (mode_cfg.contains("gcls") || mode_cfg.contains("gcl_file")) {
      json gj;
      if (mode_cfg.contains("gcl_file")) {
        const auto path = std::filesystem::path(impl_->dir) /
                          mode_cfg["gcl_file"].get<std::string>();
        std::ifstream in(path);
        if (!in) bad("scenario.modes.tas.gcl_file", "cannot open " + path.string());
        gj = json::parse(in, nullptr, true, true);
      } else {
        gj = mode_cfg;
      }
      SynthResult loaded;
      for (auto it = gj["gcls"].begin(); it != gj["gcls"].end(); ++it) {
        GateControlList gcl;
        gcl.cycle = it.value()["cycle_ns"].get<SimTime>();
        gcl.guard_band = it.value().value("guard_band_ns", 0);
        for (const auto& e : it.value()["entries"]) {
          gcl.entries.push_back(
              {e[0].get<SimTime>(),
               parse_gate_bits(e[1].get<std::string>(), "scenario.modes.tas.gcls")});
        }
        gcl.validate();
        loaded.gcls.emplace(run.sim.topo.link_index(it.key()), std::move(gcl));
      }
      if (gj.contains("offsets_ns")) {
        for (auto it = gj["offsets_ns"].begin(); it != gj["offsets_ns"].end(); ++it) {
          for (const FlowSpec& f : run.sim.flows) {
            if (f.id == it.key()) loaded.offsets[f.index] = it.value().get<SimTime>();
          }
        }
      }
      run.tas = std::move(loaded);
    } else {
      bad("scenario.modes.tas", "needs synthesize:true, gcls, or gcl_file");
    }

    for (std::size_t li = 0; li < run.sim.topo.links.size(); ++li) {
      PortConfig& port = run.sim.topo.links[li].egress;
      const auto it = run.tas->gcls.find(static_cast<std::int32_t>(li));
      port.gcl = it != run.tas->gcls.end() ? it->second : GateControlList::all_open();
      port.audit_windows = true;
    }
    // Scheduled sources transmit on their no-wait offsets, paced frame by
    // frame at wire speed.
    for (auto& [fi, offset] : run.tas->offsets) {
      FlowSpec& f = run.sim.flows[static_cast<std::size_t>(fi)];
      auto& det = std::get<DetBurstSpec>(f.source);
      det.offset = offset;
      const auto first_link = static_cast<std::size_t>(f.route.front());
      det.spacing = transmission_time(
          det.size.min_bytes,
          run.sim.topo.links[first_link].egress.link_rate_bps, overhead);
    }
  }

  // --- canonical dump + hash ---------------------------------------------
  json dump;
  dump["scenario"] = run.scenario;
  dump["mode"] = run.mode;
  if (!sweep_var.empty()) dump[sweep_var] = *sweep_value;
  dump["duration_ns"] = run.sim.duration;
  dump["warmup_fraction"] = run.sim.warmup_fraction;
  dump["processing_delay_ns"] = run.sim.processing_delay;
  dump["be_priority"] = run.be_priority;
  json flows_dump = json::array();
  for (const FlowSpec& f : run.sim.flows) {
    json fd;
    fd["id"] = f.id;
    fd["priority"] = f.priority;
    if (const auto* det = std::get_if<DetBurstSpec>(&f.source)) {
      fd["det_burst"] = {{"period_ns", det->period},
                         {"offset_ns", det->offset},
                         {"burst_len", det->burst_len},
                         {"spacing_ns", det->spacing},
                         {"size_min", det->size.min_bytes},
                         {"size_max", det->size.max_bytes}};
    } else {
      const auto& m = std::get<MmppSpec>(f.source);
      fd["mmpp"] = {{"to_fast_per_s", m.to_fast_per_s},
                    {"to_slow_per_s", m.to_slow_per_s},
                    {"rate_fast_per_s", m.rate_fast_per_s},
                    {"rate_slow_per_s", m.rate_slow_per_s},
                    {"size_min", m.size.min_bytes},
                    {"size_max", m.size.max_bytes}};
    }
    if (f.ats.cir_bps > 0) {
      fd["ats"] = {{"cir_bps", f.ats.cir_bps}, {"cbs_bits", f.ats.cbs_bits}};
    }
    json route = json::array();
    for (const auto li : f.route) {
      route.push_back(run.sim.topo.links[static_cast<std::size_t>(li)].name);
    }
    fd["route"] = route;
    flows_dump.push_back(std::move(fd));
  }
  dump["flows"] = std::move(flows_dump);
  json ports_dump = json::array();
  for (const Link& l : run.sim.topo.links) {
    json pd;
    pd["link"] = l.name;
    pd["rate_bps"] = l.egress.link_rate_bps;
    json queues = json::array();
    for (const QueueConfig& q : l.egress.queues) {
      queues.push_back({{"priority", q.priority},
                        {"idle_slope_bps", q.idle_slope_bps},
                        {"quantum_bytes", q.quantum_bytes},
                        {"ats_shaped", q.ats_shaped}});
    }
    pd["queues"] = std::move(queues);
    if (l.egress.gcl) {
      json entries = json::array();
      for (const GclEntry& e : l.egress.gcl->entries) {
        entries.push_back({e.start, format_gate_bits(e.gates)});
      }
      pd["gcl"] = {{"cycle_ns", l.egress.gcl->cycle},
                   {"guard_band_ns", l.egress.gcl->guard_band},
                   {"entries", std::move(entries)}};
    }
    ports_dump.push_back(std::move(pd));
  }
  dump["ports"] = std::move(ports_dump);

  run.resolved_json = dump.dump(2);
  run.sim.scenario_hash = fnv1a(run.resolved_json.data(), run.resolved_json.size());
  return run;
}

std::string gcl_file_text(const SynthResult& synth, const Topology& topo,
                          const std::vector<FlowSpec>& flows) {
  json out;
  out["hyperperiod_ns"] = synth.hyperperiod;
  out["guard_band_ns"] = synth.guard_band;
  json offsets;
  for (const auto& [fi, offset] : synth.offsets) {
    offsets[flows[static_cast<std::size_t>(fi)].id] = offset;
  }
  out["offsets_ns"] = std::move(offsets);
  json gcls;
  for (const auto& [li, gcl] : synth.gcls) {
    json entries = json::array();
    for (const GclEntry& e : gcl.entries) {
      entries.push_back({e.start, format_gate_bits(e.gates)});
    }
    gcls[topo.links[static_cast<std::size_t>(li)].name] = {
        {"cycle_ns", gcl.cycle},
        {"guard_band_ns", gcl.guard_band},
        {"entries", std::move(entries)}};
  }
  out["gcls"] = std::move(gcls);
  return out.dump(2);
}

}  // namespace tsnsim
