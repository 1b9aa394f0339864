#include "tsnsim/tas_synth.hpp"

#include <algorithm>
#include <numeric>

namespace tsnsim {

namespace {

struct Interval {
  SimTime start = 0;
  SimTime end = 0;
  int priority = 0;
};

/// Splits [start, start+len) into cycle-local pieces.
void add_mod(std::vector<Interval>& out, SimTime start, SimTime len,
             SimTime cycle, int priority) {
  SimTime s = start % cycle;
  if (s + len <= cycle) {
    out.push_back({s, s + len, priority});
  } else {
    out.push_back({s, cycle, priority});
    out.push_back({0, s + len - cycle, priority});
  }
}

bool overlaps(const Interval& a, const Interval& b) {
  return a.start < b.end && b.start < a.end;
}

SimTime lcm_checked(SimTime a, SimTime b, const std::string& flow) {
  const SimTime g = std::gcd(a, b);
  const __int128 l = static_cast<__int128>(a) / g * b;
  if (l > 10'000'000'000'000LL) {  // 10^4 s of schedule; beyond this the GCL
    throw SynthesisError(flow, "hyperperiod exceeds 10^13 ns");
  }
  return static_cast<SimTime>(l);
}

}  // namespace

SynthResult synthesize_no_wait(const Topology& topo,
                               const std::vector<FlowSpec>& flows,
                               int be_priority,
                               std::int64_t max_interfering_bytes) {
  std::vector<std::int32_t> scheduled;
  SimTime hyper = 1;
  std::int64_t rate = 0;
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const FlowSpec& f = flows[i];
    if (f.priority <= be_priority) continue;
    const auto* det = std::get_if<DetBurstSpec>(&f.source);
    if (det == nullptr) {
      throw SynthesisError(f.id, "source is not deterministic-periodic");
    }
    if (!det->size.fixed()) {
      throw SynthesisError(f.id, "scheduled flows need a fixed frame size");
    }
    TSNSIM_CHECK(det->period > 0, "scheduled flow needs a period");
    for (const auto li : f.route) {
      const std::int64_t r = topo.links[static_cast<std::size_t>(li)].egress.link_rate_bps;
      if (rate == 0) rate = r;
      if (r != rate) {
        throw SynthesisError(f.id, "heterogeneous link rates are not schedulable");
      }
    }
    hyper = lcm_checked(hyper, det->period, f.id);
    scheduled.push_back(static_cast<std::int32_t>(i));
  }

  SynthResult result;
  result.hyperperiod = hyper;
  result.guard_band =
      rate > 0 ? transmission_time(max_interfering_bytes, rate) : 0;

  // Shorter periods first, bigger windows first among equals.
  std::sort(scheduled.begin(), scheduled.end(), [&](std::int32_t a, std::int32_t b) {
    const auto& da = std::get<DetBurstSpec>(flows[static_cast<std::size_t>(a)].source);
    const auto& db = std::get<DetBurstSpec>(flows[static_cast<std::size_t>(b)].source);
    if (da.period != db.period) return da.period < db.period;
    const auto wa = da.burst_len * da.size.min_bytes;
    const auto wb = db.burst_len * db.size.min_bytes;
    if (wa != wb) return wa > wb;
    return a < b;
  });

  std::map<std::int32_t, std::vector<Interval>> reserved;  // per link

  for (const std::int32_t fi : scheduled) {
    const FlowSpec& f = flows[static_cast<std::size_t>(fi)];
    const auto& det = std::get<DetBurstSpec>(f.source);
    const SimTime tx = transmission_time(det.size.min_bytes, rate);
    const SimTime window = det.burst_len * tx;
    if (window > det.period) {
      throw SynthesisError(f.id, "burst does not fit into its own period");
    }
    const SimTime instances = hyper / det.period;

    SimTime offset = 0;
    bool placed = false;
    while (offset < det.period) {
      SimTime shift = -1;
      for (std::size_t hop = 0; hop < f.route.size() && shift < 0; ++hop) {
        const auto li = f.route[hop];
        const auto& taken = reserved[li];
        for (SimTime n = 0; n < instances && shift < 0; ++n) {
          std::vector<Interval> mine;
          add_mod(mine, offset + n * det.period + static_cast<SimTime>(hop) * tx,
                  window, hyper, f.priority);
          for (const Interval& m : mine) {
            for (const Interval& r : taken) {
              if (overlaps(m, r)) {
                shift = r.end - m.start;
                break;
              }
            }
            if (shift >= 0) break;
          }
        }
      }
      if (shift < 0) {
        placed = true;
        break;
      }
      offset += shift;
    }
    if (!placed) {
      throw SynthesisError(f.id, "no conflict-free offset below the period");
    }

    result.offsets[fi] = offset;
    for (std::size_t hop = 0; hop < f.route.size(); ++hop) {
      auto& taken = reserved[f.route[hop]];
      for (SimTime n = 0; n < instances; ++n) {
        add_mod(taken, offset + n * det.period + static_cast<SimTime>(hop) * tx,
                window, hyper, f.priority);
      }
      std::sort(taken.begin(), taken.end(),
                [](const Interval& a, const Interval& b) { return a.start < b.start; });
    }
  }

  // Build per-link GCLs: scheduled priorities open exactly in their windows,
  // everything else open in the complement.
  for (auto& [link, taken] : reserved) {
    std::uint8_t scheduled_mask = 0;
    for (const Interval& iv : taken) {
      scheduled_mask |= static_cast<std::uint8_t>(1u << iv.priority);
    }
    std::vector<SimTime> cuts{0, hyper};
    for (const Interval& iv : taken) {
      cuts.push_back(iv.start);
      cuts.push_back(iv.end);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    GateControlList gcl;
    gcl.cycle = hyper;
    gcl.guard_band = result.guard_band;
    SimTime window_time = 0;
    std::int64_t window_count = 0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      std::uint8_t gates = static_cast<std::uint8_t>(~scheduled_mask);
      bool in_window = false;
      for (const Interval& iv : taken) {
        if (iv.start <= cuts[c] && cuts[c] < iv.end) {
          gates = static_cast<std::uint8_t>(1u << iv.priority);
          in_window = true;
          break;
        }
      }
      if (in_window) {
        window_time += cuts[c + 1] - cuts[c];
        if (gcl.entries.empty() ||
            (gcl.entries.back().gates & scheduled_mask) == 0) {
          ++window_count;
        }
      }
      if (!gcl.entries.empty() && gcl.entries.back().gates == gates) continue;
      gcl.entries.push_back({cuts[c], gates});
    }
    if (window_time + window_count * result.guard_band >= hyper) {
      throw SynthesisError(topo.links[static_cast<std::size_t>(link)].name,
                           "windows plus guard bands fill the whole cycle");
    }
    gcl.validate();
    result.gcls.emplace(link, std::move(gcl));
  }

  return result;
}

}  // namespace tsnsim
