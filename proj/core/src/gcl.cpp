#include "tsnsim/gcl.hpp"

#include <algorithm>

namespace tsnsim {

namespace {
constexpr std::uint8_t bit(int queue) {
  return static_cast<std::uint8_t>(1u << queue);
}
constexpr std::uint8_t higher_mask(int queue) {
  return static_cast<std::uint8_t>(~((1u << (queue + 1)) - 1u));
}
}  // namespace

GateControlList GateControlList::all_open() {
  GateControlList gcl;
  gcl.cycle = 1'000'000;  // arbitrary: a single all-open entry has no structure
  gcl.entries = {GclEntry{0, 0xFF}};
  return gcl;
}

void GateControlList::validate() const {
  TSNSIM_CHECK(cycle > 0, "gcl cycle must be positive");
  TSNSIM_CHECK(!entries.empty(), "gcl needs at least one entry");
  TSNSIM_CHECK(entries.front().start == 0, "first gcl entry must start at 0");
  for (std::size_t i = 1; i < entries.size(); ++i) {
    TSNSIM_CHECK(entries[i].start > entries[i - 1].start,
                 "gcl entries must be strictly increasing");
  }
  TSNSIM_CHECK(entries.back().start < cycle, "gcl entry beyond cycle");
}

std::size_t GateControlList::entry_index_at(SimTime offset) const {
  // Last entry with start <= offset.
  auto it = std::upper_bound(
      entries.begin(), entries.end(), offset,
      [](SimTime off, const GclEntry& e) { return off < e.start; });
  return static_cast<std::size_t>(it - entries.begin()) - 1;
}

bool GateControlList::gate_open(int queue, SimTime t) const {
  TSNSIM_CHECK(t >= 0, "gate query at negative time");
  const SimTime off = t % cycle;
  return (entries[entry_index_at(off)].gates & bit(queue)) != 0;
}

bool GateControlList::can_start(int queue, SimTime t, SimTime tx) const {
  TSNSIM_CHECK(tx > 0, "transmission time must be positive");
  if (entries.size() == 1) return (entries[0].gates & bit(queue)) != 0;

  const SimTime end = t + tx;
  SimTime base = t - (t % cycle);
  std::size_t i = entry_index_at(t % cycle);
  std::uint8_t prev = entries[i].gates;

  SimTime cursor = t;
  while (cursor < end) {
    if ((entries[i].gates & bit(queue)) == 0) return false;
    const SimTime seg_end =
        base + (i + 1 < entries.size() ? entries[i + 1].start : cycle);
    cursor = seg_end;
    if (i + 1 < entries.size()) {
      ++i;
    } else {
      i = 0;
      base += cycle;
    }
    if (cursor < end) {
      // Boundary strictly inside (t, end): a higher-priority window opening
      // here forbids the start; the frame would still be on the wire.
      const std::uint8_t rising =
          static_cast<std::uint8_t>(entries[i].gates & ~prev);
      if ((rising & higher_mask(queue)) != 0) return false;
    }
    prev = entries[i].gates;
  }
  return true;
}

SimTime GateControlList::next_can_start(int queue, SimTime t, SimTime tx) const {
  if (can_start(queue, t, tx)) return t;
  if (entries.size() == 1) return -1;  // constant gates can never change

  // Candidate instants are segment boundaries: a start becomes legal either
  // when this queue's gate opens or exactly when a blocking higher window
  // begins. Scan two full cycles past the transmission; if nothing fits by
  // then the pattern repeats and nothing ever will.
  const SimTime horizon = t + 2 * cycle + tx;
  SimTime base = t - (t % cycle);
  std::size_t i = entry_index_at(t % cycle);
  for (;;) {
    if (i + 1 < entries.size()) {
      ++i;
    } else {
      i = 0;
      base += cycle;
    }
    const SimTime boundary = base + entries[i].start;
    if (boundary > horizon) return -1;
    if (boundary > t && can_start(queue, boundary, tx)) return boundary;
  }
}

std::vector<GclWindow> GateControlList::windows_of(int queue) const {
  std::vector<GclWindow> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const bool open = (entries[i].gates & bit(queue)) != 0;
    const SimTime seg_start = entries[i].start;
    const SimTime seg_end =
        i + 1 < entries.size() ? entries[i + 1].start : cycle;
    if (!open) continue;
    if (!out.empty() && out.back().close == seg_start) {
      out.back().close = seg_end;  // merge adjacent open segments
    } else {
      out.push_back({queue, seg_start, seg_end});
    }
  }
  return out;
}

}  // namespace tsnsim
