#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsnsim/time.hpp"

namespace tsnsim {

/// One cycle segment: gate state vector from `start` (cycle offset) until the
/// next entry. Bit i open means queue/priority i may transmit.
struct GclEntry {
  SimTime start = 0;
  std::uint8_t gates = 0xFF;
};

/// An absolute open interval of one queue within the cycle.
struct GclWindow {
  int queue = 0;
  SimTime open = 0;
  SimTime close = 0;
};

/// Cyclic gate schedule. Entries are sorted, start at 0 and cover [0, cycle).
struct GateControlList {
  SimTime cycle = 0;
  std::vector<GclEntry> entries;
  SimTime guard_band = 0;  // worst-case interfering frame time, recorded by synthesis

  static GateControlList all_open();

  void validate() const;

  /// Gate bit for `queue` at t mod cycle.
  bool gate_open(int queue, SimTime t) const;

  /// A transmission of length tx may start at t iff the queue's gate stays
  /// open over all of [t, t+tx) and no higher-priority queue's window opens
  /// strictly inside (t, t+tx): a frame must finish by the time protected
  /// traffic is scheduled, which is what the guard band in front of each
  /// window enforces. Finishing exactly at a window start is allowed.
  bool can_start(int queue, SimTime t, SimTime tx) const;

  /// Earliest t' >= t with can_start(queue, t', tx), or -1 if no such
  /// instant exists in any cycle.
  SimTime next_can_start(int queue, SimTime t, SimTime tx) const;

  /// Open intervals of one queue over a single cycle, merged across the wrap.
  std::vector<GclWindow> windows_of(int queue) const;

 private:
  std::size_t entry_index_at(SimTime offset) const;
};

}  // namespace tsnsim
