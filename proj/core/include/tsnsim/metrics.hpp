#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsnsim/time.hpp"

namespace tsnsim {

struct DelaySample {
  std::int32_t flow = 0;
  std::uint64_t seq = 0;
  SimTime departure = 0;  // source emission
  SimTime arrival = 0;    // sink reception
  bool warmup = false;

  SimTime delay() const { return arrival - departure; }
};

struct BacklogSample {
  SimTime time = 0;
  std::int32_t link = 0;
  std::int8_t priority = 0;
  std::int64_t bytes = 0;
  std::int64_t frames = 0;
};

struct HopTraceRow {
  std::uint64_t frame = 0;
  std::int32_t flow = 0;
  int hop = 0;
  SimTime enqueued = 0;
  SimTime tx_start = 0;
  SimTime tx_done = 0;
};

/// Everything one deterministic run produces. Appended in event order, so
/// identical inputs give byte-identical CSV dumps.
struct MetricSeries {
  std::uint64_t seed = 0;
  std::uint64_t scenario_hash = 0;
  SimTime duration = 0;
  SimTime warmup_cutoff = 0;
  int be_priority = 0;

  std::vector<std::string> flow_ids;
  std::vector<int> flow_priorities;
  std::vector<std::string> link_names;
  std::vector<std::string> link_nodes;

  std::vector<DelaySample> delays;
  std::vector<BacklogSample> backlog;
  std::vector<HopTraceRow> hop_trace;  // only when tracing is on

  std::uint64_t emitted = 0;
  std::uint64_t delivered = 0;
  std::uint64_t in_system_at_end = 0;

  SimTime max_hp_wait = 0;  // worst per-hop queuing delay of any non-BE frame
  SimTime max_be_wait = 0;
  std::uint64_t wc_violations = 0;
  std::uint64_t idle_backlog_intervals = 0;
  SimTime idle_backlog_time = 0;
  std::uint64_t window_overlaps = 0;

  void record_delay(std::int32_t flow, std::uint64_t seq, SimTime departure,
                    SimTime arrival);
  void record_backlog(SimTime t, std::int32_t link, int priority,
                      std::int64_t bytes, std::int64_t frames);

  bool flow_is_be(std::int32_t flow) const {
    return flow_priorities[static_cast<std::size_t>(flow)] == be_priority;
  }
};

/// Order statistics over post-warmup delays plus time-weighted backlog of the
/// matching queues. Median and p99 are nearest-rank; the mean is
/// sum/count in double, recomputable exactly from the integer samples.
struct Summary {
  std::int64_t count = 0;
  double mean_delay = 0;
  SimTime min_delay = 0;
  SimTime median_delay = 0;
  SimTime p99_delay = 0;
  SimTime max_delay = 0;
  double mean_backlog = 0;
  std::int64_t max_backlog = 0;
};

/// Summary over the BE class (lowest priority) or over everything else.
Summary summarize(const MetricSeries& series, bool be_class);

/// Ratios a/baseline per statistic; a zero baseline yields no value.
struct RatioSummary {
  std::optional<double> mean_delay;
  std::optional<double> median_delay;
  std::optional<double> p99_delay;
  std::optional<double> max_delay;
  std::optional<double> mean_backlog;
  std::optional<double> max_backlog;
};

RatioSummary relative_to_baseline(const Summary& a, const Summary& baseline);

/// Sliding arithmetic mean over the last `window` samples, one output per
/// input index (partial windows while warming in).
std::vector<double> moving_average(const std::vector<SimTime>& values,
                                   std::size_t window);

void write_delays_csv(std::ostream& out, const MetricSeries& series);
void write_backlog_csv(std::ostream& out, const MetricSeries& series);

struct DelayCsvRow {
  std::string flow_id;
  std::uint64_t seq = 0;
  SimTime departure = 0;
  SimTime arrival = 0;
  SimTime delay = 0;
  bool warmup = false;
};
std::vector<DelayCsvRow> read_delays_csv(std::istream& in);

}  // namespace tsnsim
