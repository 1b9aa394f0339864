#include "tsnsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace tsnsim {

void MetricSeries::record_delay(std::int32_t flow, std::uint64_t seq,
                                SimTime departure, SimTime arrival) {
  TSNSIM_CHECK(arrival >= departure, "arrival before departure");
  delays.push_back(
      {flow, seq, departure, arrival, departure < warmup_cutoff});
}

void MetricSeries::record_backlog(SimTime t, std::int32_t link, int priority,
                                  std::int64_t bytes, std::int64_t frames) {
  TSNSIM_CHECK(bytes >= 0 && frames >= 0, "negative backlog");
  backlog.push_back({t, link, static_cast<std::int8_t>(priority), bytes, frames});
}

namespace {

SimTime nearest_rank(const std::vector<SimTime>& sorted, double q) {
  const auto n = static_cast<std::int64_t>(sorted.size());
  auto rank = static_cast<std::int64_t>(std::ceil(q * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[static_cast<std::size_t>(rank - 1)];
}

}  // namespace

Summary summarize(const MetricSeries& series, bool be_class) {
  Summary s;

  std::vector<SimTime> values;
  __int128 sum = 0;
  for (const DelaySample& d : series.delays) {
    if (d.warmup) continue;
    if (series.flow_is_be(d.flow) != be_class) continue;
    values.push_back(d.delay());
    sum += d.delay();
  }
  s.count = static_cast<std::int64_t>(values.size());
  if (s.count > 0) {
    std::sort(values.begin(), values.end());
    s.mean_delay = static_cast<double>(sum) / static_cast<double>(s.count);
    s.min_delay = values.front();
    s.max_delay = values.back();
    s.median_delay = nearest_rank(values, 0.5);
    s.p99_delay = nearest_rank(values, 0.99);
  }

  // Time-weighted backlog of the class's queues over [warmup, duration],
  // integrating the sum across all (link, queue) pairs of the class.
  std::map<std::pair<std::int32_t, int>, std::int64_t> last;
  std::int64_t total = 0;
  __int128 integral = 0;
  SimTime prev = series.warmup_cutoff;
  const SimTime end = series.duration;
  for (const BacklogSample& b : series.backlog) {
    const bool is_be = b.priority == series.be_priority;
    if (is_be != be_class) continue;
    if (b.time > end) break;
    const SimTime t = b.time < series.warmup_cutoff ? series.warmup_cutoff : b.time;
    if (t > prev) {
      integral += static_cast<__int128>(total) * (t - prev);
      prev = t;
    }
    auto& slot = last[{b.link, b.priority}];
    total += b.bytes - slot;
    slot = b.bytes;
    if (b.time >= series.warmup_cutoff && total > s.max_backlog) {
      s.max_backlog = total;
    }
  }
  if (end > prev) integral += static_cast<__int128>(total) * (end - prev);
  if (end > series.warmup_cutoff) {
    s.mean_backlog = static_cast<double>(integral) /
                     static_cast<double>(end - series.warmup_cutoff);
  }
  return s;
}

namespace {
std::optional<double> ratio(double a, double b) {
  if (b == 0.0) return std::nullopt;
  return a / b;
}
}  // namespace

RatioSummary relative_to_baseline(const Summary& a, const Summary& baseline) {
  RatioSummary r;
  r.mean_delay = ratio(a.mean_delay, baseline.mean_delay);
  r.median_delay = ratio(static_cast<double>(a.median_delay),
                         static_cast<double>(baseline.median_delay));
  r.p99_delay = ratio(static_cast<double>(a.p99_delay),
                      static_cast<double>(baseline.p99_delay));
  r.max_delay = ratio(static_cast<double>(a.max_delay),
                      static_cast<double>(baseline.max_delay));
  r.mean_backlog = ratio(a.mean_backlog, baseline.mean_backlog);
  r.max_backlog = ratio(static_cast<double>(a.max_backlog),
                        static_cast<double>(baseline.max_backlog));
  return r;
}

std::vector<double> moving_average(const std::vector<SimTime>& values,
                                   std::size_t window) {
  TSNSIM_CHECK(window >= 1, "window must be >= 1");
  std::vector<double> out;
  out.reserve(values.size());
  __int128 sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= window) sum -= values[i - window];
    const std::size_t n = i + 1 < window ? i + 1 : window;
    out.push_back(static_cast<double>(sum) / static_cast<double>(n));
  }
  return out;
}

void write_delays_csv(std::ostream& out, const MetricSeries& series) {
  out << "flow_id,seq,departure_ns,arrival_ns,delay_ns,warmup_flag\n";
  for (const DelaySample& d : series.delays) {
    out << series.flow_ids[static_cast<std::size_t>(d.flow)] << ',' << d.seq
        << ',' << d.departure << ',' << d.arrival << ',' << d.delay() << ','
        << (d.warmup ? 1 : 0) << '\n';
  }
}

void write_backlog_csv(std::ostream& out, const MetricSeries& series) {
  out << "time_ns,node,port,queue,bytes,frames\n";
  for (const BacklogSample& b : series.backlog) {
    out << b.time << ',' << series.link_nodes[static_cast<std::size_t>(b.link)]
        << ',' << series.link_names[static_cast<std::size_t>(b.link)] << ','
        << static_cast<int>(b.priority) << ',' << b.bytes << ',' << b.frames
        << '\n';
  }
}

std::vector<DelayCsvRow> read_delays_csv(std::istream& in) {
  std::vector<DelayCsvRow> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DelayCsvRow row;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, row.flow_id, ',');
    std::getline(ss, field, ',');
    row.seq = std::stoull(field);
    std::getline(ss, field, ',');
    row.departure = std::stoll(field);
    std::getline(ss, field, ',');
    row.arrival = std::stoll(field);
    std::getline(ss, field, ',');
    row.delay = std::stoll(field);
    std::getline(ss, field, ',');
    row.warmup = field == "1";
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tsnsim
