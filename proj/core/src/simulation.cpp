#include "tsnsim/simulation.hpp"

#include <algorithm>

namespace tsnsim {

/// Binds one egress port to the kernel and the metric sinks.
struct Simulation::Binding : PortScheduler, PortObserver {
  Simulation* sim = nullptr;
  std::int32_t link = 0;

  EventHandle schedule_port_event(SimTime t, EventKind kind) override {
    return sim->queue_.schedule(t, kind, link);
  }
  bool cancel_event(EventHandle handle) override {
    return sim->queue_.cancel(handle);
  }

  void backlog_sample(SimTime t, int priority, std::int64_t bytes,
                      std::int64_t frames) override {
    sim->series_.record_backlog(t, link, priority, bytes, frames);
  }

  void tx_start(SimTime t, const Frame& frame, SimTime waited) override {
    MetricSeries& s = sim->series_;
    if (s.flow_is_be(frame.flow)) {
      s.max_be_wait = std::max(s.max_be_wait, waited);
    } else {
      s.max_hp_wait = std::max(s.max_hp_wait, waited);
    }
    if (sim->cfg_.trace_hops) {
      s.hop_trace.push_back({frame.id, frame.flow, frame.hop, frame.enqueued_at,
                             t, t + sim->ports_[static_cast<std::size_t>(link)]
                                        ->tx_time(frame)});
    }
  }
};

Simulation::Simulation(SimConfig cfg) : cfg_(std::move(cfg)) {
  TSNSIM_CHECK(cfg_.duration >= 0, "duration must be non-negative");
  TSNSIM_CHECK(cfg_.warmup_fraction >= 0 && cfg_.warmup_fraction < 1,
               "warmup fraction must be in [0, 1)");

  series_.seed = cfg_.seed;
  series_.scenario_hash = cfg_.scenario_hash;
  series_.duration = cfg_.duration;
  series_.warmup_cutoff = static_cast<SimTime>(
      static_cast<double>(cfg_.duration) * cfg_.warmup_fraction);

  int be_priority = 7;
  for (const FlowSpec& f : cfg_.flows) {
    be_priority = std::min(be_priority, f.priority);
    series_.flow_ids.push_back(f.id);
    series_.flow_priorities.push_back(f.priority);
    cfg_.topo.validate_route(f.route);
  }
  series_.be_priority = be_priority;

  for (std::size_t i = 0; i < cfg_.topo.links.size(); ++i) {
    const Link& l = cfg_.topo.links[i];
    series_.link_names.push_back(l.name);
    series_.link_nodes.push_back(l.egress.node);
    auto binding = std::make_unique<Binding>();
    binding->sim = this;
    binding->link = static_cast<std::int32_t>(i);
    ports_.push_back(std::make_unique<EgressPort>(l.egress, *binding,
                                                  binding.get(), &cfg_.flows));
    bindings_.push_back(std::move(binding));
  }

  for (const FlowSpec& f : cfg_.flows) {
    sources_.push_back(SourceState{RngStream(cfg_.seed, f.stream), {}, {}, 0});
  }
}

Simulation::~Simulation() = default;

void Simulation::prime_sources() {
  for (std::size_t i = 0; i < cfg_.flows.size(); ++i) {
    const FlowSpec& flow = cfg_.flows[i];
    const auto target = static_cast<std::int32_t>(i);
    if (const auto* det = std::get_if<DetBurstSpec>(&flow.source)) {
      if (det->offset < cfg_.duration) {
        queue_.schedule(det->offset, EventKind::SourceWakeup, target);
      }
    } else {
      schedule_mmpp(target, 0);
    }
  }
}

void Simulation::schedule_mmpp(std::int32_t flow, SimTime now) {
  SourceState& src = sources_[static_cast<std::size_t>(flow)];
  const auto& spec = std::get<MmppSpec>(cfg_.flows[static_cast<std::size_t>(flow)].source);
  const FlowArrival next = mmpp_step(src.mmpp.mmpp, spec, src.rng);
  const SimTime at = now + next.time;
  if (at < cfg_.duration) {
    src.mmpp.pending_size = next.size_bytes;
    queue_.schedule(at, EventKind::SourceWakeup, flow);
  }
}

void Simulation::emit(std::int32_t flow, SimTime now, std::int64_t size_bytes) {
  const FlowSpec& spec = cfg_.flows[static_cast<std::size_t>(flow)];
  SourceState& src = sources_[static_cast<std::size_t>(flow)];
  Frame f;
  f.id = next_frame_id_++;
  f.flow = flow;
  f.flow_seq = src.next_seq++;
  f.priority = spec.priority;
  f.size_bytes = size_bytes;
  f.emitted = now;
  f.hop = 0;
  ++series_.emitted;
  ports_[static_cast<std::size_t>(spec.route.front())]->enqueue(std::move(f), now);
}

void Simulation::on_source_wakeup(std::int32_t flow, SimTime now) {
  const FlowSpec& spec = cfg_.flows[static_cast<std::size_t>(flow)];
  SourceState& src = sources_[static_cast<std::size_t>(flow)];

  if (const auto* det = std::get_if<DetBurstSpec>(&spec.source)) {
    DetSourceState& st = src.det;
    if (det->spacing == 0) {
      // Whole burst lands as an instantaneous backlog.
      for (const FlowArrival& a : det_next_burst(*det, st.burst, src.rng)) {
        emit(flow, now, a.size_bytes);
      }
      ++st.burst;
      const SimTime next = det->offset + st.burst * det->period;
      if (next < cfg_.duration) {
        queue_.schedule(next, EventKind::SourceWakeup, flow);
      }
      return;
    }
    // Paced burst: one frame per wakeup at offset + n*period + j*spacing.
    if (st.next_in_burst == 0) {
      st.pending = det_next_burst(*det, st.burst, src.rng);
    }
    emit(flow, now, st.pending[static_cast<std::size_t>(st.next_in_burst)].size_bytes);
    ++st.next_in_burst;
    SimTime next;
    if (st.next_in_burst < det->burst_len) {
      next = st.pending[static_cast<std::size_t>(st.next_in_burst)].time;
    } else {
      st.next_in_burst = 0;
      ++st.burst;
      next = det->offset + st.burst * det->period;
    }
    if (next < cfg_.duration) {
      queue_.schedule(next, EventKind::SourceWakeup, flow);
    }
    return;
  }

  emit(flow, now, src.mmpp.pending_size);
  schedule_mmpp(flow, now);
}

void Simulation::forward(Frame frame, SimTime now) {
  const FlowSpec& spec = cfg_.flows[static_cast<std::size_t>(frame.flow)];
  frame.hop += 1;
  if (frame.hop >= static_cast<int>(spec.route.size())) {
    // Route exhausted: topology validation guarantees this node is a sink.
    ++series_.delivered;
    series_.record_delay(frame.flow, frame.flow_seq, frame.emitted, now);
    return;
  }
  const auto next_link = static_cast<std::size_t>(
      spec.route[static_cast<std::size_t>(frame.hop)]);
  if (cfg_.processing_delay == 0) {
    ports_[next_link]->enqueue(std::move(frame), now);
  } else {
    const std::uint64_t park = next_park_++;
    parked_.emplace(park, std::move(frame));
    queue_.schedule(now + cfg_.processing_delay, EventKind::FrameArrival,
                    static_cast<std::int32_t>(next_link), park);
  }
}

void Simulation::on_complete(std::int32_t link, SimTime now) {
  Frame frame = ports_[static_cast<std::size_t>(link)]->complete_transmission(now);
  forward(std::move(frame), now);
}

MetricSeries Simulation::run() {
  prime_sources();

  while (auto ev = queue_.pop_next()) {
    if (ev->time >= cfg_.duration) break;
    switch (ev->kind) {
      case EventKind::SourceWakeup:
        on_source_wakeup(ev->target, ev->time);
        break;
      case EventKind::TransmissionComplete:
        on_complete(ev->target, ev->time);
        break;
      case EventKind::FrameArrival: {
        auto it = parked_.find(ev->aux);
        TSNSIM_CHECK(it != parked_.end(), "arrival for unknown frame");
        Frame frame = std::move(it->second);
        parked_.erase(it);
        ports_[static_cast<std::size_t>(ev->target)]->enqueue(std::move(frame),
                                                              ev->time);
        break;
      }
      case EventKind::GateChange:
      case EventKind::CreditZeroCrossing:
      case EventKind::EligibilityReached:
      case EventKind::DrrVisit:
        ports_[static_cast<std::size_t>(ev->target)]->wakeup(ev->time);
        break;
    }
  }

  std::uint64_t in_system = parked_.size();
  for (const auto& port : ports_) {
    in_system += static_cast<std::uint64_t>(port->backlog_frames());
    if (port->busy()) ++in_system;
    series_.wc_violations += port->audit().work_conservation_violations;
    series_.idle_backlog_intervals += port->audit().idle_backlog_intervals;
    series_.idle_backlog_time += port->audit().idle_backlog_time;
    series_.window_overlaps += port->audit().window_overlaps;
  }
  series_.in_system_at_end = in_system;
  TSNSIM_CHECK(series_.emitted == series_.delivered + in_system,
               "frame conservation violated");
  return std::move(series_);
}

MetricSeries run_simulation(SimConfig cfg) {
  Simulation sim(std::move(cfg));
  return sim.run();
}

}  // namespace tsnsim
