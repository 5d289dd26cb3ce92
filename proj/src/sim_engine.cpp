#include "tsn5g/sim_engine.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <set>

#include "tsn5g/error.hpp"

namespace tsn5g {

std::int64_t ExperimentConfig::queue_capacity(int pcp) const {
  for (const auto& q : queues)
    if (q.pcp == pcp) return q.capacity_bytes;
  return default_queue_bytes;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.version != 1) out.push_back("unsupported config version " + std::to_string(cfg.version));
  for (const auto& v : validate_topology(cfg.topology)) out.push_back("topology: " + v.describe());
  if (!cfg.topology.link(NodeId::MS, NodeId::NW)) out.push_back("topology: no MS-NW link");
  if (!cfg.topology.link(NodeId::DS, NodeId::SL)) out.push_back("topology: no DS-SL link");
  if (cfg.streams.empty()) out.push_back("no streams");
  for (auto& s : validate_streams(cfg.streams)) out.push_back("stream " + s);
  for (const auto& [name, gcl] : {std::pair{"gcl_ms", &cfg.gcl_ms}, std::pair{"gcl_sl", &cfg.gcl_sl}}) {
    if (!*gcl) continue;
    auto r = build_gcl(**gcl);
    if (!r.ok()) out.push_back(std::string(name) + ": " + r.describe());
  }
  for (auto& s : validate_bridge(cfg.bridge)) out.push_back(s);
  for (const auto& s : cfg.streams)
    if (!cfg.bridge.per_pcp.count(s.pcp) && !cfg.bridge.fallback)
      out.push_back("bridge: no delay model for pcp " + std::to_string(s.pcp));
  if (cfg.default_queue_bytes <= 0) out.push_back("default queue capacity must be positive");
  for (const auto& q : cfg.queues)
    if (q.capacity_bytes <= 0) out.push_back("queue pcp " + std::to_string(q.pcp) + ": capacity must be positive");
  if (cfg.duration <= TimeNs{0}) out.push_back("duration must be positive");
  if (cfg.drain < TimeNs{0}) out.push_back("drain must be non-negative");
  for (NodeId p : cfg.probe_points)
    if (p != NodeId::MS && p != NodeId::SL) out.push_back("probe points must be MS or SL");
  return out;
}

const QueueStats* RunResult::queue(NodeId node, int pcp) const {
  for (const auto& q : queues)
    if (q.node == node && q.pcp == pcp) return &q;
  return nullptr;
}

LatencySeries RunResult::latency(int pcp) const {
  LatencySeries s;
  for (const auto& p : packets)
    if (p.pcp == pcp && p.fate == PacketFate::Delivered) s.samples.push_back({p.seq, p.d_emp()});
  std::sort(s.samples.begin(), s.samples.end(), [](const auto& a, const auto& b) { return a.seq < b.seq; });
  if (cycle > TimeNs{0}) s.meta.cycle = cycle;
  return s;
}

TimeNs compute_K(const Topology& topo, std::int64_t len_bytes) {
  const LinkSpec* up = topo.link(NodeId::MS, NodeId::NW);
  const LinkSpec* down = topo.link(NodeId::DS, NodeId::SL);
  if (!up) throw Error(ErrorCode::MissingLink, "MS-NW");
  if (!down) throw Error(ErrorCode::MissingLink, "DS-SL");
  return sending_delay(len_bytes, *up) + sending_delay(len_bytes, *down) + topo.proc_delay(NodeId::SL);
}

namespace {

enum class Ev : std::uint8_t { GenDc, GenBe, Enqueue, Wake, TxDone, ArriveNw };
enum PortIdx : std::uint8_t { kMs = 0, kDs = 1, kSl = 2 };

struct Payload {
  Ev kind;
  std::uint8_t port;
  std::uint32_t id;  // packet or stream index
  std::uint64_t n;   // BE frame counter
};

struct Fifo {
  int pcp = 0;
  std::int64_t capacity = 0;
  std::deque<std::uint32_t> items;
  std::int64_t bytes = 0;
  QueueStats stats;
};

struct Port {
  NodeId node = NodeId::MS;
  std::optional<GateControlList> gcl;
  std::vector<Fifo> queues;  // highest pcp first
  LinkSpec link;
  TimeNs busy_until{0};
  TimeNs wake_at = TimeNs::max();
  bool probe = false;
};

class Engine {
public:
  explicit Engine(const ExperimentConfig& cfg) : cfg_(cfg), bridge_(cfg.bridge) {
    BridgeDelayModel model = cfg.bridge;
    model.seed = cfg.seed;
    bridge_ = Bridge(std::move(model));

    const Topology& topo = cfg.topology;
    proc_ms_ = topo.proc_delay(NodeId::MS);
    proc_nw_ = topo.proc_delay(NodeId::NW);
    proc_ds_ = topo.proc_delay(NodeId::DS);
    proc_sl_ = topo.proc_delay(NodeId::SL);

    const LinkSpec* sl_out = topo.link(NodeId::SL, NodeId::RX);
    ports_[kMs] = make_port(NodeId::MS, cfg.gcl_ms, *topo.link(NodeId::MS, NodeId::NW), true);
    ports_[kDs] = make_port(NodeId::DS, std::nullopt, *topo.link(NodeId::DS, NodeId::SL), false);
    ports_[kSl] = make_port(NodeId::SL, cfg.gcl_sl, sl_out ? *sl_out : *topo.link(NodeId::DS, NodeId::SL), true);
    for (NodeId p : cfg.probe_points) {
      if (p == NodeId::MS) ms_probe_ = true;
      if (p == NodeId::SL) sl_probe_ = true;
    }

    stream_of_pcp_.fill(-1);
    next_seq_.assign(cfg.streams.size(), 0);
    for (std::size_t i = 0; i < cfg.streams.size(); ++i) {
      const StreamSpec& s = cfg.streams[i];
      stream_of_pcp_[static_cast<std::size_t>(s.pcp)] = static_cast<int>(i);
      res_.k_by_pcp[s.pcp] = compute_K(topo, s.packet_len_bytes);
      for (auto* port : {&ports_[kMs], &ports_[kDs], &ports_[kSl]}) fifo(*port, s.pcp);
    }
    res_.seed = cfg.seed;
    if (cfg.gcl_sl)
      res_.cycle = cfg.gcl_sl->cycle;
    else if (cfg.gcl_ms)
      res_.cycle = cfg.gcl_ms->cycle;
  }

  RunResult run() {
    for (std::size_t i = 0; i < cfg_.streams.size(); ++i) {
      const StreamSpec& s = cfg_.streams[i];
      const auto idx = static_cast<std::uint32_t>(i);
      if (s.kind == StreamKind::BE)
        events_.push(TimeNs{0}, {Ev::GenBe, 0, idx, 0});
      else
        events_.push(s.phase, {Ev::GenDc, 0, idx, 0});
    }
    const TimeNs end = cfg_.duration + cfg_.drain;
    while (!events_.empty() && events_.top().time <= end) {
      auto e = events_.pop();
      ++res_.events;
      dispatch(e.time, e.payload);
    }
    finish();
    return std::move(res_);
  }

private:
  Port make_port(NodeId node, const std::optional<GclSpec>& gcl, const LinkSpec& link, bool probe) {
    Port p;
    p.node = node;
    if (gcl) p.gcl = build_gcl_or_throw(*gcl);
    p.link = link;
    p.probe = probe;
    return p;
  }

  Fifo& fifo(Port& port, int pcp) {
    for (auto& f : port.queues)
      if (f.pcp == pcp) return f;
    Fifo f;
    f.pcp = pcp;
    f.capacity = port.node == NodeId::DS ? std::numeric_limits<std::int64_t>::max() : cfg_.queue_capacity(pcp);
    f.stats.node = port.node;
    f.stats.pcp = pcp;
    f.stats.capacity_bytes = f.capacity;
    port.queues.push_back(std::move(f));
    std::sort(port.queues.begin(), port.queues.end(), [](const Fifo& a, const Fifo& b) { return a.pcp > b.pcp; });
    for (auto& q : port.queues)
      if (q.pcp == pcp) return q;
    return port.queues.front();
  }

  void dispatch(TimeNs now, const Payload& ev) {
    switch (ev.kind) {
      case Ev::GenDc: gen_dc(now, ev.id); break;
      case Ev::GenBe: gen_be(now, ev.id, ev.n); break;
      case Ev::Enqueue: enqueue(now, ev.port, ev.id); break;
      case Ev::Wake: {
        Port& p = ports_[ev.port];
        if (p.wake_at == now) p.wake_at = TimeNs::max();
        try_transmit(now, ev.port);
        break;
      }
      case Ev::TxDone: try_transmit(now, ev.port); break;
      case Ev::ArriveNw: arrive_nw(now, ev.id); break;
    }
  }

  std::uint32_t create_packet(TimeNs now, std::size_t stream) {
    const StreamSpec& s = cfg_.streams[stream];
    Packet p;
    p.seq = ++next_seq_[stream];
    p.pcp = s.pcp;
    p.len_bytes = s.packet_len_bytes;
    p.created_at = now;
    res_.packets.push_back(p);
    ++res_.packets_in;
    const auto id = static_cast<std::uint32_t>(res_.packets.size() - 1);
    schedule_packet(now + proc_ms_, {Ev::Enqueue, kMs, id, 0});
    return id;
  }

  void schedule_packet(TimeNs t, Payload p) {
    ++in_transit_;
    events_.push(t, p);
  }

  void gen_dc(TimeNs now, std::uint32_t stream) {
    const StreamSpec& s = cfg_.streams[stream];
    if (s.mode == DcMode::Backlog) {
      // Fill the MS queue; each transmission then triggers one replacement.
      const auto fill = std::max<std::int64_t>(1, cfg_.queue_capacity(s.pcp) / s.packet_len_bytes);
      for (std::int64_t i = 0; i < fill; ++i) create_packet(now, stream);
      return;
    }
    for (int i = 0; i < s.burst_size; ++i) create_packet(now, stream);
    const TimeNs next = now + s.app_cycle;
    if (next < cfg_.duration) events_.push(next, {Ev::GenDc, 0, stream, 0});
  }

  void gen_be(TimeNs now, std::uint32_t stream, std::uint64_t n) {
    const StreamSpec& s = cfg_.streams[stream];
    create_packet(now, stream);
    // Frame n leaves at floor(n * bits / rate) so the rate does not drift.
    const auto bits_ns = static_cast<UInt128>(s.packet_len_bytes) * 8u * 1'000'000'000u;
    const TimeNs next{static_cast<std::int64_t>(bits_ns * (n + 1) / static_cast<UInt128>(s.rate_bps))};
    if (next < cfg_.duration) events_.push(next, {Ev::GenBe, 0, stream, n + 1});
  }

  void enqueue(TimeNs now, std::uint8_t port_idx, std::uint32_t id) {
    --in_transit_;
    Packet& p = res_.packets[id];
    Port& port = ports_[port_idx];
    if (port_idx == kDs) bridge_.release(p.len_bytes);
    if (port_idx == kSl) p.sl_enqueue = now;
    Fifo& f = fifo(port, p.pcp);
    if (f.bytes + p.len_bytes > f.capacity) {
      ++f.stats.dropped;
      ++res_.dropped;
      p.fate = port_idx == kMs ? PacketFate::DroppedMs : PacketFate::DroppedSl;
      return;
    }
    f.items.push_back(id);
    f.bytes += p.len_bytes;
    ++f.stats.enqueued;
    f.stats.max_occupancy_bytes = std::max(f.stats.max_occupancy_bytes, f.bytes);
    try_transmit(now, port_idx);
  }

  void try_transmit(TimeNs now, std::uint8_t port_idx) {
    Port& port = ports_[port_idx];
    if (port.busy_until > now) return;
    Fifo* best = nullptr;
    TimeNs best_at = TimeNs::max();
    for (auto& f : port.queues) {
      if (f.items.empty()) continue;
      const TimeNs tx = transmission_time(res_.packets[f.items.front()].len_bytes, port.link.bandwidth_bps);
      TimeNs at = now;
      if (port.gcl) {
        auto s = earliest_start(*port.gcl, f.pcp, now, tx);
        if (!s) continue;  // frame never fits a window of this pcp
        at = *s;
      }
      if (at < best_at) {
        best_at = at;
        best = &f;
      }
    }
    if (!best) return;
    if (best_at == now) {
      start_tx(now, port_idx, *best);
    } else if (best_at < port.wake_at) {
      port.wake_at = best_at;
      events_.push(best_at, {Ev::Wake, port_idx, 0, 0});
    }
  }

  void start_tx(TimeNs now, std::uint8_t port_idx, Fifo& f) {
    Port& port = ports_[port_idx];
    const std::uint32_t id = f.items.front();
    f.items.pop_front();
    Packet& p = res_.packets[id];
    f.bytes -= p.len_bytes;
    const TimeNs tx = transmission_time(p.len_bytes, port.link.bandwidth_bps);
    port.busy_until = now + tx;
    events_.push(port.busy_until, {Ev::TxDone, port_idx, 0, 0});
    const TimeNs arrival = now + tx + port.link.prop_delay;

    switch (port_idx) {
      case kMs: {
        p.ms_egress = now;
        if (ms_probe_) res_.probes[NodeId::MS][p.pcp].push_back({p.seq, now});
        schedule_packet(arrival, {Ev::ArriveNw, 0, id, 0});
        const int stream = stream_of_pcp_[static_cast<std::size_t>(p.pcp)];
        if (stream >= 0 && cfg_.streams[stream].kind == StreamKind::DC &&
            cfg_.streams[stream].mode == DcMode::Backlog && now < cfg_.duration)
          create_packet(now, static_cast<std::size_t>(stream));
        break;
      }
      case kDs:
        p.bridge_delay = now - p.nw_arrival;
        schedule_packet(arrival + proc_sl_, {Ev::Enqueue, kSl, id, 0});
        break;
      case kSl:
        p.sl_egress = now;
        p.fate = PacketFate::Delivered;
        ++res_.packets_out;
        if (sl_probe_) res_.probes[NodeId::SL][p.pcp].push_back({p.seq, now});
        break;
      default: break;
    }
  }

  void arrive_nw(TimeNs now, std::uint32_t id) {
    --in_transit_;
    Packet& p = res_.packets[id];
    p.nw_arrival = now;
    const TimeNs exit = bridge_.admit(p.pcp, now + proc_nw_, p.len_bytes);
    schedule_packet(exit + proc_ds_, {Ev::Enqueue, kDs, id, 0});
  }

  void finish() {
    res_.in_transit = in_transit_;
    for (auto* port : {&ports_[kMs], &ports_[kDs], &ports_[kSl]})
      for (auto& f : port->queues) {
        f.stats.still_queued = f.items.size();
        res_.still_queued += f.items.size();
        if (port->node != NodeId::DS) res_.queues.push_back(f.stats);
      }
  }

  const ExperimentConfig& cfg_;
  RunResult res_;
  EventQueue<Payload> events_;
  Bridge bridge_;
  std::array<Port, 3> ports_;
  std::array<int, 8> stream_of_pcp_{};
  std::vector<std::uint32_t> next_seq_;
  TimeNs proc_ms_, proc_nw_, proc_ds_, proc_sl_;
  bool ms_probe_ = false;
  bool sl_probe_ = false;
  std::uint64_t in_transit_ = 0;
};

}  // namespace

RunResult simulate(const ExperimentConfig& config) {
  auto violations = validate_config(config);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
    throw Error(ErrorCode::ConfigInvalid, msg);
  }
  return Engine(config).run();
}

TimeNs measure_departure_jitter(const RunResult& result, int pcp) {
  const LatencySeries series = result.latency(pcp);
  if (series.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least two SL departures");
  if (result.cycle <= TimeNs{0}) throw Error(ErrorCode::BadInput, "run has no gate cycle");
  const TimeNs cycle = result.cycle;
  const IciReport rep = detect_ici_jumps(series, cycle);

  std::set<std::int64_t> phases;
  for (const auto& p : result.packets) {
    if (p.pcp != pcp || p.fate != PacketFate::Delivered) continue;
    auto k = classify_jump(p.d_emp(), rep.baseline, cycle, cycle / 4);
    if (k && *k == 0) phases.insert(floor_mod(p.sl_egress, cycle).count());
  }
  if (phases.empty()) throw Error(ErrorCode::InsufficientData, "no on-time departures");
  // Spread on the circle: cycle minus the widest gap between phases.
  std::int64_t widest = *phases.begin() + cycle.count() - *phases.rbegin();
  for (auto it = std::next(phases.begin()); it != phases.end(); ++it) widest = std::max(widest, *it - *std::prev(it));
  return TimeNs{phases.size() == 1 ? 0 : cycle.count() - widest};
}

}  // namespace tsn5g
