#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "tsn5g/bridge5g.hpp"
#include "tsn5g/core_model.hpp"
#include "tsn5g/tas_gate.hpp"
#include "tsn5g/time.hpp"
#include "tsn5g/trace_analysis.hpp"

namespace tsn5g {

/// Everything one simulation run needs.
struct ExperimentConfig {
  int version = 1;
  Topology topology = default_topology();
  std::vector<StreamSpec> streams;
  /// Per-pcp capacity of the MS and SL egress queues; pcps not listed get
  /// default_queue_bytes.
  std::vector<QueueSpec> queues;
  std::int64_t default_queue_bytes = 6800;
  /// Absent GCL = ungated port (strict priority, highest pcp first).
  std::optional<GclSpec> gcl_ms;
  std::optional<GclSpec> gcl_sl;
  BridgeDelayModel bridge;
  TimeNs duration{1'000'000'000};
  /// Extra time after the sources stop, to let packets in flight drain.
  TimeNs drain{1'000'000'000};
  std::uint64_t seed = 1;
  std::vector<NodeId> probe_points{NodeId::MS, NodeId::SL};
  std::string output_dir;

  std::int64_t queue_capacity(int pcp) const;
};

std::vector<std::string> validate_config(const ExperimentConfig& cfg);

enum class PacketFate { InFlight, Delivered, DroppedMs, DroppedSl };

struct Packet {
  std::uint32_t seq = 0;
  int pcp = 0;
  std::int64_t len_bytes = 0;
  TimeNs created_at{-1};
  TimeNs ms_egress{-1};
  TimeNs nw_arrival{-1};
  TimeNs sl_enqueue{-1};
  TimeNs sl_egress{-1};
  /// NW arrival to DS transmission start: translator processing, the 5G
  /// draw (after ordering clamp) and DS egress queueing.
  TimeNs bridge_delay{-1};
  PacketFate fate = PacketFate::InFlight;

  TimeNs d_emp() const { return sl_egress - ms_egress; }
  TimeNs sl_wait() const { return sl_egress - sl_enqueue; }
};

/// Min-heap of events ordered by (time, insertion ordinal).
template <typename Payload>
class EventQueue {
public:
  struct Event {
    TimeNs time;
    std::uint64_t ordinal;
    Payload payload;
  };

  void push(TimeNs t, Payload p) { heap_.push(Event{t, next_++, p}); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }
  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    return e;
  }

private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.ordinal > b.ordinal;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_ = 0;
};

struct QueueStats {
  NodeId node = NodeId::MS;
  int pcp = 0;
  std::int64_t capacity_bytes = 0;
  std::uint64_t enqueued = 0;
  std::uint64_t dropped = 0;
  std::int64_t max_occupancy_bytes = 0;
  std::uint64_t still_queued = 0;
};

struct RunResult {
  std::uint64_t seed = 0;
  TimeNs cycle{0};
  std::map<int, TimeNs> k_by_pcp;
  std::map<NodeId, std::map<int, std::vector<ProbeRecord>>> probes;
  std::vector<QueueStats> queues;
  std::vector<Packet> packets;
  std::uint64_t packets_in = 0;
  std::uint64_t packets_out = 0;
  std::uint64_t still_queued = 0;
  std::uint64_t in_transit = 0;
  std::uint64_t dropped = 0;
  std::uint64_t events = 0;

  bool conserved() const { return packets_in == packets_out + still_queued + in_transit + dropped; }
  const QueueStats* queue(NodeId node, int pcp) const;
  /// (seq, D_emp) of delivered packets of one pcp, in seq order.
  LatencySeries latency(int pcp) const;
};

/// K = d_send(MS->NW) + d_send(DS->SL) + d_proc(SL) for a frame of len_bytes.
TimeNs compute_K(const Topology& topo, std::int64_t len_bytes);

/// Runs one experiment. Throws ConfigInvalid listing every violation.
RunResult simulate(const ExperimentConfig& config);

/// Circular spread of SL departure phases (egress mod T_C) over the packets
/// of pcp that are in the lowest latency cluster. 0 = perfect re-timing.
TimeNs measure_departure_jitter(const RunResult& result, int pcp);

}  // namespace tsn5g
