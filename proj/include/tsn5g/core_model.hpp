#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsn5g/time.hpp"

namespace tsn5g {

/// Nodes of the downlink path: talker, master switch, the two 5G translators,
/// slave switch and listener.
enum class NodeId { MS, NW, DS, SL, TX, RX };

std::string_view to_string(NodeId id);
std::optional<NodeId> node_from_string(std::string_view s);

struct NodeSpec {
  NodeId id = NodeId::MS;
  TimeNs proc_delay{0};
};

struct LinkSpec {
  NodeId from = NodeId::MS;
  NodeId to = NodeId::NW;
  std::int64_t bandwidth_bps = 1'000'000'000;
  TimeNs prop_delay{0};
};

struct Topology {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  std::vector<NodeId> path{NodeId::MS, NodeId::NW, NodeId::DS, NodeId::SL};

  const NodeSpec* node(NodeId id) const;
  /// Wired links are symmetric, so a link stored as B->A also serves A->B.
  const LinkSpec* link(NodeId a, NodeId b) const;
  TimeNs proc_delay(NodeId id) const;
};

/// MS -- NW, DS -- SL, SL -- RX at 1 GbE with zero propagation delay;
/// switches take 1 us to move a frame to the egress queue, translators 0.
Topology default_topology();

enum class StreamKind { DC, BE };

/// How a delay-critical source feeds the MS queue.
enum class DcMode {
  Burst,    // N packets every application cycle
  Backlog,  // queue kept full at all times
};

struct StreamSpec {
  StreamKind kind = StreamKind::DC;
  int pcp = 2;
  std::int64_t packet_len_bytes = 200;
  // DC
  int burst_size = 1;
  TimeNs app_cycle{30'000'000};
  TimeNs delay_budget = TimeNs::max();
  TimeNs phase{0};
  DcMode mode = DcMode::Burst;
  // BE
  std::int64_t rate_bps = 0;
};

struct QueueSpec {
  int pcp = 0;
  std::int64_t capacity_bytes = 6800;
};

/// Serialization time of len_bytes on the link plus its propagation delay.
/// Transmission time is rounded up to the next nanosecond.
TimeNs sending_delay(std::int64_t len_bytes, const LinkSpec& link);
TimeNs transmission_time(std::int64_t len_bytes, std::int64_t bandwidth_bps);

enum class TopologyViolationKind {
  MissingNode,
  PathBroken,
  DuplicateLink,
  BadBandwidth,
  NegativeDelay,
  Asymmetric,
};

struct TopologyViolation {
  TopologyViolationKind kind;
  NodeId a;
  NodeId b;

  bool operator==(const TopologyViolation&) const = default;
  std::string describe() const;
};

/// Violations are sorted, so the result does not depend on the order in
/// which nodes and links were listed.
std::vector<TopologyViolation> validate_topology(const Topology& topo);

std::vector<std::string> validate_streams(const std::vector<StreamSpec>& streams);

}  // namespace tsn5g
