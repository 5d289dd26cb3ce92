#include "tsn5g/core_model.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "tsn5g/error.hpp"

namespace tsn5g {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoWindowForPcp: return "NoWindowForPcp";
    case ErrorCode::NoModelForPcp: return "NoModelForPcp";
    case ErrorCode::MissingLink: return "MissingLink";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::RateExceedsLink: return "RateExceedsLink";
    case ErrorCode::BadPercentile: return "BadPercentile";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {
constexpr std::array<std::pair<NodeId, std::string_view>, 6> kNodeNames{{
    {NodeId::MS, "MS"},
    {NodeId::NW, "NW"},
    {NodeId::DS, "DS"},
    {NodeId::SL, "SL"},
    {NodeId::TX, "TX"},
    {NodeId::RX, "RX"},
}};
}  // namespace

std::string_view to_string(NodeId id) {
  for (const auto& [n, s] : kNodeNames)
    if (n == id) return s;
  return "?";
}

std::optional<NodeId> node_from_string(std::string_view s) {
  for (const auto& [n, name] : kNodeNames)
    if (name == s) return n;
  return std::nullopt;
}

const NodeSpec* Topology::node(NodeId id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

const LinkSpec* Topology::link(NodeId a, NodeId b) const {
  for (const auto& l : links)
    if (l.from == a && l.to == b) return &l;
  for (const auto& l : links)
    if (l.from == b && l.to == a) return &l;
  return nullptr;
}

TimeNs Topology::proc_delay(NodeId id) const {
  const NodeSpec* n = node(id);
  return n ? n->proc_delay : TimeNs{0};
}

Topology default_topology() {
  Topology t;
  t.nodes = {
      {NodeId::MS, TimeNs{1000}}, {NodeId::NW, TimeNs{0}}, {NodeId::DS, TimeNs{0}},
      {NodeId::SL, TimeNs{1000}}, {NodeId::RX, TimeNs{0}},
  };
  t.links = {
      {NodeId::MS, NodeId::NW, 1'000'000'000, TimeNs{0}},
      {NodeId::DS, NodeId::SL, 1'000'000'000, TimeNs{0}},
      {NodeId::SL, NodeId::RX, 1'000'000'000, TimeNs{0}},
  };
  return t;
}

TimeNs transmission_time(std::int64_t len_bytes, std::int64_t bandwidth_bps) {
  const auto bits_ns = static_cast<UInt128>(len_bytes) * 8u * 1'000'000'000u;
  const auto bw = static_cast<UInt128>(bandwidth_bps);
  return TimeNs{static_cast<std::int64_t>((bits_ns + bw - 1) / bw)};
}

TimeNs sending_delay(std::int64_t len_bytes, const LinkSpec& link) {
  return link.prop_delay + transmission_time(len_bytes, link.bandwidth_bps);
}

std::string TopologyViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case TopologyViolationKind::MissingNode: os << "MissingNode(" << to_string(a) << ")"; break;
    case TopologyViolationKind::PathBroken: os << "PathBroken(" << to_string(a) << "," << to_string(b) << ")"; break;
    case TopologyViolationKind::DuplicateLink: os << "DuplicateLink(" << to_string(a) << "," << to_string(b) << ")"; break;
    case TopologyViolationKind::BadBandwidth: os << "BadBandwidth(" << to_string(a) << "," << to_string(b) << ")"; break;
    case TopologyViolationKind::NegativeDelay: os << "NegativeDelay(" << to_string(a) << "," << to_string(b) << ")"; break;
    case TopologyViolationKind::Asymmetric: os << "Asymmetric(" << to_string(a) << "," << to_string(b) << ")"; break;
  }
  return os.str();
}

std::vector<TopologyViolation> validate_topology(const Topology& topo) {
  using K = TopologyViolationKind;
  std::set<std::tuple<int, int, int>> found;
  auto add = [&](K k, NodeId a, NodeId b) {
    found.emplace(static_cast<int>(k), static_cast<int>(a), static_cast<int>(b));
  };

  for (NodeId id : topo.path)
    if (!topo.node(id)) add(K::MissingNode, id, id);
  for (const auto& n : topo.nodes)
    if (n.proc_delay < TimeNs{0}) add(K::NegativeDelay, n.id, n.id);

  std::map<std::pair<NodeId, NodeId>, std::vector<const LinkSpec*>> directed;
  for (const auto& l : topo.links) {
    directed[{l.from, l.to}].push_back(&l);
    if (l.bandwidth_bps <= 0) add(K::BadBandwidth, l.from, l.to);
    if (l.prop_delay < TimeNs{0}) add(K::NegativeDelay, l.from, l.to);
  }
  for (const auto& [key, ls] : directed) {
    if (ls.size() > 1) add(K::DuplicateLink, key.first, key.second);
    auto rev = directed.find({key.second, key.first});
    if (rev != directed.end() && key.first < key.second) {
      const LinkSpec& x = *ls.front();
      const LinkSpec& y = *rev->second.front();
      if (x.bandwidth_bps != y.bandwidth_bps || x.prop_delay != y.prop_delay)
        add(K::Asymmetric, key.first, key.second);
    }
  }

  for (std::size_t i = 0; i + 1 < topo.path.size(); ++i) {
    const NodeId a = topo.path[i];
    const NodeId b = topo.path[i + 1];
    // The NW -> DS hop is the 5G bridge, not a wired link.
    if (a == NodeId::NW && b == NodeId::DS) continue;
    if (!topo.link(a, b)) add(K::PathBroken, a, b);
  }

  std::vector<TopologyViolation> out;
  for (const auto& [k, a, b] : found)
    out.push_back({static_cast<K>(k), static_cast<NodeId>(a), static_cast<NodeId>(b)});
  return out;
}

std::vector<std::string> validate_streams(const std::vector<StreamSpec>& streams) {
  std::vector<std::string> out;
  std::set<int> pcps;
  for (const auto& s : streams) {
    const std::string tag = std::string(s.kind == StreamKind::DC ? "DC" : "BE") + "(pcp " + std::to_string(s.pcp) + ")";
    if (s.pcp < 0 || s.pcp > 7) out.push_back(tag + ": pcp out of range 0..7");
    if (!pcps.insert(s.pcp).second) out.push_back(tag + ": duplicate pcp");
    if (s.packet_len_bytes <= 0) out.push_back(tag + ": packet length must be positive");
    if (s.kind == StreamKind::DC) {
      if (s.burst_size < 1) out.push_back(tag + ": burst size must be >= 1");
      if (s.app_cycle <= TimeNs{0}) out.push_back(tag + ": application cycle must be positive");
      if (s.phase < TimeNs{0}) out.push_back(tag + ": negative phase");
    } else if (s.rate_bps <= 0) {
      out.push_back(tag + ": rate must be positive");
    }
  }
  return out;
}

}  // namespace tsn5g
