#include <doctest.h>

#include <algorithm>
#include <random>

#include "tsn5g/core_model.hpp"
#include "tsn5g/error.hpp"

using namespace tsn5g;
using namespace tsn5g::literals;

namespace {
LinkSpec gig(NodeId a, NodeId b, TimeNs prop = 0_ns) { return {a, b, 1'000'000'000, prop}; }
}  // namespace

TEST_CASE("time helpers") {
  CHECK(floor_div(-1, 16) == -1);
  CHECK(floor_mod(-1, 16) == 15);
  CHECK(floor_mod(TimeNs{35'000'000}, 30_ms) == 5_ms);
  CHECK(quantize_up(TimeNs{46'500}, Macrotick{}) == TimeNs{46'512});
  CHECK(quantize_up(TimeNs{46'512}, Macrotick{}) == TimeNs{46'512});
  CHECK(quantize_up(TimeNs{-17}, Macrotick{}) == TimeNs{-16});
  CHECK(Macrotick{}.divides(30_ms));
  CHECK_FALSE(Macrotick{}.divides(TimeNs{24}));
}

TEST_CASE("sending delay") {
  CHECK(sending_delay(200, gig(NodeId::MS, NodeId::NW)) == 1600_ns);
  CHECK(sending_delay(1500, gig(NodeId::MS, NodeId::NW)) == 12'000_ns);
  CHECK(sending_delay(200, gig(NodeId::MS, NodeId::NW, 500_ns)) == 2100_ns);
  // Serialization rounds up to whole nanoseconds.
  CHECK(transmission_time(1, 3'000'000'000) == 3_ns);
  CHECK(transmission_time(200, 1'000'000'000'000) == 2_ns);
}

TEST_CASE("sending delay is monotone in length and bandwidth") {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<std::int64_t> len(1, 9000), bw(1'000, 100'000'000'000);
  for (int i = 0; i < 1000; ++i) {
    const auto l = len(gen), b = bw(gen);
    CHECK(transmission_time(l + 1, b) >= transmission_time(l, b));
    CHECK(transmission_time(l, b + 1) <= transmission_time(l, b));
  }
}

TEST_CASE("links are symmetric") {
  const Topology t = default_topology();
  REQUIRE(t.link(NodeId::MS, NodeId::NW) != nullptr);
  CHECK(t.link(NodeId::NW, NodeId::MS) == t.link(NodeId::MS, NodeId::NW));
  CHECK(sending_delay(200, *t.link(NodeId::SL, NodeId::DS)) == sending_delay(200, *t.link(NodeId::DS, NodeId::SL)));
  CHECK(t.link(NodeId::NW, NodeId::DS) == nullptr);
}

TEST_CASE("validate_topology") {
  SUBCASE("default layout is valid") { CHECK(validate_topology(default_topology()).empty()); }
  SUBCASE("missing MS-NW link") {
    Topology t = default_topology();
    std::erase_if(t.links, [](const LinkSpec& l) { return l.from == NodeId::MS && l.to == NodeId::NW; });
    const auto v = validate_topology(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == TopologyViolation{TopologyViolationKind::PathBroken, NodeId::MS, NodeId::NW});
  }
  SUBCASE("zero bandwidth on DS-SL") {
    Topology t = default_topology();
    for (auto& l : t.links)
      if (l.from == NodeId::DS && l.to == NodeId::SL) l.bandwidth_bps = 0;
    const auto v = validate_topology(t);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == TopologyViolation{TopologyViolationKind::BadBandwidth, NodeId::DS, NodeId::SL});
    CHECK(v[0].describe().find("DS") != std::string::npos);
  }
  SUBCASE("missing node, negative delays, duplicate link") {
    Topology t = default_topology();
    std::erase_if(t.nodes, [](const NodeSpec& n) { return n.id == NodeId::DS; });
    t.links.push_back(gig(NodeId::MS, NodeId::NW));
    t.links[0].prop_delay = TimeNs{-1};
    const auto v = validate_topology(t);
    auto has = [&](TopologyViolationKind k) {
      return std::any_of(v.begin(), v.end(), [&](const TopologyViolation& x) { return x.kind == k; });
    };
    CHECK(has(TopologyViolationKind::MissingNode));
    CHECK(has(TopologyViolationKind::DuplicateLink));
    CHECK(has(TopologyViolationKind::NegativeDelay));
  }
}

TEST_CASE("validate_topology is idempotent and order independent") {
  Topology t = default_topology();
  t.links.push_back({NodeId::MS, NodeId::NW, 0, TimeNs{-5}});
  std::erase_if(t.nodes, [](const NodeSpec& n) { return n.id == NodeId::SL; });
  const auto base = validate_topology(t);
  CHECK(validate_topology(t) == base);
  std::mt19937 gen(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(t.nodes.begin(), t.nodes.end(), gen);
    std::shuffle(t.links.begin(), t.links.end(), gen);
    CHECK(validate_topology(t) == base);
  }
}

TEST_CASE("validate_streams") {
  StreamSpec dc;
  StreamSpec be;
  be.kind = StreamKind::BE;
  be.pcp = 0;
  be.packet_len_bytes = 1500;
  be.rate_bps = 30'000'000;
  CHECK(validate_streams({dc, be}).empty());

  StreamSpec bad_dc = dc;
  bad_dc.burst_size = 0;
  CHECK_FALSE(validate_streams({bad_dc}).empty());
  StreamSpec bad_be = be;
  bad_be.rate_bps = 0;
  CHECK_FALSE(validate_streams({bad_be}).empty());
  StreamSpec clash = be;
  clash.pcp = dc.pcp;
  CHECK_FALSE(validate_streams({dc, clash}).empty());
  StreamSpec bad_pcp = dc;
  bad_pcp.pcp = 8;
  CHECK_FALSE(validate_streams({bad_pcp}).empty());
}

TEST_CASE("node names round-trip") {
  for (NodeId n : {NodeId::MS, NodeId::NW, NodeId::DS, NodeId::SL, NodeId::TX, NodeId::RX})
    CHECK(node_from_string(to_string(n)) == n);
  CHECK_FALSE(node_from_string("XX").has_value());
}

TEST_CASE("errors carry their code") {
  const Error e(ErrorCode::MissingLink, "MS-NW");
  CHECK(e.code() == ErrorCode::MissingLink);
  CHECK(std::string(e.what()).find("MS-NW") != std::string::npos);
}
