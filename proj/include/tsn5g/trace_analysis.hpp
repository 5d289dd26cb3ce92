#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsn5g/time.hpp"

namespace tsn5g {

/// One line of a probe dump: sequence number and egress timestamp.
struct ProbeRecord {
  std::uint32_t seq = 0;
  TimeNs egress{0};

  bool operator==(const ProbeRecord&) const = default;
};

struct LatencySample {
  std::uint32_t seq = 0;
  TimeNs latency{0};

  bool operator==(const LatencySample&) const = default;
};

struct SeriesMeta {
  std::optional<TimeNs> cycle;
  std::optional<TimeNs> offset;
  std::optional<TimeNs> window;
  std::string run_id;
};

/// Per-packet latencies sorted by seq, unique seqs, all latencies >= 0.
struct LatencySeries {
  std::vector<LatencySample> samples;
  SeriesMeta meta;

  std::vector<TimeNs> latencies() const;
  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

struct JoinResult {
  LatencySeries series;
  /// Seqs seen at MS but not at SL.
  std::vector<std::uint32_t> losses;
  /// Seqs whose SL timestamp precedes the MS one; excluded from the series.
  std::vector<std::uint32_t> negative;
};

/// Inner join on seq; latency = sl.egress - ms.egress. If a seq appears more
/// than once in a file, the first record wins.
JoinResult join_probes(const std::vector<ProbeRecord>& ms, const std::vector<ProbeRecord>& sl);

enum class DistributionMode { CDF, CCDF };

struct DistPoint {
  TimeNs x{0};
  double y = 0.0;
};

/// Empirical CDF (P[D <= x]) or CCDF (P[D > x]) on a grid of `step`,
/// from one step below the minimum to the first grid point >= the maximum.
std::vector<DistPoint> distribution(const LatencySeries& series, DistributionMode mode, TimeNs step);
/// Same, on an explicit grid [from, to].
std::vector<DistPoint> distribution(const LatencySeries& series, DistributionMode mode, TimeNs step, TimeNs from,
                                    TimeNs to);

struct ClusterFraction {
  int k = 0;
  double fraction = 0.0;
};

struct IciReport {
  TimeNs baseline{0};
  std::vector<ClusterFraction> clusters;  // ascending k
  double unclassified = 0.0;
  TimeNs max_residual{0};

  double fraction(int k) const;
  /// Fraction of packets deferred by at least one cycle.
  double jumped() const;
};

/// Groups latencies into clusters spaced one cycle apart. k = 0 is anchored
/// at the minimum-latency cluster and its median is the baseline; packets
/// further than `tolerance` (default T_C/4) from baseline + k*T_C are
/// unclassified.
IciReport detect_ici_jumps(const LatencySeries& series, TimeNs cycle, std::optional<TimeNs> tolerance = std::nullopt);

/// Same clustering around a baseline known in advance, e.g. the on-time
/// latency implied by the SL offset.
IciReport classify_series(const LatencySeries& series, TimeNs baseline, TimeNs cycle,
                          std::optional<TimeNs> tolerance = std::nullopt);

/// Per-packet k (or nullopt when unclassified) against a known baseline.
std::optional<int> classify_jump(TimeNs latency, TimeNs baseline, TimeNs cycle, TimeNs tolerance);

struct LatencySummary {
  double mean_ns = 0.0;
  TimeNs min{0};
  TimeNs max{0};
  TimeNs p50{0};
  TimeNs p99{0};
  TimeNs p999{0};
  std::size_t count = 0;
};

LatencySummary summarize(const LatencySeries& series);

}  // namespace tsn5g
