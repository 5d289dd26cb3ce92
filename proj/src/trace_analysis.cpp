#include "tsn5g/trace_analysis.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "tsn5g/error.hpp"
#include "tsn5g/planner.hpp"

namespace tsn5g {

std::vector<TimeNs> LatencySeries::latencies() const {
  std::vector<TimeNs> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.latency);
  return out;
}

JoinResult join_probes(const std::vector<ProbeRecord>& ms, const std::vector<ProbeRecord>& sl) {
  std::unordered_map<std::uint32_t, TimeNs> sl_by_seq;
  sl_by_seq.reserve(sl.size());
  for (const auto& r : sl) sl_by_seq.try_emplace(r.seq, r.egress);

  std::vector<ProbeRecord> ms_sorted = ms;
  std::stable_sort(ms_sorted.begin(), ms_sorted.end(),
                   [](const ProbeRecord& a, const ProbeRecord& b) { return a.seq < b.seq; });
  JoinResult out;
  out.series.samples.reserve(ms_sorted.size());
  for (std::size_t i = 0; i < ms_sorted.size(); ++i) {
    const auto& r = ms_sorted[i];
    if (i > 0 && ms_sorted[i - 1].seq == r.seq) continue;
    auto it = sl_by_seq.find(r.seq);
    if (it == sl_by_seq.end()) {
      out.losses.push_back(r.seq);
    } else if (it->second < r.egress) {
      out.negative.push_back(r.seq);
    } else {
      out.series.samples.push_back({r.seq, it->second - r.egress});
    }
  }
  return out;
}

std::vector<DistPoint> distribution(const LatencySeries& series, DistributionMode mode, TimeNs step, TimeNs from,
                                    TimeNs to) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "distribution of an empty series");
  if (step <= TimeNs{0}) throw Error(ErrorCode::BadInput, "grid step must be positive");
  std::vector<TimeNs> sorted = series.latencies();
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  std::vector<DistPoint> out;
  auto it = sorted.begin();
  for (TimeNs x = from; x <= to; x += step) {
    it = std::upper_bound(it, sorted.end(), x);
    const double cdf = static_cast<double>(it - sorted.begin()) / n;
    out.push_back({x, mode == DistributionMode::CDF ? cdf : 1.0 - cdf});
  }
  return out;
}

std::vector<DistPoint> distribution(const LatencySeries& series, DistributionMode mode, TimeNs step) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "distribution of an empty series");
  if (step <= TimeNs{0}) throw Error(ErrorCode::BadInput, "grid step must be positive");
  const auto [lo, hi] = std::minmax_element(series.samples.begin(), series.samples.end(),
                                            [](const auto& a, const auto& b) { return a.latency < b.latency; });
  const std::int64_t s = step.count();
  const TimeNs from{std::max<std::int64_t>(0, (floor_div(lo->latency.count(), s) - 1) * s)};
  const TimeNs to{-floor_div(-hi->latency.count(), s) * s};
  return distribution(series, mode, step, from, to);
}

double IciReport::fraction(int k) const {
  for (const auto& c : clusters)
    if (c.k == k) return c.fraction;
  return 0.0;
}

double IciReport::jumped() const {
  double f = 0.0;
  for (const auto& c : clusters)
    if (c.k >= 1) f += c.fraction;
  return f;
}

std::optional<int> classify_jump(TimeNs latency, TimeNs baseline, TimeNs cycle, TimeNs tolerance) {
  const std::int64_t T = cycle.count();
  const std::int64_t d = (latency - baseline).count();
  const auto k = floor_div(d + T / 2, T);
  const std::int64_t residual = d - k * T;
  if ((residual < 0 ? -residual : residual) >= tolerance.count()) return std::nullopt;
  return static_cast<int>(k);
}

IciReport classify_series(const LatencySeries& series, TimeNs baseline, TimeNs cycle, std::optional<TimeNs> tolerance) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "cluster detection on an empty series");
  if (cycle <= TimeNs{0}) throw Error(ErrorCode::BadInput, "cycle must be positive");
  const TimeNs tol = tolerance.value_or(cycle / 4);
  IciReport rep;
  rep.baseline = baseline;
  std::map<int, std::size_t> counts;
  std::size_t unclassified = 0;
  for (const auto& s : series.samples) {
    if (auto k = classify_jump(s.latency, baseline, cycle, tol)) {
      ++counts[*k];
      const TimeNs r = s.latency - baseline - cycle * *k;
      rep.max_residual = std::max(rep.max_residual, r < TimeNs{0} ? -r : r);
    } else {
      ++unclassified;
    }
  }
  const auto n = static_cast<double>(series.size());
  for (const auto& [k, c] : counts) rep.clusters.push_back({k, static_cast<double>(c) / n});
  rep.unclassified = static_cast<double>(unclassified) / n;
  return rep;
}

IciReport detect_ici_jumps(const LatencySeries& series, TimeNs cycle, std::optional<TimeNs> tolerance) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "cluster detection on an empty series");
  if (cycle <= TimeNs{0}) throw Error(ErrorCode::BadInput, "cycle must be positive");
  TimeNs lowest = TimeNs::max();
  for (const auto& s : series.samples) lowest = std::min(lowest, s.latency);
  std::vector<TimeNs> first;
  for (const auto& s : series.samples)
    if (s.latency - lowest < cycle / 2) first.push_back(s.latency);
  const auto mid = static_cast<std::ptrdiff_t>((first.size() - 1) / 2);
  std::nth_element(first.begin(), first.begin() + mid, first.end());
  return classify_series(series, first[static_cast<std::size_t>(mid)], cycle, tolerance);
}

LatencySummary summarize(const LatencySeries& series) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "summary of an empty series");
  std::vector<TimeNs> sorted = series.latencies();
  std::sort(sorted.begin(), sorted.end());
  LatencySummary s;
  s.count = sorted.size();
  long double sum = 0;
  for (TimeNs d : sorted) sum += d.count();
  s.mean_ns = static_cast<double>(sum / static_cast<long double>(sorted.size()));
  s.min = sorted.front();
  s.max = sorted.back();
  s.p50 = percentile_sorted(sorted, 0.5);
  s.p99 = percentile_sorted(sorted, 0.99);
  s.p999 = percentile_sorted(sorted, 0.999);
  return s;
}

}  // namespace tsn5g
