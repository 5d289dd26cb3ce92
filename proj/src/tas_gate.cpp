#include "tsn5g/tas_gate.hpp"

#include <algorithm>
#include <sstream>

#include "tsn5g/core_model.hpp"
#include "tsn5g/error.hpp"

namespace tsn5g {

bool GateControlList::has_pcp(int pcp) const {
  return std::any_of(spec_.windows.begin(), spec_.windows.end(), [&](const GateWindow& w) { return w.pcp == pcp; });
}

TimeNs GateControlList::phase(TimeNs t) const {
  const std::int64_t u = (t - spec_.base_offset).count();
  return TimeNs{floor_mod(u - 1, spec_.cycle.count()) + 1};
}

bool GclBuildResult::has(GclViolationKind k) const {
  return std::any_of(violations.begin(), violations.end(), [&](const GclViolation& v) { return v.kind == k; });
}

namespace {
std::string_view kind_name(GclViolationKind k) {
  switch (k) {
    case GclViolationKind::QuantizationError: return "QuantizationError";
    case GclViolationKind::OverlapError: return "OverlapError";
    case GclViolationKind::CycleOverflow: return "CycleOverflow";
    case GclViolationKind::WindowBoundViolation: return "WindowBoundViolation";
    case GclViolationKind::BadWindow: return "BadWindow";
  }
  return "?";
}
}  // namespace

std::string GclBuildResult::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << kind_name(violations[i].kind) << ": " << violations[i].detail;
  }
  return os.str();
}

GclBuildResult build_gcl(const GclSpec& spec, const std::optional<BurstRequirement>& burst) {
  GclBuildResult r;
  auto fail = [&](GclViolationKind k, std::string detail) { r.violations.push_back({k, std::move(detail)}); };
  const Macrotick mt = spec.macrotick;

  if (mt.m <= TimeNs{0}) {
    fail(GclViolationKind::BadWindow, "macrotick must be positive");
    return r;
  }
  if (spec.cycle <= TimeNs{0}) {
    fail(GclViolationKind::BadWindow, "cycle must be positive");
    return r;
  }
  if (!mt.divides(spec.cycle)) fail(GclViolationKind::QuantizationError, "cycle " + std::to_string(spec.cycle.count()));
  if (spec.base_offset < TimeNs{0}) fail(GclViolationKind::BadWindow, "negative base offset");
  if (!mt.divides(spec.base_offset))
    fail(GclViolationKind::QuantizationError, "base offset " + std::to_string(spec.base_offset.count()));
  if (spec.guard < TimeNs{0}) fail(GclViolationKind::BadWindow, "negative guard band");
  if (!mt.divides(spec.guard)) fail(GclViolationKind::QuantizationError, "guard " + std::to_string(spec.guard.count()));

  TimeNs total = spec.guard;
  for (const auto& w : spec.windows) {
    const std::string tag = "pcp " + std::to_string(w.pcp) + " (" + std::to_string(w.open_at.count()) + ", " +
                            std::to_string(w.close_at.count()) + "]";
    if (w.open_at < TimeNs{0} || w.open_at >= w.close_at || w.close_at > spec.cycle) {
      fail(GclViolationKind::BadWindow, tag + " outside 0 <= t1 < t2 <= cycle");
      continue;
    }
    if (!mt.divides(w.open_at) || !mt.divides(w.close_at)) fail(GclViolationKind::QuantizationError, tag);
    if (w.close_at > spec.cycle - spec.guard) fail(GclViolationKind::CycleOverflow, tag + " reaches into the guard band");
    total += w.width();
  }
  if (total > spec.cycle)
    fail(GclViolationKind::CycleOverflow,
         "windows + guard = " + std::to_string(total.count()) + " > cycle " + std::to_string(spec.cycle.count()));

  std::vector<GateWindow> sorted = spec.windows;
  std::sort(sorted.begin(), sorted.end(), [](const GateWindow& a, const GateWindow& b) { return a.open_at < b.open_at; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i].open_at < sorted[i - 1].close_at)
      fail(GclViolationKind::OverlapError,
           "pcp " + std::to_string(sorted[i - 1].pcp) + " and pcp " + std::to_string(sorted[i].pcp));

  if (burst) {
    const TimeNs lower = transmission_time(static_cast<std::int64_t>(burst->burst_size) * burst->packet_len_bytes,
                                           burst->bandwidth_bps);
    bool any = false;
    for (const auto& w : spec.windows) {
      if (w.pcp != burst->pcp) continue;
      any = true;
      if (w.width() < lower)
        fail(GclViolationKind::WindowBoundViolation,
             "window " + std::to_string(w.width().count()) + " < burst time " + std::to_string(lower.count()));
      if (w.width() >= spec.cycle) fail(GclViolationKind::WindowBoundViolation, "window must be shorter than the cycle");
    }
    if (!any) fail(GclViolationKind::WindowBoundViolation, "no window for pcp " + std::to_string(burst->pcp));
  }

  if (r.violations.empty()) r.gcl = GateControlList(spec);
  return r;
}

GateControlList build_gcl_or_throw(const GclSpec& spec, const std::optional<BurstRequirement>& burst) {
  auto r = build_gcl(spec, burst);
  if (!r.ok()) throw Error(ErrorCode::ConfigInvalid, r.describe());
  return *r.gcl;
}

bool gate_state(const GateControlList& gcl, int pcp, TimeNs t) {
  const TimeNs ph = gcl.phase(t);
  for (const auto& w : gcl.windows())
    if (w.pcp == pcp && w.open_at < ph && ph <= w.close_at) return true;
  return false;
}

TimeNs next_open(const GateControlList& gcl, int pcp, TimeNs t) {
  if (!gcl.has_pcp(pcp)) throw Error(ErrorCode::NoWindowForPcp, "pcp " + std::to_string(pcp));
  if (gate_state(gcl, pcp, t)) return t;
  const TimeNs cycle_start = t - gcl.phase(t);
  TimeNs best = TimeNs::max();
  for (std::int64_t n = 0; n <= 1; ++n)
    for (const auto& w : gcl.windows()) {
      if (w.pcp != pcp) continue;
      const TimeNs open = cycle_start + gcl.cycle() * n + w.open_at;
      if (open >= t) best = std::min(best, open);
    }
  return best;
}

bool can_start_frame(const GateControlList& gcl, int pcp, TimeNs t, TimeNs tx_duration) {
  const TimeNs ph = gcl.phase(t);
  const TimeNs cycle_start = t - ph;
  for (const auto& w : gcl.windows())
    if (w.pcp == pcp && w.open_at < ph && ph <= w.close_at) return t + tx_duration <= cycle_start + w.close_at;
  return false;
}

std::optional<TimeNs> earliest_start(const GateControlList& gcl, int pcp, TimeNs t, TimeNs tx_duration) {
  const TimeNs m = gcl.macrotick().m;
  const TimeNs cycle_start = t - gcl.phase(t);
  std::optional<TimeNs> best;
  for (std::int64_t n = 0; n <= 1; ++n)
    for (const auto& w : gcl.windows()) {
      if (w.pcp != pcp || w.width() < m + tx_duration) continue;
      const TimeNs base = cycle_start + gcl.cycle() * n;
      const TimeNs s = std::max(t, base + w.open_at + m);
      if (s + tx_duration <= base + w.close_at && (!best || s < *best)) best = s;
    }
  return best;
}

GclSpec two_window_layout(TimeNs cycle, TimeNs offset, int dc_pcp, TimeNs dc_window, int be_pcp, TimeNs guard,
                          Macrotick mt) {
  GclSpec s;
  s.cycle = cycle;
  s.base_offset = offset;
  s.guard = guard;
  s.macrotick = mt;
  s.windows.push_back({dc_pcp, TimeNs{0}, dc_window});
  if (dc_window < cycle - guard) s.windows.push_back({be_pcp, dc_window, cycle - guard});
  return s;
}

}  // namespace tsn5g
