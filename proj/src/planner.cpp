#include "tsn5g/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsn5g/core_model.hpp"
#include "tsn5g/error.hpp"

namespace tsn5g {

std::string_view to_string(IciRisk r) {
  switch (r) {
    case IciRisk::None: return "None";
    case IciRisk::Possible: return "Possible";
    case IciRisk::Certain: return "Certain";
  }
  return "?";
}

TimeNs network_cycle(const std::vector<TimeNs>& app_cycles) {
  if (app_cycles.empty()) throw Error(ErrorCode::EmptyInput, "no application cycles");
  std::int64_t g = 0;
  for (TimeNs c : app_cycles) {
    if (c <= TimeNs{0}) throw Error(ErrorCode::BadInput, "application cycles must be positive");
    g = std::gcd(g, c.count());
  }
  return TimeNs{g};
}

TimeNs window_for_rate(std::int64_t rate_bps, TimeNs cycle, std::int64_t link_bps, Macrotick mt) {
  if (rate_bps < 0 || link_bps <= 0 || cycle <= TimeNs{0}) throw Error(ErrorCode::BadInput, "window_for_rate arguments");
  if (rate_bps > link_bps) throw Error(ErrorCode::RateExceedsLink, std::to_string(rate_bps) + " > " + std::to_string(link_bps));
  const auto num = static_cast<UInt128>(rate_bps) * static_cast<UInt128>(cycle.count());
  const auto den = static_cast<UInt128>(link_bps);
  return quantize_up(TimeNs{static_cast<std::int64_t>((num + den - 1) / den)}, mt);
}

WindowBounds window_bounds(int burst_size, std::int64_t len_bytes, std::int64_t link_bps, TimeNs cycle) {
  return {transmission_time(static_cast<std::int64_t>(burst_size) * len_bytes, link_bps), cycle};
}

TimeNs percentile_sorted(const std::vector<TimeNs>& sorted, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::BadPercentile, "p must be in (0, 1], got " + std::to_string(p));
  if (sorted.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  const auto n = static_cast<double>(sorted.size());
  const double r = p * n;
  // p*n that is an integer up to rounding noise (0.999 * 1000) must not
  // step to the next order statistic.
  const double nearest = std::round(r);
  const double idx = std::abs(r - nearest) < 1e-9 * std::max(1.0, n) ? nearest : std::ceil(r);
  const auto i = std::clamp<std::size_t>(static_cast<std::size_t>(idx), 1, sorted.size());
  return sorted[i - 1];
}

TimeNs percentile_bound(std::vector<TimeNs> samples, double p) {
  std::sort(samples.begin(), samples.end());
  return percentile_sorted(samples, p);
}

Offset compute_offset(TimeNs K, TimeNs d_hat, TimeNs cycle) {
  if (K < TimeNs{0} || d_hat < TimeNs{0} || cycle <= TimeNs{0}) throw Error(ErrorCode::BadInput, "compute_offset arguments");
  const TimeNs delta = K + d_hat;
  return {delta, floor_mod(delta, cycle)};
}

IciRisk predict_ici(TimeNs cycle, TimeNs uncertainty_width) {
  if (cycle > uncertainty_width) return IciRisk::None;
  if (uncertainty_width > cycle * 2) return IciRisk::Certain;
  return IciRisk::Possible;
}

std::vector<PlanViolation> validate_plan(const SchedulePlan& plan, const PlanInputs& in) {
  std::vector<PlanViolation> v;
  auto add = [&](PlanViolationKind k, std::string d) { v.push_back({k, std::move(d)}); };
  const auto bounds = window_bounds(in.dc.burst_size, in.dc.packet_len_bytes, in.bottleneck_bps, plan.cycle);
  if (plan.w_dc < bounds.lower)
    add(PlanViolationKind::WindowBelowBurst,
        "w_dc " + std::to_string(plan.w_dc.count()) + " < " + std::to_string(bounds.lower.count()));
  if (plan.w_dc >= plan.cycle) add(PlanViolationKind::WindowNotBelowCycle, "w_dc must be shorter than the cycle");
  if (plan.w_be < TimeNs{0} || plan.w_dc + plan.w_be + plan.guard != plan.cycle)
    add(PlanViolationKind::CompositionMismatch, "w_dc + w_be + guard != cycle");

  TimeNs expected_offset = plan.cycle > TimeNs{0} ? floor_mod(plan.offset, plan.cycle) : plan.offset;
  if (in.macrotick) {
    const Macrotick mt = *in.macrotick;
    for (auto [name, t] : {std::pair{"cycle", plan.cycle}, {"w_dc", plan.w_dc}, {"w_be", plan.w_be},
                           {"guard", plan.guard}, {"w_dc_sl", plan.w_dc_sl}, {"offset", plan.offset_in_cycle}})
      if (!mt.divides(t)) add(PlanViolationKind::Quantization, std::string(name) + " " + std::to_string(t.count()));
    if (plan.cycle > TimeNs{0}) expected_offset = floor_mod(quantize_up(expected_offset, mt), plan.cycle);
  }
  if (plan.offset_in_cycle != expected_offset) add(PlanViolationKind::OffsetMismatch, "offset in cycle != offset mod cycle");
  if (in.dc.delay_budget != TimeNs::max() && plan.offset + plan.w_dc > in.dc.delay_budget)
    add(PlanViolationKind::BudgetExceeded, "offset + w_dc = " + std::to_string((plan.offset + plan.w_dc).count()) +
                                               " > budget " + std::to_string(in.dc.delay_budget.count()));
  return v;
}

SchedulePlan make_plan(const PlanInputs& in) {
  const Macrotick mt = in.macrotick.value_or(Macrotick{TimeNs{1}});
  SchedulePlan p;
  p.cycle = network_cycle(in.app_cycles);
  TimeNs w = window_bounds(in.dc.burst_size, in.dc.packet_len_bytes, in.bottleneck_bps, p.cycle).lower;
  if (in.dc.rate_bps > 0) w = std::max(w, window_for_rate(in.dc.rate_bps, p.cycle, in.bottleneck_bps));
  p.w_dc = quantize_up(w, mt);
  p.guard = quantize_up(in.guard.value_or(transmission_time(in.be.packet_len_bytes, in.bottleneck_bps)), mt);
  p.w_be = p.cycle - p.w_dc - p.guard;
  p.w_dc_sl = quantize_up(
      TimeNs{static_cast<std::int64_t>(std::ceil(static_cast<double>(p.w_dc.count()) * (1.0 + in.sl_window_margin)))},
      mt);

  if (in.jitter_samples.empty()) throw Error(ErrorCode::EmptyInput, "no jitter samples");
  std::vector<TimeNs> sorted = in.jitter_samples;
  std::sort(sorted.begin(), sorted.end());
  p.d_hat = percentile_sorted(sorted, in.percentile) + in.offset_margin;
  const Offset off = compute_offset(in.K, p.d_hat, p.cycle);
  p.offset = off.delta;
  p.offset_in_cycle = floor_mod(quantize_up(off.delta_in_cycle, mt), p.cycle);
  p.uncertainty_width = p.d_hat - sorted.front();
  p.ici_risk = predict_ici(p.cycle, p.uncertainty_width);
  return p;
}

GclSpec plan_gcl_ms(const SchedulePlan& plan, int dc_pcp, int be_pcp, Macrotick mt) {
  return two_window_layout(plan.cycle, TimeNs{0}, dc_pcp, plan.w_dc, be_pcp, plan.guard, mt);
}

GclSpec plan_gcl_sl(const SchedulePlan& plan, int dc_pcp, int be_pcp, Macrotick mt) {
  return two_window_layout(plan.cycle, plan.offset_in_cycle, dc_pcp, plan.w_dc_sl, be_pcp, plan.guard, mt);
}

}  // namespace tsn5g
