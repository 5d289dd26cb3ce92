#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsn5g/tas_gate.hpp"
#include "tsn5g/time.hpp"

namespace tsn5g {

struct DcPlanInputs {
  int burst_size = 1;
  std::int64_t packet_len_bytes = 200;
  TimeNs delay_budget = TimeNs::max();
  /// Throughput the DC window must carry; 0 = size the window for one burst.
  std::int64_t rate_bps = 0;
};

struct BePlanInputs {
  std::int64_t rate_bps = 30'000'000;
  std::int64_t packet_len_bytes = 1500;
};

struct PlanInputs {
  std::vector<TimeNs> app_cycles;
  DcPlanInputs dc;
  BePlanInputs be;
  std::int64_t bottleneck_bps = 1'000'000'000;
  TimeNs K{0};
  std::vector<TimeNs> jitter_samples;
  double percentile = 0.999;
  /// Added on top of the percentile bound before computing the offset.
  TimeNs offset_margin{0};
  /// Fractional widening of the SL DC window (0.25 = +25%).
  double sl_window_margin = 0.0;
  std::optional<TimeNs> guard;
  /// When set, plan times are quantized (rounded up) to it and checked.
  std::optional<Macrotick> macrotick;
};

enum class IciRisk { None, Possible, Certain };
std::string_view to_string(IciRisk r);

struct SchedulePlan {
  TimeNs cycle{0};
  TimeNs w_dc{0};
  TimeNs w_be{0};
  TimeNs guard{0};
  TimeNs w_dc_sl{0};
  TimeNs offset{0};
  TimeNs offset_in_cycle{0};
  TimeNs d_hat{0};
  TimeNs uncertainty_width{0};
  IciRisk ici_risk = IciRisk::None;
};

/// GCD of the application cycles. Throws EmptyInput / BadInput.
TimeNs network_cycle(const std::vector<TimeNs>& app_cycles);

/// Window that carries rate_bps when it opens once per cycle on a link of
/// link_bps: rate * cycle / link_bps, rounded up to the macrotick (1 ns
/// when none is given). Throws RateExceedsLink.
TimeNs window_for_rate(std::int64_t rate_bps, TimeNs cycle, std::int64_t link_bps, Macrotick mt = Macrotick{TimeNs{1}});

struct WindowBounds {
  TimeNs lower{0};  // inclusive
  TimeNs upper{0};  // exclusive
  bool feasible() const { return lower < upper; }
};

/// burst * len / b <= w < T_C.
WindowBounds window_bounds(int burst_size, std::int64_t len_bytes, std::int64_t link_bps, TimeNs cycle);

/// Order statistic at 1-based index ceil(p*n) of the sorted samples.
/// Throws BadPercentile / EmptyInput.
TimeNs percentile_bound(std::vector<TimeNs> samples, double p);
/// Same, for samples already sorted ascending.
TimeNs percentile_sorted(const std::vector<TimeNs>& sorted, double p);

struct Offset {
  TimeNs delta{0};
  TimeNs delta_in_cycle{0};
  bool operator==(const Offset&) const = default;
};

/// delta = K + d_hat and its reduction modulo the cycle.
Offset compute_offset(TimeNs K, TimeNs d_hat, TimeNs cycle);

/// None if the cycle exceeds the uncertainty width, Certain if the width
/// exceeds two cycles, Possible otherwise.
IciRisk predict_ici(TimeNs cycle, TimeNs uncertainty_width);

enum class PlanViolationKind {
  WindowBelowBurst,
  WindowNotBelowCycle,
  CompositionMismatch,
  Quantization,
  OffsetMismatch,
  BudgetExceeded,
};

struct PlanViolation {
  PlanViolationKind kind;
  std::string detail;
};

std::vector<PlanViolation> validate_plan(const SchedulePlan& plan, const PlanInputs& inputs);

/// Full offline plan: cycle, windows, percentile bound, offset, ICI risk.
SchedulePlan make_plan(const PlanInputs& inputs);

/// MS and SL gate lists for a plan (DC pcp / BE pcp layout).
GclSpec plan_gcl_ms(const SchedulePlan& plan, int dc_pcp, int be_pcp, Macrotick mt);
GclSpec plan_gcl_sl(const SchedulePlan& plan, int dc_pcp, int be_pcp, Macrotick mt);

}  // namespace tsn5g
