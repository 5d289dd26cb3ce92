#include <doctest.h>

#include <algorithm>
#include <random>

#include "tsn5g/bridge5g.hpp"
#include "tsn5g/error.hpp"
#include "tsn5g/planner.hpp"

using namespace tsn5g;
using namespace tsn5g::literals;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::BadInput;
}

PlanInputs evaluation_inputs() {
  PlanInputs in;
  in.app_cycles = {30_ms};
  in.dc.burst_size = 29;
  in.dc.rate_bps = 1'550'000;
  in.K = TimeNs{4'200};
  in.jitter_samples = {4_ms, 6_ms, 7_ms, 15_ms};
  in.percentile = 1.0;
  in.offset_margin = 5_ms - TimeNs{4'200};
  in.guard = 12_us;
  return in;
}

}  // namespace

TEST_CASE("network_cycle") {
  CHECK(network_cycle({30_ms}) == 30_ms);
  CHECK(network_cycle({6_ms, 10_ms}) == 2_ms);
  CHECK(network_cycle({30_ms, 30_ms}) == 30_ms);
  CHECK(code_of([] { network_cycle({}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("network_cycle divides every input") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::int64_t> d(1, 2000);
  for (int i = 0; i < 200; ++i) {
    std::vector<TimeNs> cycles;
    const std::int64_t unit = d(gen) * 1000;
    for (int j = 0; j < 4; ++j) cycles.emplace_back(unit * d(gen));
    const TimeNs g = network_cycle(cycles);
    for (TimeNs c : cycles) CHECK(floor_mod(c, g) == 0_ns);
  }
}

TEST_CASE("window_for_rate") {
  CHECK(window_for_rate(1'550'000, 30_ms, 1'000'000'000) == TimeNs{46'500});
  CHECK(window_for_rate(350'000, 30_ms, 1'000'000'000) == TimeNs{10'500});
  CHECK(window_for_rate(650'000, 30_ms, 1'000'000'000) == TimeNs{19'500});
  CHECK(window_for_rate(950'000, 30_ms, 1'000'000'000) == TimeNs{28'500});
  CHECK(window_for_rate(1'250'000, 30_ms, 1'000'000'000) == TimeNs{37'500});
  CHECK(window_for_rate(0, 30_ms, 1'000'000'000) == 0_ns);
  CHECK(window_for_rate(1'550'000, 30_ms, 1'000'000'000, Macrotick{}) == TimeNs{46'512});
  CHECK(code_of([] { window_for_rate(2'000'000'000, 30_ms, 1'000'000'000); }) == ErrorCode::RateExceedsLink);
}

TEST_CASE("window_for_rate never under-provisions") {
  std::mt19937_64 gen(9);
  std::uniform_int_distribution<std::int64_t> rate(1, 1'000'000'000), cyc(1, 100'000'000);
  for (int i = 0; i < 2000; ++i) {
    const auto r = rate(gen);
    const TimeNs c{cyc(gen)};
    const TimeNs w = window_for_rate(r, c, 1'000'000'000, Macrotick{});
    // w * b / T_C >= r, in exact integer arithmetic.
    CHECK(static_cast<Int128>(w.count()) * 1'000'000'000 >= static_cast<Int128>(r) * c.count());
  }
}

TEST_CASE("window_bounds") {
  const auto b = window_bounds(6, 200, 1'000'000'000, 30_ms);
  CHECK(b.lower == TimeNs{9'600});
  CHECK(b.upper == 30_ms);
  CHECK(b.feasible());
  CHECK(window_bounds(1, 200, 1'000'000'000, 30_ms).lower == 1600_ns);
  CHECK_FALSE(window_bounds(100'000, 1500, 1'000'000'000, 30_ms).feasible());
}

TEST_CASE("percentile_bound") {
  std::vector<TimeNs> ms;
  for (int i = 1; i <= 1000; ++i) ms.push_back(1_ms * i);
  std::shuffle(ms.begin(), ms.end(), std::mt19937(1));
  CHECK(percentile_bound(ms, 0.999) == 999_ms);
  CHECK(percentile_bound(ms, 1.0) == 1000_ms);
  CHECK(percentile_bound(ms, 0.5) == 500_ms);
  CHECK(percentile_bound({7_ms}, 0.001) == 7_ms);
  CHECK(code_of([&] { percentile_bound(ms, 0.0); }) == ErrorCode::BadPercentile);
  CHECK(code_of([&] { percentile_bound(ms, 1.5); }) == ErrorCode::BadPercentile);
}

TEST_CASE("percentile_bound matches the order statistic and is monotone in p") {
  std::mt19937_64 gen(21);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 1 + gen() % 500;
    std::vector<TimeNs> s;
    for (std::size_t j = 0; j < n; ++j) s.emplace_back(static_cast<std::int64_t>(gen() % 1'000'000));
    std::vector<TimeNs> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    TimeNs prev{-1};
    for (std::size_t k = 1; k <= n; ++k) {
      // p = k/n picks exactly the k-th smallest sample.
      const double p = static_cast<double>(k) / static_cast<double>(n);
      const TimeNs v = percentile_bound(s, p);
      CHECK(v == sorted[k - 1]);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(percentile_bound(s, 1.0) == sorted.back());
  }
}

TEST_CASE("percentile of the fitted synthetic model") {
  const ShiftedLognormal m = fit_synthetic();
  Rng rng(3);
  std::vector<TimeNs> s;
  for (int i = 0; i < 400'000; ++i) s.push_back(sample_delay(DelayVariant{m}, 0_ns, rng));
  const TimeNs p999 = percentile_bound(s, 0.999);
  CHECK(p999 > TimeNs{14'700'000});
  CHECK(p999 < TimeNs{15'300'000});
}

TEST_CASE("compute_offset") {
  CHECK(compute_offset(TimeNs{4'200}, 15_ms, 30_ms) == Offset{TimeNs{15'004'200}, TimeNs{15'004'200}});
  CHECK(compute_offset(0_ns, 35_ms, 30_ms) == Offset{35_ms, 5_ms});
  CHECK(compute_offset(0_ns, 0_ns, 30_ms) == Offset{0_ns, 0_ns});
}

TEST_CASE("compute_offset covers the largest observed delay when d_hat does") {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 500; ++i) {
    std::vector<TimeNs> s;
    for (int j = 0; j < 50; ++j) s.emplace_back(static_cast<std::int64_t>(gen() % 20'000'000));
    const TimeNs K{static_cast<std::int64_t>(gen() % 10'000)};
    const TimeNs d_hat = percentile_bound(s, 1.0);
    const Offset o = compute_offset(K, d_hat, 30_ms);
    CHECK(o.delta >= K + *std::max_element(s.begin(), s.end()));
    CHECK(o.delta_in_cycle == floor_mod(o.delta, 30_ms));
  }
}

TEST_CASE("predict_ici") {
  CHECK(predict_ici(30_ms, 11_ms) == IciRisk::None);
  CHECK(predict_ici(12_ms, 13_ms) == IciRisk::Possible);
  CHECK(predict_ici(6_ms, 13_ms) == IciRisk::Certain);
}

TEST_CASE("make_plan and validate_plan") {
  PlanInputs in = evaluation_inputs();
  SUBCASE("evaluation plan with a 20 ms offset is valid") {
    const SchedulePlan p = make_plan(in);
    CHECK(p.cycle == 30_ms);
    CHECK(p.w_dc == TimeNs{46'500});
    CHECK(p.w_dc + p.w_be + p.guard == p.cycle);
    CHECK(p.offset == 20_ms);
    CHECK(p.offset_in_cycle == 20_ms);
    CHECK(p.ici_risk == IciRisk::None);
    CHECK(validate_plan(p, in).empty());
  }
  SUBCASE("window equal to the cycle is rejected") {
    SchedulePlan p = make_plan(in);
    p.w_dc = p.cycle;
    p.w_be = 0_ns;
    p.guard = 0_ns;
    const auto v = validate_plan(p, in);
    CHECK(std::any_of(v.begin(), v.end(), [](const PlanViolation& x) { return x.kind == PlanViolationKind::WindowNotBelowCycle; }));
  }
  SUBCASE("budget exceeded") {
    in.dc.delay_budget = 10_ms;
    const auto v = validate_plan(make_plan(in), in);
    CHECK(std::any_of(v.begin(), v.end(), [](const PlanViolation& x) { return x.kind == PlanViolationKind::BudgetExceeded; }));
  }
  SUBCASE("macrotick quantizes every plan time") {
    in.macrotick = Macrotick{};
    in.sl_window_margin = 0.25;
    const SchedulePlan p = make_plan(in);
    CHECK(p.w_dc == TimeNs{46'512});
    CHECK(p.w_dc_sl == TimeNs{58'144});
    CHECK(validate_plan(p, in).empty());
  }
  SUBCASE("window below the burst") {
    SchedulePlan p = make_plan(in);
    in.dc.burst_size = 1000;
    const auto v = validate_plan(p, in);
    CHECK(std::any_of(v.begin(), v.end(), [](const PlanViolation& x) { return x.kind == PlanViolationKind::WindowBelowBurst; }));
  }
  SUBCASE("empty samples") {
    in.jitter_samples.clear();
    CHECK(code_of([&] { make_plan(in); }) == ErrorCode::EmptyInput);
  }
}

TEST_CASE("plan gate lists") {
  PlanInputs in = evaluation_inputs();
  in.macrotick = Macrotick{};
  const SchedulePlan p = make_plan(in);
  const GclSpec ms = plan_gcl_ms(p, 2, 0, Macrotick{});
  const GclSpec sl = plan_gcl_sl(p, 2, 0, Macrotick{});
  CHECK(ms.base_offset == 0_ns);
  CHECK(sl.base_offset == p.offset_in_cycle);
  CHECK(build_gcl(ms).ok());
  CHECK(build_gcl(sl).ok());
}
