#include <doctest.h>

#include "tsn5g/error.hpp"
#include "tsn5g/tas_gate.hpp"

using namespace tsn5g;
using namespace tsn5g::literals;

namespace {

// 46.5 us is not on the 16 ns grid; a 4 ns tick keeps the window exact.
constexpr Macrotick kFine{TimeNs{4}};

GateControlList evaluation_gcl(TimeNs offset = 0_ns) {
  return build_gcl_or_throw(two_window_layout(30_ms, offset, 2, TimeNs{46'500}, 0, 12_us, kFine));
}

}  // namespace

TEST_CASE("gate_state follows the half-open window") {
  const auto g = evaluation_gcl();
  CHECK(gate_state(g, 2, 10_us));
  CHECK_FALSE(gate_state(g, 2, 100_us));
  CHECK(gate_state(g, 2, 30_ms + 10_us));
  CHECK_FALSE(gate_state(g, 2, 0_ns));  // open at t1 is excluded
  CHECK(gate_state(g, 2, TimeNs{46'500}));  // t2 is included
  CHECK_FALSE(gate_state(g, 2, TimeNs{46'501}));
  CHECK(gate_state(g, 0, 100_us));
  CHECK_FALSE(gate_state(g, 0, 30_ms - 6_us));  // guard band
  CHECK_FALSE(gate_state(g, 5, 10_us));
}

TEST_CASE("next_open") {
  const auto g = evaluation_gcl();
  CHECK(next_open(g, 2, 100_us) == 30_ms);
  CHECK(next_open(g, 2, 10_us) == 10_us);
  CHECK(next_open(evaluation_gcl(20_ms), 2, 0_ns) == 20_ms);
  CHECK_THROWS_AS(next_open(g, 5, 0_ns), Error);
  try {
    next_open(g, 5, 0_ns);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoWindowForPcp);
  }
}

TEST_CASE("can_start_frame checks the frame fits the window") {
  const auto g = evaluation_gcl();
  const TimeNs end{46'500};
  // First transmittable instant is one tick after the opening edge.
  CHECK(can_start_frame(g, 2, kFine.m, 1600_ns));
  CHECK_FALSE(can_start_frame(g, 2, end - 1_us, 1600_ns));
  CHECK(can_start_frame(g, 2, end - 1600_ns, 1600_ns));
  CHECK_FALSE(can_start_frame(g, 2, 100_us, 1600_ns));
  CHECK(can_start_frame(g, 2, 30_ms + kFine.m, 1600_ns));
}

TEST_CASE("earliest_start") {
  const auto g = evaluation_gcl();
  CHECK(earliest_start(g, 2, 0_ns, 1600_ns) == kFine.m);
  CHECK(earliest_start(g, 2, 20_us, 1600_ns) == 20_us);
  CHECK(earliest_start(g, 2, TimeNs{46'000}, 1600_ns) == 30_ms + kFine.m);
  CHECK(earliest_start(g, 0, 30_ms - 13_us, 12_us) == 30_ms + TimeNs{46'500} + kFine.m);
  CHECK_FALSE(earliest_start(g, 2, 0_ns, 50_us).has_value());  // never fits
}

TEST_CASE("build_gcl accepts the evaluation layout") {
  const auto r = build_gcl(two_window_layout(30_ms, 0_ns, 2, TimeNs{46'500}, 0, 12_us, kFine));
  CHECK(r.ok());
  CHECK(r.violations.empty());
  CHECK(r.gcl->windows().size() == 2);
  CHECK(r.gcl->windows()[1].close_at == 30_ms - 12_us);
  // On the 16 ns hardware grid the exact 46.5 us window needs quantizing.
  const auto coarse = build_gcl(two_window_layout(30_ms, 0_ns, 2, TimeNs{46'500}, 0, 12_us, Macrotick{}));
  CHECK(coarse.has(GclViolationKind::QuantizationError));
  CHECK(build_gcl(two_window_layout(30_ms, 0_ns, 2, quantize_up(TimeNs{46'500}, Macrotick{}), 0, 12_us, Macrotick{})).ok());
}

TEST_CASE("build_gcl rejects an undersized DC window") {
  const auto spec = two_window_layout(30_ms, 0_ns, 2, 9_us, 0, 12_us, Macrotick{TimeNs{8}});
  const auto r = build_gcl(spec, BurstRequirement{2, 6, 200, 1'000'000'000});
  CHECK_FALSE(r.ok());
  CHECK(r.has(GclViolationKind::WindowBoundViolation));
  CHECK(build_gcl(two_window_layout(30_ms, 0_ns, 2, TimeNs{9'600}, 0, 12_us, Macrotick{}),
                  BurstRequirement{2, 6, 200, 1'000'000'000})
            .ok());
}

TEST_CASE("build_gcl reports every violation") {
  SUBCASE("unquantized edge") {
    GclSpec s;
    s.windows = {{2, TimeNs{24}, 48_us}};
    CHECK(build_gcl(s).has(GclViolationKind::QuantizationError));
  }
  SUBCASE("overlap") {
    GclSpec s;
    s.windows = {{2, 0_ns, 48_us}, {0, 32_us, 1_ms}};
    CHECK(build_gcl(s).has(GclViolationKind::OverlapError));
  }
  SUBCASE("window into the guard band") {
    GclSpec s;
    s.windows = {{0, 0_ns, 30_ms}};
    CHECK(build_gcl(s).has(GclViolationKind::CycleOverflow));
  }
  SUBCASE("inverted window") {
    GclSpec s;
    s.windows = {{2, 48_us, 32_us}};
    CHECK_FALSE(build_gcl(s).ok());
  }
  SUBCASE("window equal to the cycle breaks the upper bound") {
    GclSpec s;
    s.guard = 0_ns;
    s.windows = {{2, 0_ns, 30_ms}};
    CHECK(build_gcl(s, BurstRequirement{}).has(GclViolationKind::WindowBoundViolation));
  }
  SUBCASE("several at once") {
    GclSpec s;
    s.cycle = TimeNs{30'000'008};
    s.windows = {{2, TimeNs{24}, 48_us}, {0, 32_us, 1_ms}};
    const auto r = build_gcl(s);
    CHECK(r.has(GclViolationKind::QuantizationError));
    CHECK(r.has(GclViolationKind::OverlapError));
    CHECK(r.violations.size() >= 3);
    CHECK_THROWS_AS(build_gcl_or_throw(s), Error);
  }
}

TEST_CASE("phase maps into (0, cycle]") {
  const auto g = evaluation_gcl(20_ms);
  CHECK(g.phase(20_ms) == 30_ms);
  CHECK(g.phase(20_ms + 1_ns) == 1_ns);
  CHECK(g.phase(0_ns) == 10_ms);
}
