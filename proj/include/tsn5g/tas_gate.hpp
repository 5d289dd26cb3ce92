#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsn5g/time.hpp"

namespace tsn5g {

/// One transmission window, open on (open_at, close_at] relative to the
/// start of every cycle.
struct GateWindow {
  int pcp = 0;
  TimeNs open_at{0};
  TimeNs close_at{0};

  TimeNs width() const { return close_at - open_at; }
  bool operator==(const GateWindow&) const = default;
};

/// Unvalidated GCL parameters, as read from a config file.
struct GclSpec {
  TimeNs cycle{30'000'000};
  TimeNs base_offset{0};
  std::vector<GateWindow> windows;
  TimeNs guard{12'000};
  Macrotick macrotick{};

  bool operator==(const GclSpec&) const = default;
};

/// Burst that must fit in the window of its pcp (lower bound of the window size).
struct BurstRequirement {
  int pcp = 2;
  int burst_size = 1;
  std::int64_t packet_len_bytes = 200;
  std::int64_t bandwidth_bps = 1'000'000'000;
};

/// Validated, immutable gate control list for one egress port. Only
/// build_gcl() creates one.
class GateControlList {
public:
  TimeNs cycle() const { return spec_.cycle; }
  TimeNs base_offset() const { return spec_.base_offset; }
  TimeNs guard() const { return spec_.guard; }
  Macrotick macrotick() const { return spec_.macrotick; }
  const std::vector<GateWindow>& windows() const { return spec_.windows; }
  const GclSpec& spec() const { return spec_; }

  bool has_pcp(int pcp) const;
  /// Position of t inside its cycle, in (0, cycle].
  TimeNs phase(TimeNs t) const;

private:
  explicit GateControlList(GclSpec spec) : spec_(std::move(spec)) {}
  friend struct GclBuildResult build_gcl(const GclSpec&, const std::optional<BurstRequirement>&);

  GclSpec spec_;
};

enum class GclViolationKind {
  QuantizationError,
  OverlapError,
  CycleOverflow,
  WindowBoundViolation,
  BadWindow,
};

struct GclViolation {
  GclViolationKind kind;
  std::string detail;
};

struct GclBuildResult {
  std::optional<GateControlList> gcl;
  std::vector<GclViolation> violations;

  bool ok() const { return gcl.has_value(); }
  bool has(GclViolationKind k) const;
  std::string describe() const;
};

GclBuildResult build_gcl(const GclSpec& spec, const std::optional<BurstRequirement>& burst = std::nullopt);

/// Same as build_gcl but throws ConfigInvalid on any violation.
GateControlList build_gcl_or_throw(const GclSpec& spec, const std::optional<BurstRequirement>& burst = std::nullopt);

/// Gate of `pcp` is open at t iff n*T_C + t1 < t - base_offset <= n*T_C + t2
/// for some integer n.
bool gate_state(const GateControlList& gcl, int pcp, TimeNs t);

/// Earliest t' >= t such that the gate is open right after t'. Throws
/// NoWindowForPcp when the list has no window for pcp.
TimeNs next_open(const GateControlList& gcl, int pcp, TimeNs t);

/// Gate open at t and a frame of tx_duration started at t ends no later than
/// the close of the current window occurrence.
bool can_start_frame(const GateControlList& gcl, int pcp, TimeNs t, TimeNs tx_duration);

/// Earliest instant >= t at which a frame of tx_duration may start: no
/// sooner than one macrotick after the window opens, and ending before it
/// closes. Empty if the frame never fits a window (head-of-line starvation).
std::optional<TimeNs> earliest_start(const GateControlList& gcl, int pcp, TimeNs t, TimeNs tx_duration);

/// Canonical cycle layout: DC window first, BE window after it, guard band
/// at the end of the cycle.
GclSpec two_window_layout(TimeNs cycle, TimeNs offset, int dc_pcp, TimeNs dc_window, int be_pcp, TimeNs guard,
                          Macrotick mt);

}  // namespace tsn5g
