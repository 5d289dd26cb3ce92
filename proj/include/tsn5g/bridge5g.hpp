#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsn5g/rng.hpp"
#include "tsn5g/time.hpp"

namespace tsn5g {

struct ConstantDelay {
  TimeNs delay{0};
};

/// Replays measured delays; samples are kept sorted.
struct EmpiricalDelay {
  std::vector<TimeNs> sorted;

  static EmpiricalDelay from_unsorted(std::vector<TimeNs> samples);
};

/// shift + exp(N(mu, sigma^2)) nanoseconds, optionally truncated at `cap`
/// (the lognormal part is conditioned on shift + Y <= cap).
struct ShiftedLognormal {
  TimeNs shift{0};
  double mu = 0.0;
  double sigma = 1.0;
  std::optional<TimeNs> cap;

  /// P(delay <= x).
  double cdf(TimeNs x) const;
  double quantile(double p) const;
  double mean_ns() const;
};

enum class SlotKind { DL, UL, Flex };

/// Parses "4D-2S-4U" style patterns (S/F = flexible) or plain "DDDDFFUUUU".
std::vector<SlotKind> parse_tdd_pattern(std::string_view text);
std::string format_tdd_pattern(const std::vector<SlotKind>& pattern);

using BaseDelay = std::variant<ConstantDelay, EmpiricalDelay, ShiftedLognormal>;

/// Base draw plus the wait from the entry instant to the start of the next
/// downlink slot.
struct TddAligned {
  BaseDelay base;
  TimeNs slot_len{500'000};
  std::vector<SlotKind> pattern;
};

using DelayVariant = std::variant<ConstantDelay, EmpiricalDelay, ShiftedLognormal, TddAligned>;

struct BridgeDelayModel {
  std::map<int, DelayVariant> per_pcp;
  std::optional<DelayVariant> fallback;
  std::uint64_t seed = 1;
  /// Packets of one pcp leave in entry order; a draw that would overtake
  /// its predecessor is clamped to the predecessor's exit time.
  bool preserve_order = true;
  /// Extra delay per byte already inside the bridge at entry. 0 = off.
  double load_ns_per_byte = 0.0;

  const DelayVariant& variant_for(int pcp) const;
};

std::vector<std::string> validate_bridge(const BridgeDelayModel& model);

/// Wait from `entry` until the start of the first DL slot that begins
/// strictly after `entry`; the pattern repeats every slot_len * size.
TimeNs tdd_wait(TimeNs entry, TimeNs slot_len, const std::vector<SlotKind>& pattern);

TimeNs sample_delay(const DelayVariant& v, TimeNs entry_time, Rng& rng);
TimeNs sample_delay(const BridgeDelayModel& model, int pcp, TimeNs entry_time, Rng& rng);

/// Right-continuous empirical CDF: F(x) = #{samples <= x} / n.
class Ecdf {
public:
  explicit Ecdf(std::vector<TimeNs> samples);
  double operator()(TimeNs x) const;
  std::size_t size() const { return sorted_.size(); }

private:
  std::vector<TimeNs> sorted_;
};

Ecdf ecdf(const EmpiricalDelay& model);

double normal_cdf(double z);
double normal_quantile(double p);

struct SyntheticTargets {
  TimeNs shift{4'000'000};
  TimeNs cap{17'000'000};
  TimeNs mean{6'800'000};
  double percentile = 0.999;
  TimeNs percentile_value{15'000'000};
};

/// Fits mu and sigma so that the truncated shifted lognormal hits the target
/// mean and percentile. Defaults: support from 4 ms, mean 6.8 ms, 99.9% below
/// 15 ms, nothing beyond 17 ms.
ShiftedLognormal fit_synthetic(const SyntheticTargets& targets = {});

/// Stateful bridge for one simulation run: owns per-pcp RNG streams and
/// the ordering and load bookkeeping.
class Bridge {
public:
  explicit Bridge(BridgeDelayModel model);

  /// Draws the delay for a packet entering at `entry`; returns its exit time.
  TimeNs admit(int pcp, TimeNs entry, std::int64_t len_bytes);
  void release(std::int64_t len_bytes) { in_flight_bytes_ -= len_bytes; }
  std::int64_t in_flight_bytes() const { return in_flight_bytes_; }

private:
  Rng& rng_for(int pcp);

  BridgeDelayModel model_;
  std::map<int, Rng> rngs_;
  std::map<int, TimeNs> last_exit_;
  std::int64_t in_flight_bytes_ = 0;
};

}  // namespace tsn5g
