#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsn5g/sim_engine.hpp"
#include "tsn5g/trace_analysis.hpp"

namespace tsn5g {

enum class SweepKind { WindowSweep, OffsetSweep, CycleSweep };
std::string_view to_string(SweepKind k);

/// A family of runs that differ in one parameter.
///   WindowSweep: values are DC rates in bit/s; the DC window is sized from them.
///   OffsetSweep: values are offsets in ns, applied modulo the cycle at SL.
///   CycleSweep:  values are network cycles in ns; windows rescale to keep
///                dc_rate_bps and the SL window gets sl_window_margin.
struct SweepSpec {
  SweepKind kind = SweepKind::OffsetSweep;
  std::vector<std::int64_t> values;
  ExperimentConfig base;
  int dc_pcp = 2;
  int be_pcp = 0;
  std::int64_t dc_rate_bps = 1'550'000;
  TimeNs offset{20'000'000};
  double sl_window_margin = 0.0;
  bool gate_sl = true;
  TimeNs grid_step{50'000};
};

std::vector<std::string> validate_sweep(const SweepSpec& spec);

/// Named sweeps reproducing the three evaluation experiments. Throws
/// UnknownPreset.
SweepSpec preset(std::string_view name);

/// Config of run `index` plus the DC window before and after quantization.
struct AppliedRun {
  ExperimentConfig config;
  TimeNs window_exact{0};
  TimeNs window_applied{0};
  TimeNs offset{0};
};
AppliedRun apply_sweep_value(const SweepSpec& spec, std::size_t index);

struct SweepRunRecord {
  std::size_t index = 0;
  std::int64_t value = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string status;
  std::string dir;
  TimeNs window_exact{0};
  TimeNs window_applied{0};
  std::optional<LatencySummary> latency;
  std::optional<IciReport> ici;
  /// Clusters around the on-time latency implied by the SL offset (gated SL only).
  std::optional<IciReport> scheduled;
  std::uint64_t dropped = 0;
};

struct SweepOutcome {
  std::vector<SweepRunRecord> runs;
  bool all_ok() const;
};

/// Runs every value (up to `jobs` at a time) and writes, under out_dir:
///   manifest.csv, summary.csv, combined_cdf.csv, combined_ccdf.csv and one
///   run_NN/ directory per value with config.json, probe CSVs, summary.csv,
///   latency.csv, cdf.csv, ccdf.csv, clusters.csv and, with a gated SL,
///   clusters_scheduled.csv.
SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir, unsigned jobs = 1);

}  // namespace tsn5g
