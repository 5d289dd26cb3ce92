// tsn5g: plan, simulate, analyze and sweep TSN schedules across a 5G bridge.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsn5g/error.hpp"
#include "tsn5g/harness.hpp"
#include "tsn5g/io.hpp"
#include "tsn5g/planner.hpp"
#include "tsn5g/sim_engine.hpp"
#include "tsn5g/trace_analysis.hpp"

namespace fs = std::filesystem;
using namespace tsn5g;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

struct PlanArgs {
  std::string samples;
  double percentile = 0.999;
  std::vector<std::int64_t> app_cycles_ns{30'000'000};
  int burst = 1;
  std::int64_t len = 200;
  std::int64_t dc_rate_bps = 0;
  std::int64_t be_rate_bps = 30'000'000;
  std::int64_t be_len = 1500;
  std::int64_t bottleneck_bps = 1'000'000'000;
  std::optional<std::int64_t> k_ns;
  std::int64_t margin_ns = 0;
  double sl_margin = 0.0;
  std::optional<std::int64_t> guard_ns;
  std::int64_t macrotick_ns = 16;
  std::optional<std::int64_t> budget_ns;
  int dc_pcp = 2;
  int be_pcp = 0;
  std::string out;
};

struct SimulateArgs {
  std::vector<std::string> configs;
  std::string out;
};

struct AnalyzeArgs {
  std::string ms;
  std::string sl;
  std::int64_t cycle_ns = 0;
  std::string out;
  std::int64_t grid_ns = 50'000;
  std::optional<std::int64_t> tolerance_ns;
};

struct SweepArgs {
  std::string preset;
  std::string out;
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> duration_ms;
  std::optional<std::int64_t> grid_ns;
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty())
    std::cout << text;
  else
    write_file_atomic(out, text);
}

int run_plan(const PlanArgs& a) {
  PlanInputs in;
  for (auto c : a.app_cycles_ns) in.app_cycles.emplace_back(c);
  in.dc.burst_size = a.burst;
  in.dc.packet_len_bytes = a.len;
  in.dc.rate_bps = a.dc_rate_bps;
  if (a.budget_ns) in.dc.delay_budget = TimeNs{*a.budget_ns};
  in.be.rate_bps = a.be_rate_bps;
  in.be.packet_len_bytes = a.be_len;
  in.bottleneck_bps = a.bottleneck_bps;
  in.K = a.k_ns ? TimeNs{*a.k_ns} : compute_K(default_topology(), a.len);
  in.jitter_samples = read_delay_csv(a.samples);
  in.percentile = a.percentile;
  in.offset_margin = TimeNs{a.margin_ns};
  in.sl_window_margin = a.sl_margin;
  if (a.guard_ns) in.guard = TimeNs{*a.guard_ns};
  const Macrotick mt{TimeNs{a.macrotick_ns}};
  in.macrotick = mt;

  const SchedulePlan plan = make_plan(in);
  emit(a.out, plan_fragment(plan, a.dc_pcp, a.be_pcp, mt).dump(2) + "\n");
  const auto violations = validate_plan(plan, in);
  for (const auto& v : violations) std::cerr << "plan violation: " << v.detail << "\n";
  return violations.empty() ? kExitOk : kExitInvalid;
}

int run_simulate(const SimulateArgs& a) {
  std::vector<fs::path> files(a.configs.begin(), a.configs.end());
  ExperimentConfig cfg = load_config(files);
  if (!a.out.empty()) cfg.output_dir = a.out;
  if (cfg.output_dir.empty()) throw Error(ErrorCode::ConfigInvalid, "no output directory (--out or output_dir)");
  const fs::path dir = cfg.output_dir;
  const RunResult r = simulate(cfg);
  write_file_atomic(dir / "config.json", to_json(cfg).dump(2) + "\n");
  write_run_outputs(r, dir);
  std::cout << "packets in " << r.packets_in << ", delivered " << r.packets_out << ", dropped " << r.dropped
            << ", queued " << r.still_queued << ", in transit " << r.in_transit << "\n";
  for (const auto& [pcp, k] : r.k_by_pcp) std::cout << "K(pcp " << pcp << ") = " << k.count() << " ns\n";
  std::cout << "outputs in " << dir.string() << "\n";
  return kExitOk;
}

int run_analyze(const AnalyzeArgs& a) {
  const auto joined = join_probes(read_probe_csv(a.ms), read_probe_csv(a.sl));
  const LatencySeries& s = joined.series;
  const TimeNs cycle{a.cycle_ns};
  const LatencySummary sum = summarize(s);
  const IciReport ici = detect_ici_jumps(s, cycle, a.tolerance_ns ? std::optional<TimeNs>(TimeNs{*a.tolerance_ns}) : std::nullopt);
  const TimeNs step{a.grid_ns};

  std::printf("samples %zu, losses %zu, negative %zu\n", sum.count, joined.losses.size(), joined.negative.size());
  std::printf("mean %.1f ns, min %lld, p50 %lld, p99 %lld, p99.9 %lld, max %lld ns\n", sum.mean_ns,
              static_cast<long long>(sum.min.count()), static_cast<long long>(sum.p50.count()),
              static_cast<long long>(sum.p99.count()), static_cast<long long>(sum.p999.count()),
              static_cast<long long>(sum.max.count()));
  std::printf("baseline %lld ns, unclassified %s\n", static_cast<long long>(ici.baseline.count()),
              format_probability(ici.unclassified).c_str());
  for (const auto& c : ici.clusters) std::printf("k=%d fraction %s\n", c.k, format_probability(c.fraction).c_str());

  if (!a.out.empty()) {
    const fs::path dir = a.out;
    std::string lat = "seq,latency_ns\n";
    for (const auto& x : s.samples) lat += std::to_string(x.seq) + "," + std::to_string(x.latency.count()) + "\n";
    write_file_atomic(dir / "latency_samples.csv", lat);
    write_file_atomic(dir / "cdf.csv", distribution_csv(distribution(s, DistributionMode::CDF, step)));
    write_file_atomic(dir / "ccdf.csv", distribution_csv(distribution(s, DistributionMode::CCDF, step)));
    write_file_atomic(dir / "clusters.csv", cluster_csv(ici));
  }
  return kExitOk;
}

int run_sweep_cmd(const SweepArgs& a) {
  SweepSpec spec = preset(a.preset);
  if (a.seed) spec.base.seed = *a.seed;
  if (a.duration_ms) spec.base.duration = TimeNs{*a.duration_ms * 1'000'000};
  if (a.grid_ns) spec.grid_step = TimeNs{*a.grid_ns};
  const SweepOutcome out = run_sweep(spec, a.out, a.jobs);
  for (const auto& r : out.runs) {
    std::cout << r.dir << " value=" << r.value << " seed=" << r.seed << " " << r.status;
    if (r.latency) std::cout << " samples=" << r.latency->count << " jumped=" << format_probability(r.ici->jumped());
    if (r.scheduled) std::cout << " late=" << format_probability(r.scheduled->jumped());
    std::cout << "\n";
  }
  return out.all_ok() ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TSN schedule planning and simulation across a 5G bridge"};
  app.require_subcommand(1);

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Derive cycle, windows and SL offset from jitter samples");
  plan->add_option("--samples", pa.samples, "CSV of bridge delays (header delay_ns)")->required();
  plan->add_option("--percentile", pa.percentile, "Percentile of the delay bound")->capture_default_str();
  plan->add_option("--app-cycle-ns", pa.app_cycles_ns, "Application cycles (repeatable)")->capture_default_str();
  plan->add_option("--burst", pa.burst, "DC burst size")->capture_default_str();
  plan->add_option("--len", pa.len, "DC packet length in bytes")->capture_default_str();
  plan->add_option("--dc-rate-bps", pa.dc_rate_bps, "DC throughput the window must carry")->capture_default_str();
  plan->add_option("--be-rate-bps", pa.be_rate_bps)->capture_default_str();
  plan->add_option("--be-len", pa.be_len)->capture_default_str();
  plan->add_option("--bottleneck-bps", pa.bottleneck_bps)->capture_default_str();
  plan->add_option("--k-ns", pa.k_ns, "Fixed path delay K (default: from the default topology)");
  plan->add_option("--margin-ns", pa.margin_ns, "Added to the percentile bound")->capture_default_str();
  plan->add_option("--sl-margin", pa.sl_margin, "Fractional widening of the SL DC window")->capture_default_str();
  plan->add_option("--guard-ns", pa.guard_ns, "Guard band (default: one BE frame)");
  plan->add_option("--macrotick-ns", pa.macrotick_ns)->capture_default_str();
  plan->add_option("--budget-ns", pa.budget_ns, "DC delay budget");
  plan->add_option("--dc-pcp", pa.dc_pcp)->capture_default_str();
  plan->add_option("--be-pcp", pa.be_pcp)->capture_default_str();
  plan->add_option("--out", pa.out, "Write the JSON fragment here instead of stdout");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run one experiment config");
  sim->add_option("--config", sa.configs, "Config file; later files are merged over earlier ones")->required();
  sim->add_option("--out", sa.out, "Output directory (overrides output_dir)");

  AnalyzeArgs aa;
  auto* ana = app.add_subcommand("analyze", "Join probe CSVs and report latency distribution and ICI clusters");
  ana->add_option("--ms", aa.ms, "MS egress probe CSV")->required();
  ana->add_option("--sl", aa.sl, "SL egress probe CSV")->required();
  ana->add_option("--cycle-ns", aa.cycle_ns, "Network cycle")->required()->check(CLI::PositiveNumber);
  ana->add_option("--out", aa.out, "Directory for cdf/ccdf/clusters CSVs");
  ana->add_option("--grid-ns", aa.grid_ns, "Distribution grid step")->capture_default_str()->check(CLI::PositiveNumber);
  ana->add_option("--tolerance-ns", aa.tolerance_ns, "Cluster tolerance (default: cycle / 4)");

  SweepArgs wa;
  auto* sw = app.add_subcommand("sweep", "Run a preset sweep");
  sw->add_option("--preset", wa.preset, "fig4, fig5 or fig6")->required();
  sw->add_option("--out", wa.out, "Output directory")->required();
  sw->add_option("--jobs", wa.jobs, "Concurrent runs")->capture_default_str()->check(CLI::PositiveNumber);
  sw->add_option("--seed", wa.seed, "Base seed (run i uses seed + i)");
  sw->add_option("--duration-ms", wa.duration_ms, "Override the simulated duration")->check(CLI::PositiveNumber);
  sw->add_option("--grid-ns", wa.grid_ns, "Distribution grid step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*plan) return run_plan(pa);
    if (*sim) return run_simulate(sa);
    if (*ana) return run_analyze(aa);
    if (*sw) return run_sweep_cmd(wa);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Io ? kExitIo : kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitInvalid;
}
