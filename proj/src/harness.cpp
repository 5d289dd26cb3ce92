#include "tsn5g/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "tsn5g/error.hpp"
#include "tsn5g/io.hpp"
#include "tsn5g/planner.hpp"

namespace tsn5g {

std::string_view to_string(SweepKind k) {
  switch (k) {
    case SweepKind::WindowSweep: return "WindowSweep";
    case SweepKind::OffsetSweep: return "OffsetSweep";
    case SweepKind::CycleSweep: return "CycleSweep";
  }
  return "?";
}

bool SweepOutcome::all_ok() const {
  return std::all_of(runs.begin(), runs.end(), [](const SweepRunRecord& r) { return r.status == "ok"; });
}

std::vector<std::string> validate_sweep(const SweepSpec& spec) {
  std::vector<std::string> out;
  if (spec.values.empty()) out.emplace_back("sweep has no values");
  const bool up = spec.values.size() < 2 || spec.values[1] > spec.values[0];
  for (std::size_t i = 1; i < spec.values.size(); ++i)
    if (up ? spec.values[i] <= spec.values[i - 1] : spec.values[i] >= spec.values[i - 1]) {
      out.emplace_back("sweep values must be strictly monotone");
      break;
    }
  for (std::int64_t v : spec.values)
    if (v <= 0) {
      out.emplace_back("sweep values must be positive");
      break;
    }
  if (spec.grid_step <= TimeNs{0}) out.emplace_back("grid step must be positive");
  if (spec.sl_window_margin < 0.0) out.emplace_back("SL window margin must be non-negative");
  if (!spec.base.topology.link(NodeId::MS, NodeId::NW)) out.emplace_back("topology has no MS-NW link");
  return out;
}

namespace {

using namespace tsn5g::literals;

ExperimentConfig base_config() {
  ExperimentConfig cfg;
  StreamSpec dc;
  dc.kind = StreamKind::DC;
  dc.pcp = 2;
  dc.packet_len_bytes = 200;
  dc.app_cycle = 30_ms;
  dc.mode = DcMode::Backlog;
  StreamSpec be;
  be.kind = StreamKind::BE;
  be.pcp = 0;
  be.packet_len_bytes = 1500;
  be.rate_bps = 30'000'000;
  cfg.streams = {dc, be};
  cfg.queues = {{2, 6800}, {0, 6800}};
  const ShiftedLognormal synthetic = fit_synthetic();
  cfg.bridge.per_pcp[2] = synthetic;
  cfg.bridge.per_pcp[0] = synthetic;
  cfg.bridge.preserve_order = true;
  return cfg;
}

TimeNs widen(TimeNs w, double margin, Macrotick mt) {
  return quantize_up(TimeNs{static_cast<std::int64_t>(std::ceil(static_cast<double>(w.count()) * (1.0 + margin)))}, mt);
}

std::string run_dir_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "run_%02zu", index);
  return buf;
}

std::string hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string latency_csv(const LatencySummary& s) {
  std::ostringstream os;
  os << "key,value\n";
  os << "count," << s.count << "\n";
  os << "mean_ns," << format_probability(s.mean_ns) << "\n";
  os << "min_ns," << s.min.count() << "\n";
  os << "p50_ns," << s.p50.count() << "\n";
  os << "p99_ns," << s.p99.count() << "\n";
  os << "p999_ns," << s.p999.count() << "\n";
  os << "max_ns," << s.max.count() << "\n";
  return os.str();
}

}  // namespace

SweepSpec preset(std::string_view name) {
  SweepSpec s;
  s.base = base_config();
  s.base.seed = 1;
  if (name == "fig4") {
    s.kind = SweepKind::WindowSweep;
    s.values = {350'000, 650'000, 950'000, 1'250'000, 1'550'000};
    s.gate_sl = false;
    // Smallest window passes 6 frames per cycle: 250k samples need 1250 s.
    s.base.duration = 1260_s;
  } else if (name == "fig5") {
    s.kind = SweepKind::OffsetSweep;
    s.values = {5'000'000, 10'000'000, 15'000'000, 20'000'000, 25'000'000, 30'000'000};
    s.dc_rate_bps = 1'550'000;
    s.base.duration = 260_s;
  } else if (name == "fig6") {
    s.kind = SweepKind::CycleSweep;
    s.values = {6'000'000, 8'000'000, 10'000'000, 12'000'000, 15'000'000, 30'000'000};
    s.dc_rate_bps = 1'550'000;
    s.offset = 20_ms;
    s.sl_window_margin = 0.25;
    // T_C = 6 ms passes 5 frames per cycle: 250k samples need 300 s.
    s.base.duration = 305_s;
  } else {
    throw Error(ErrorCode::UnknownPreset, "unknown preset '" + std::string(name) + "' (fig4, fig5, fig6)");
  }
  return s;
}

AppliedRun apply_sweep_value(const SweepSpec& spec, std::size_t index) {
  if (index >= spec.values.size()) throw Error(ErrorCode::BadInput, "sweep index out of range");
  const std::int64_t value = spec.values[index];
  AppliedRun run;
  run.config = spec.base;
  ExperimentConfig& cfg = run.config;
  cfg.seed = spec.base.seed + index;
  cfg.output_dir = run_dir_name(index);

  const GclSpec layout = spec.base.gcl_ms.value_or(GclSpec{});
  const Macrotick mt = layout.macrotick;
  const TimeNs guard = layout.guard;
  TimeNs cycle = layout.cycle;
  std::int64_t rate = spec.dc_rate_bps;
  run.offset = spec.offset;
  switch (spec.kind) {
    case SweepKind::WindowSweep: rate = value; break;
    case SweepKind::OffsetSweep: run.offset = TimeNs{value}; break;
    case SweepKind::CycleSweep: cycle = TimeNs{value}; break;
  }
  const LinkSpec* link = cfg.topology.link(NodeId::MS, NodeId::NW);
  if (!link) throw Error(ErrorCode::MissingLink, "MS-NW");
  run.window_exact = window_for_rate(rate, cycle, link->bandwidth_bps);
  run.window_applied = quantize_up(run.window_exact, mt);

  for (auto& s : cfg.streams)
    if (s.kind == StreamKind::DC) s.app_cycle = cycle;
  cfg.gcl_ms = two_window_layout(cycle, TimeNs{0}, spec.dc_pcp, run.window_applied, spec.be_pcp, guard, mt);
  if (spec.gate_sl) {
    const TimeNs sl_offset = floor_mod(quantize_up(floor_mod(run.offset, cycle), mt), cycle);
    cfg.gcl_sl = two_window_layout(cycle, sl_offset, spec.dc_pcp, widen(run.window_applied, spec.sl_window_margin, mt),
                                   spec.be_pcp, guard, mt);
  } else {
    cfg.gcl_sl.reset();
  }
  return run;
}

SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir, unsigned jobs) {
  if (auto v = validate_sweep(spec); !v.empty()) {
    std::string msg;
    for (const auto& s : v) msg += (msg.empty() ? "" : "; ") + s;
    throw Error(ErrorCode::ConfigInvalid, msg);
  }
  std::filesystem::create_directories(out_dir);
  const std::size_t n = spec.values.size();
  SweepOutcome outcome;
  outcome.runs.resize(n);
  std::vector<LatencySeries> series(n);
  std::vector<TimeNs> cycles(n);

  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SweepRunRecord& rec = outcome.runs[i];
      rec.index = i;
      rec.value = spec.values[i];
      rec.dir = run_dir_name(i);
      try {
        AppliedRun run = apply_sweep_value(spec, i);
        rec.seed = run.config.seed;
        rec.config_hash = config_hash(run.config);
        rec.window_exact = run.window_exact;
        rec.window_applied = run.window_applied;
        cycles[i] = run.config.gcl_ms->cycle;
        const auto dir = out_dir / rec.dir;
        write_file_atomic(dir / "config.json", to_json(run.config).dump(2) + "\n");
        RunResult result = simulate(run.config);
        write_run_outputs(result, dir);
        rec.dropped = result.dropped;
        series[i] = result.latency(spec.dc_pcp);
        if (!series[i].empty()) {
          rec.latency = summarize(series[i]);
          rec.ici = detect_ici_jumps(series[i], cycles[i]);
          write_file_atomic(dir / "latency.csv", latency_csv(*rec.latency));
          write_file_atomic(dir / "clusters.csv", cluster_csv(*rec.ici));
          if (run.config.gcl_sl) {
            rec.scheduled = classify_series(series[i], run.offset, cycles[i]);
            write_file_atomic(dir / "clusters_scheduled.csv", cluster_csv(*rec.scheduled));
          }
        }
        rec.status = "ok";
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ConfigInvalid && e.code() != ErrorCode::RateExceedsLink) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
        rec.status = std::string("invalid: ") + e.what();
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        rec.status = "error";
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Common grid so the per-run curves line up in the combined files.
  TimeNs top{0};
  for (const auto& s : series)
    for (const auto& x : s.samples) top = std::max(top, x.latency);
  const TimeNs step = spec.grid_step;
  const TimeNs to = step * floor_div(top.count() + step.count() - 1, step.count());
  std::vector<std::size_t> plotted;
  std::vector<std::vector<DistPoint>> cdfs(n), ccdfs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (series[i].empty()) continue;
    plotted.push_back(i);
    cdfs[i] = distribution(series[i], DistributionMode::CDF, step, TimeNs{0}, to);
    ccdfs[i] = distribution(series[i], DistributionMode::CCDF, step, TimeNs{0}, to);
    write_file_atomic(out_dir / outcome.runs[i].dir / "cdf.csv", distribution_csv(cdfs[i]));
    write_file_atomic(out_dir / outcome.runs[i].dir / "ccdf.csv", distribution_csv(ccdfs[i]));
  }
  auto combined = [&](const std::vector<std::vector<DistPoint>>& curves) {
    std::string s = "x_ns";
    for (std::size_t i : plotted) s += "," + std::to_string(spec.values[i]);
    s += "\n";
    if (plotted.empty()) return s;
    const std::size_t rows = curves[plotted.front()].size();
    for (std::size_t r = 0; r < rows; ++r) {
      s += std::to_string(curves[plotted.front()][r].x.count());
      for (std::size_t i : plotted) s += "," + format_probability(curves[i][r].y);
      s += "\n";
    }
    return s;
  };
  write_file_atomic(out_dir / "combined_cdf.csv", combined(cdfs));
  write_file_atomic(out_dir / "combined_ccdf.csv", combined(ccdfs));

  std::ostringstream manifest;
  manifest << "index,kind,value,seed,config_hash,status,dir,window_exact_ns,window_applied_ns\n";
  std::ostringstream summary;
  summary << "index,value,count,mean_ns,p50_ns,p99_ns,p999_ns,max_ns,k0_fraction,jumped_fraction,unclassified_fraction,"
             "late_fraction,dropped\n";
  for (const auto& r : outcome.runs) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    manifest << r.index << "," << to_string(spec.kind) << "," << r.value << "," << r.seed << "," << hex(r.config_hash) << ","
             << status << "," << r.dir << "," << r.window_exact.count() << "," << r.window_applied.count() << "\n";
    summary << r.index << "," << r.value << ",";
    if (r.latency) {
      summary << r.latency->count << "," << format_probability(r.latency->mean_ns) << "," << r.latency->p50.count() << ","
              << r.latency->p99.count() << "," << r.latency->p999.count() << "," << r.latency->max.count() << ","
              << format_probability(r.ici->fraction(0)) << "," << format_probability(r.ici->jumped()) << ","
              << format_probability(r.ici->unclassified);
    } else {
      summary << "0,,,,,,,,";
    }
    summary << "," << (r.scheduled ? format_probability(r.scheduled->jumped()) : std::string());
    summary << "," << r.dropped << "\n";
  }
  write_file_atomic(out_dir / "manifest.csv", manifest.str());
  write_file_atomic(out_dir / "summary.csv", summary.str());
  return outcome;
}

}  // namespace tsn5g
