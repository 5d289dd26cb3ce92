#include <doctest.h>

#include <random>
#include <sstream>

#include "tsn5g/error.hpp"
#include "tsn5g/harness.hpp"
#include "tsn5g/io.hpp"

using namespace tsn5g;
using namespace tsn5g::literals;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("tsn5g_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

ExperimentConfig sample_config() {
  ExperimentConfig cfg;
  StreamSpec dc;
  dc.kind = StreamKind::DC;
  dc.pcp = 2;
  dc.burst_size = 3;
  dc.delay_budget = 20_ms;
  dc.phase = 1_us;
  StreamSpec be;
  be.kind = StreamKind::BE;
  be.pcp = 0;
  be.packet_len_bytes = 1500;
  be.rate_bps = 30'000'000;
  cfg.streams = {dc, be};
  cfg.queues = {{2, 6800}, {0, 3000}};
  cfg.gcl_ms = two_window_layout(30_ms, 0_ns, 2, TimeNs{46'512}, 0, 12_us, Macrotick{});
  cfg.gcl_sl = two_window_layout(30_ms, 20_ms, 2, TimeNs{58'144}, 0, 12_us, Macrotick{});
  cfg.bridge.per_pcp[2] = fit_synthetic();
  cfg.bridge.per_pcp[0] = EmpiricalDelay::from_unsorted({4_ms, 6_ms});
  cfg.bridge.per_pcp[5] = TddAligned{ConstantDelay{1_ms}, 500_us, parse_tdd_pattern("4D-2S-4U")};
  cfg.bridge.fallback = ConstantDelay{2_ms};
  cfg.bridge.load_ns_per_byte = 0.5;
  cfg.duration = 300_ms;
  cfg.drain = 50_ms;
  cfg.seed = 42;
  return cfg;
}

}  // namespace

TEST_CASE("config JSON round trip") {
  const ExperimentConfig cfg = sample_config();
  const json j = to_json(cfg);
  const ExperimentConfig back = config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(back.gcl_sl == cfg.gcl_sl);
  CHECK(back.streams[0].delay_budget == 20_ms);

  ExperimentConfig other = cfg;
  other.seed = 43;
  CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("config parsing") {
  TempDir tmp;
  SUBCASE("synthetic model is fitted on load") {
    const auto cfg = config_from_json(json::parse(R"({"version":1,"bridge":{"per_pcp":{"2":{"type":"synthetic"}}}})"));
    const auto* m = std::get_if<ShiftedLognormal>(&cfg.bridge.per_pcp.at(2));
    REQUIRE(m != nullptr);
    CHECK(m->mean_ns() == doctest::Approx(6.8e6).epsilon(1e-6));
  }
  SUBCASE("empirical csv resolves against the base directory") {
    write_file_atomic(tmp.path / "d.csv", delay_csv({5_ms, 7_ms, 6_ms}));
    const auto cfg =
        config_from_json(json::parse(R"({"version":1,"bridge":{"per_pcp":{"2":{"type":"empirical","csv":"d.csv"}}}})"), tmp.path);
    const auto* m = std::get_if<EmpiricalDelay>(&cfg.bridge.per_pcp.at(2));
    REQUIRE(m != nullptr);
    CHECK(m->sorted == std::vector<TimeNs>{5_ms, 6_ms, 7_ms});
  }
  SUBCASE("layered files merge") {
    write_file_atomic(tmp.path / "a.json", to_json(sample_config()).dump());
    write_file_atomic(tmp.path / "b.json", R"({"seed":9,"gcl_sl":null})");
    const auto cfg = load_config({tmp.path / "a.json", tmp.path / "b.json"});
    CHECK(cfg.seed == 9);
    CHECK_FALSE(cfg.gcl_sl.has_value());
    CHECK(cfg.gcl_ms.has_value());
  }
  SUBCASE("errors") {
    auto code = [](const std::string& text) {
      try {
        config_from_json(json::parse(text));
      } catch (const Error& e) {
        return e.code();
      }
      return ErrorCode::BadInput;
    };
    CHECK(code(R"({"version":2})") == ErrorCode::ConfigInvalid);
    CHECK(code(R"({"version":1,"streams":[{"kind":"XX","pcp":1,"packet_len_bytes":1}]})") == ErrorCode::ConfigInvalid);
    CHECK(code(R"({"version":1,"streams":[{"kind":"DC"}]})") == ErrorCode::ConfigInvalid);
    CHECK(code(R"({"version":1,"bridge":{"per_pcp":{"2":{"type":"gamma"}}}})") == ErrorCode::ConfigInvalid);
    write_file_atomic(tmp.path / "bad.json", "{ not json");
    CHECK_THROWS_AS(load_config({tmp.path / "bad.json"}), Error);
    CHECK_THROWS_AS(load_config({tmp.path / "missing.json"}), Error);
  }
}

TEST_CASE("probe CSV") {
  TempDir tmp;
  const std::vector<ProbeRecord> r{{1, 8_ns}, {2, 1608_ns}, {3, TimeNs{30'000'000'008}}};
  write_file_atomic(tmp.path / "p.csv", probe_csv(r));
  CHECK(read_file(tmp.path / "p.csv").rfind("seq,egress_ns\n", 0) == 0);
  CHECK(read_probe_csv(tmp.path / "p.csv") == r);
  CHECK_FALSE(fs::exists(tmp.path / "p.csv.tmp"));

  write_file_atomic(tmp.path / "bad.csv", "seq,time\n1,2\n");
  CHECK_THROWS_AS(read_probe_csv(tmp.path / "bad.csv"), Error);
  write_file_atomic(tmp.path / "bad2.csv", "seq,egress_ns\n1,abc\n");
  CHECK_THROWS_AS(read_probe_csv(tmp.path / "bad2.csv"), Error);
}

TEST_CASE("plot CSV headers") {
  const auto cdf = distribution_csv({{1_ms, 0.5}, {2_ms, 1.0}});
  CHECK(cdf == "x_ns,probability\n1000000,0.5\n2000000,1\n");
  IciReport rep;
  rep.clusters = {{0, 0.75}, {1, 0.25}};
  CHECK(cluster_csv(rep).rfind("k,fraction\n0,0.75\n1,0.25\n", 0) == 0);
}

TEST_CASE("presets") {
  CHECK_THROWS_AS(preset("fig9"), Error);
  const SweepSpec f4 = preset("fig4");
  CHECK(f4.kind == SweepKind::WindowSweep);
  CHECK(f4.values == std::vector<std::int64_t>{350'000, 650'000, 950'000, 1'250'000, 1'550'000});
  CHECK(validate_sweep(f4).empty());
  const std::vector<std::int64_t> exact{10'500, 19'500, 28'500, 37'500, 46'500};
  for (std::size_t i = 0; i < f4.values.size(); ++i) {
    const AppliedRun r = apply_sweep_value(f4, i);
    CHECK(r.window_exact.count() == exact[i]);
    CHECK(r.window_applied == quantize_up(r.window_exact, Macrotick{}));
    CHECK(r.config.gcl_ms->windows[0].width() == r.window_applied);
    CHECK_FALSE(r.config.gcl_sl.has_value());
    CHECK(r.config.seed == f4.base.seed + i);
    CHECK(build_gcl(*r.config.gcl_ms).ok());
  }

  const SweepSpec f5 = preset("fig5");
  CHECK(f5.kind == SweepKind::OffsetSweep);
  CHECK(f5.values.front() == 5'000'000);
  CHECK(f5.values.back() == 30'000'000);
  for (std::size_t i = 0; i < f5.values.size(); ++i) {
    const AppliedRun r = apply_sweep_value(f5, i);
    REQUIRE(r.config.gcl_sl.has_value());
    // An offset equal to the cycle reduces to phase 0.
    CHECK(r.config.gcl_sl->base_offset == floor_mod(TimeNs{f5.values[i]}, 30_ms));
    CHECK(build_gcl(*r.config.gcl_sl).ok());
    CHECK(r.config.output_dir == (i < 10 ? "run_0" : "run_") + std::to_string(i));
  }

  const SweepSpec f6 = preset("fig6");
  CHECK(f6.kind == SweepKind::CycleSweep);
  CHECK(f6.sl_window_margin == 0.25);
  for (std::size_t i = 0; i < f6.values.size(); ++i) {
    const AppliedRun r = apply_sweep_value(f6, i);
    const TimeNs cycle{f6.values[i]};
    CHECK(r.config.gcl_ms->cycle == cycle);
    CHECK(r.config.streams[0].app_cycle == cycle);
    // Rate-preserving window: w / T_C = 1.55 Mbit/s / 1 Gbit/s.
    CHECK(r.window_exact.count() * 1'000'000'000 >= 1'550'000 * cycle.count());
    CHECK(r.config.gcl_sl->windows[0].width() >= quantize_up(TimeNs{r.window_applied.count() * 5 / 4}, Macrotick{}));
    CHECK(r.config.gcl_sl->base_offset == floor_mod(20_ms, cycle));
    CHECK(build_gcl(*r.config.gcl_sl).ok());
  }
}

TEST_CASE("validate_sweep") {
  SweepSpec s = preset("fig5");
  s.values = {5'000'000, 10'000'000, 7'000'000};
  CHECK_FALSE(validate_sweep(s).empty());
  s.values.clear();
  CHECK_FALSE(validate_sweep(s).empty());
  s = preset("fig6");
  s.sl_window_margin = -0.1;
  CHECK_FALSE(validate_sweep(s).empty());
  TempDir tmp;
  CHECK_THROWS_AS(run_sweep(s, tmp.path), Error);
}

TEST_CASE("small sweep writes a reproducible tree") {
  TempDir tmp;
  SweepSpec s = preset("fig5");
  s.values = {5'000'000, 20'000'000};
  s.base.duration = 2_s;
  s.base.drain = 100_ms;
  const SweepOutcome out = run_sweep(s, tmp.path, 2);
  REQUIRE(out.all_ok());
  REQUIRE(out.runs.size() == 2);

  const std::string manifest = read_file(tmp.path / "manifest.csv");
  CHECK(manifest.rfind("index,kind,value,seed,config_hash,status,dir,window_exact_ns,window_applied_ns\n", 0) == 0);
  CHECK(manifest.find("run_01") != std::string::npos);
  for (const char* f : {"summary.csv", "combined_cdf.csv", "combined_ccdf.csv"}) CHECK(fs::exists(tmp.path / f));
  for (const char* f : {"config.json", "probe_ms_pcp2.csv", "probe_sl_pcp2.csv", "summary.csv", "latency.csv", "cdf.csv",
                        "ccdf.csv", "clusters.csv", "clusters_scheduled.csv"})
    CHECK(fs::exists(tmp.path / "run_00" / f));
  // With delta = 5 ms every fitted draw misses the window by at least one cycle.
  REQUIRE(out.runs[0].scheduled.has_value());
  CHECK(out.runs[0].scheduled->jumped() > 0.99);
  CHECK(out.runs[1].scheduled->fraction(0) == 1.0);

  // The stored config alone reproduces the run.
  const fs::path run = tmp.path / "run_01";
  const ExperimentConfig cfg = load_config({run / "config.json"});
  CHECK(config_hash(cfg) == out.runs[1].config_hash);
  const RunResult again = simulate(cfg);
  CHECK(probe_csv(again.probes.at(NodeId::SL).at(2)) == read_file(run / "probe_sl_pcp2.csv"));

  // Joining the written probes recovers the engine's latencies.
  const auto joined = join_probes(read_probe_csv(run / "probe_ms_pcp2.csv"), read_probe_csv(run / "probe_sl_pcp2.csv"));
  CHECK(joined.series.samples == again.latency(2).samples);
}
