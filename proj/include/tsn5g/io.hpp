#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tsn5g/planner.hpp"
#include "tsn5g/sim_engine.hpp"
#include "tsn5g/trace_analysis.hpp"

namespace tsn5g {

namespace fs = std::filesystem;
using nlohmann::json;

// Experiment config (JSON, schema version 1). Times are integer ns.
json to_json(const ExperimentConfig& cfg);
/// Relative "csv" paths inside empirical bridge models resolve against base_dir.
ExperimentConfig config_from_json(const json& j, const fs::path& base_dir = {});
ExperimentConfig load_config(const std::vector<fs::path>& files);

json to_json(const GclSpec& g);
GclSpec gcl_from_json(const json& j);
json to_json(const DelayVariant& v);
DelayVariant delay_from_json(const json& j, const fs::path& base_dir = {});

/// Plan fragment: the plan itself plus gcl_ms / gcl_sl keys that merge
/// into an experiment config.
json plan_fragment(const SchedulePlan& plan, int dc_pcp, int be_pcp, Macrotick mt);

std::uint64_t config_hash(const ExperimentConfig& cfg);

// CSV formats.
std::vector<ProbeRecord> read_probe_csv(const fs::path& path);
std::string probe_csv(const std::vector<ProbeRecord>& records);
std::vector<TimeNs> read_delay_csv(const fs::path& path);
std::string delay_csv(const std::vector<TimeNs>& delays);
std::string distribution_csv(const std::vector<DistPoint>& points);
std::string cluster_csv(const IciReport& report);
std::string run_summary_csv(const RunResult& r);

/// Writes via a temporary file and rename so readers never see partial files.
void write_file_atomic(const fs::path& path, std::string_view content);
std::string read_file(const fs::path& path);

/// Probe CSVs per point and pcp plus summary.csv.
void write_run_outputs(const RunResult& r, const fs::path& dir);
fs::path probe_path(const fs::path& dir, NodeId point, int pcp);

std::string format_probability(double p);

}  // namespace tsn5g
