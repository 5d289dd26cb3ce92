#include "tsn5g/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsn5g/error.hpp"

namespace tsn5g {

namespace {

TimeNs ns_at(const json& j, const char* key, TimeNs fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return TimeNs{j.at(key).get<std::int64_t>()};
}

json ns_or_null(TimeNs t) { return t == TimeNs::max() ? json(nullptr) : json(t.count()); }

NodeId node_at(const json& j) {
  auto s = j.get<std::string>();
  auto n = node_from_string(s);
  if (!n) throw Error(ErrorCode::ConfigInvalid, "unknown node '" + s + "'");
  return *n;
}

json base_to_json(const BaseDelay& b) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantDelay>) {
          return {{"type", "constant"}, {"delay_ns", v.delay.count()}};
        } else if constexpr (std::is_same_v<T, EmpiricalDelay>) {
          json s = json::array();
          for (TimeNs t : v.sorted) s.push_back(t.count());
          return {{"type", "empirical"}, {"samples_ns", s}};
        } else {
          json o = {{"type", "lognormal"}, {"shift_ns", v.shift.count()}, {"mu", v.mu}, {"sigma", v.sigma}};
          o["cap_ns"] = v.cap ? json(v.cap->count()) : json(nullptr);
          return o;
        }
      },
      b);
}

BaseDelay base_from_json(const json& j, const fs::path& base_dir) {
  const auto type = j.at("type").get<std::string>();
  if (type == "constant") return ConstantDelay{TimeNs{j.at("delay_ns").get<std::int64_t>()}};
  if (type == "empirical") {
    std::vector<TimeNs> samples;
    if (j.contains("csv")) {
      fs::path p = j.at("csv").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      samples = read_delay_csv(p);
    } else {
      for (const auto& v : j.at("samples_ns")) samples.emplace_back(v.get<std::int64_t>());
    }
    return EmpiricalDelay::from_unsorted(std::move(samples));
  }
  if (type == "lognormal") {
    ShiftedLognormal m{TimeNs{j.at("shift_ns").get<std::int64_t>()}, j.at("mu").get<double>(),
                       j.at("sigma").get<double>(), std::nullopt};
    if (j.contains("cap_ns") && !j.at("cap_ns").is_null()) m.cap = TimeNs{j.at("cap_ns").get<std::int64_t>()};
    return m;
  }
  if (type == "synthetic") {
    SyntheticTargets t;
    t.shift = ns_at(j, "shift_ns", t.shift);
    t.cap = ns_at(j, "cap_ns", t.cap);
    t.mean = ns_at(j, "mean_ns", t.mean);
    t.percentile_value = ns_at(j, "percentile_value_ns", t.percentile_value);
    t.percentile = j.value("percentile", t.percentile);
    return fit_synthetic(t);
  }
  throw Error(ErrorCode::ConfigInvalid, "unknown delay model type '" + type + "'");
}

}  // namespace

json to_json(const DelayVariant& v) {
  if (const auto* tdd = std::get_if<TddAligned>(&v))
    return {{"type", "tdd"},
            {"slot_ns", tdd->slot_len.count()},
            {"pattern", format_tdd_pattern(tdd->pattern)},
            {"base", base_to_json(tdd->base)}};
  return std::visit(
      [](const auto& b) -> json {
        if constexpr (std::is_same_v<std::decay_t<decltype(b)>, TddAligned>)
          return nullptr;
        else
          return base_to_json(BaseDelay{b});
      },
      v);
}

DelayVariant delay_from_json(const json& j, const fs::path& base_dir) {
  if (j.at("type").get<std::string>() == "tdd") {
    TddAligned t;
    t.slot_len = TimeNs{j.at("slot_ns").get<std::int64_t>()};
    t.pattern = parse_tdd_pattern(j.at("pattern").get<std::string>());
    t.base = j.contains("base") ? base_from_json(j.at("base"), base_dir) : BaseDelay{ConstantDelay{}};
    return t;
  }
  return std::visit([](auto&& b) -> DelayVariant { return b; }, base_from_json(j, base_dir));
}

json to_json(const GclSpec& g) {
  json w = json::array();
  for (const auto& x : g.windows) w.push_back({{"pcp", x.pcp}, {"open_ns", x.open_at.count()}, {"close_ns", x.close_at.count()}});
  return {{"cycle_ns", g.cycle.count()},
          {"base_offset_ns", g.base_offset.count()},
          {"guard_ns", g.guard.count()},
          {"macrotick_ns", g.macrotick.m.count()},
          {"windows", w}};
}

GclSpec gcl_from_json(const json& j) {
  GclSpec g;
  g.cycle = ns_at(j, "cycle_ns", g.cycle);
  g.base_offset = ns_at(j, "base_offset_ns", g.base_offset);
  g.guard = ns_at(j, "guard_ns", g.guard);
  g.macrotick.m = ns_at(j, "macrotick_ns", g.macrotick.m);
  for (const auto& w : j.at("windows"))
    g.windows.push_back({w.at("pcp").get<int>(), TimeNs{w.at("open_ns").get<std::int64_t>()},
                         TimeNs{w.at("close_ns").get<std::int64_t>()}});
  return g;
}

json to_json(const ExperimentConfig& cfg) {
  json nodes = json::array();
  for (const auto& n : cfg.topology.nodes)
    nodes.push_back({{"id", std::string(to_string(n.id))}, {"proc_ns", n.proc_delay.count()}});
  json links = json::array();
  for (const auto& l : cfg.topology.links)
    links.push_back({{"from", std::string(to_string(l.from))},
                     {"to", std::string(to_string(l.to))},
                     {"bandwidth_bps", l.bandwidth_bps},
                     {"prop_ns", l.prop_delay.count()}});
  json path = json::array();
  for (NodeId n : cfg.topology.path) path.push_back(std::string(to_string(n)));

  json streams = json::array();
  for (const auto& s : cfg.streams) {
    json o = {{"kind", s.kind == StreamKind::DC ? "DC" : "BE"}, {"pcp", s.pcp}, {"packet_len_bytes", s.packet_len_bytes}};
    if (s.kind == StreamKind::DC) {
      o["burst_size"] = s.burst_size;
      o["app_cycle_ns"] = s.app_cycle.count();
      o["delay_budget_ns"] = ns_or_null(s.delay_budget);
      o["phase_ns"] = s.phase.count();
      o["mode"] = s.mode == DcMode::Backlog ? "backlog" : "burst";
    } else {
      o["rate_bps"] = s.rate_bps;
    }
    streams.push_back(o);
  }
  json queues = json::array();
  for (const auto& q : cfg.queues) queues.push_back({{"pcp", q.pcp}, {"capacity_bytes", q.capacity_bytes}});

  json per_pcp = json::object();
  for (const auto& [pcp, v] : cfg.bridge.per_pcp) per_pcp[std::to_string(pcp)] = to_json(v);
  json bridge = {{"preserve_order", cfg.bridge.preserve_order},
                 {"load_ns_per_byte", cfg.bridge.load_ns_per_byte},
                 {"per_pcp", per_pcp}};
  bridge["default"] = cfg.bridge.fallback ? to_json(*cfg.bridge.fallback) : json(nullptr);

  json probes = json::array();
  for (NodeId n : cfg.probe_points) probes.push_back(std::string(to_string(n)));

  return {{"version", cfg.version},
          {"topology", {{"nodes", nodes}, {"links", links}, {"path", path}}},
          {"streams", streams},
          {"queues", queues},
          {"default_queue_bytes", cfg.default_queue_bytes},
          {"gcl_ms", cfg.gcl_ms ? to_json(*cfg.gcl_ms) : json(nullptr)},
          {"gcl_sl", cfg.gcl_sl ? to_json(*cfg.gcl_sl) : json(nullptr)},
          {"bridge", bridge},
          {"duration_ns", cfg.duration.count()},
          {"drain_ns", cfg.drain.count()},
          {"seed", cfg.seed},
          {"probe_points", probes},
          {"output_dir", cfg.output_dir}};
}

ExperimentConfig config_from_json(const json& j, const fs::path& base_dir) {
  try {
    ExperimentConfig cfg;
    cfg.version = j.value("version", 0);
    if (cfg.version != 1) throw Error(ErrorCode::ConfigInvalid, "config 'version' must be 1");
    if (j.contains("topology")) {
      const json& t = j.at("topology");
      cfg.topology.nodes.clear();
      for (const auto& n : t.at("nodes")) cfg.topology.nodes.push_back({node_at(n.at("id")), ns_at(n, "proc_ns", TimeNs{0})});
      cfg.topology.links.clear();
      for (const auto& l : t.at("links"))
        cfg.topology.links.push_back({node_at(l.at("from")), node_at(l.at("to")), l.at("bandwidth_bps").get<std::int64_t>(),
                                      ns_at(l, "prop_ns", TimeNs{0})});
      if (t.contains("path")) {
        cfg.topology.path.clear();
        for (const auto& n : t.at("path")) cfg.topology.path.push_back(node_at(n));
      }
    }
    for (const auto& s : j.value("streams", json::array())) {
      StreamSpec st;
      const auto kind = s.at("kind").get<std::string>();
      if (kind != "DC" && kind != "BE") throw Error(ErrorCode::ConfigInvalid, "stream kind must be DC or BE");
      st.kind = kind == "DC" ? StreamKind::DC : StreamKind::BE;
      st.pcp = s.at("pcp").get<int>();
      st.packet_len_bytes = s.at("packet_len_bytes").get<std::int64_t>();
      if (st.kind == StreamKind::DC) {
        st.burst_size = s.value("burst_size", 1);
        st.app_cycle = ns_at(s, "app_cycle_ns", st.app_cycle);
        st.delay_budget = ns_at(s, "delay_budget_ns", TimeNs::max());
        st.phase = ns_at(s, "phase_ns", TimeNs{0});
        const auto mode = s.value("mode", std::string("burst"));
        if (mode != "burst" && mode != "backlog") throw Error(ErrorCode::ConfigInvalid, "DC mode must be burst or backlog");
        st.mode = mode == "backlog" ? DcMode::Backlog : DcMode::Burst;
      } else {
        st.rate_bps = s.at("rate_bps").get<std::int64_t>();
      }
      cfg.streams.push_back(st);
    }
    for (const auto& q : j.value("queues", json::array()))
      cfg.queues.push_back({q.at("pcp").get<int>(), q.at("capacity_bytes").get<std::int64_t>()});
    cfg.default_queue_bytes = j.value("default_queue_bytes", cfg.default_queue_bytes);
    if (j.contains("gcl_ms") && !j.at("gcl_ms").is_null()) cfg.gcl_ms = gcl_from_json(j.at("gcl_ms"));
    if (j.contains("gcl_sl") && !j.at("gcl_sl").is_null()) cfg.gcl_sl = gcl_from_json(j.at("gcl_sl"));
    if (j.contains("bridge")) {
      const json& b = j.at("bridge");
      cfg.bridge.preserve_order = b.value("preserve_order", true);
      cfg.bridge.load_ns_per_byte = b.value("load_ns_per_byte", 0.0);
      const json per_pcp = b.value("per_pcp", json::object());
      for (const auto& [k, v] : per_pcp.items())
        cfg.bridge.per_pcp[std::stoi(k)] = delay_from_json(v, base_dir);
      if (b.contains("default") && !b.at("default").is_null()) cfg.bridge.fallback = delay_from_json(b.at("default"), base_dir);
    }
    cfg.duration = ns_at(j, "duration_ns", cfg.duration);
    cfg.drain = ns_at(j, "drain_ns", cfg.drain);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("probe_points")) {
      cfg.probe_points.clear();
      for (const auto& n : j.at("probe_points")) cfg.probe_points.push_back(node_at(n));
    }
    cfg.output_dir = j.value("output_dir", std::string());
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, e.what());
  }
}

ExperimentConfig load_config(const std::vector<fs::path>& files) {
  if (files.empty()) throw Error(ErrorCode::ConfigInvalid, "no config file given");
  json merged = json::object();
  for (const auto& f : files) {
    json part;
    try {
      part = json::parse(read_file(f));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ConfigInvalid, f.string() + ": " + e.what());
    }
    merged.merge_patch(part);
  }
  return config_from_json(merged, files.front().parent_path());
}

json plan_fragment(const SchedulePlan& plan, int dc_pcp, int be_pcp, Macrotick mt) {
  return {{"plan",
           {{"cycle_ns", plan.cycle.count()},
            {"w_dc_ns", plan.w_dc.count()},
            {"w_be_ns", plan.w_be.count()},
            {"guard_ns", plan.guard.count()},
            {"w_dc_sl_ns", plan.w_dc_sl.count()},
            {"offset_ns", plan.offset.count()},
            {"offset_in_cycle_ns", plan.offset_in_cycle.count()},
            {"d_hat_ns", plan.d_hat.count()},
            {"uncertainty_width_ns", plan.uncertainty_width.count()},
            {"ici_risk", std::string(to_string(plan.ici_risk))}}},
          {"gcl_ms", to_json(plan_gcl_ms(plan, dc_pcp, be_pcp, mt))},
          {"gcl_sl", to_json(plan_gcl_sl(plan, dc_pcp, be_pcp, mt))}};
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(cfg).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "rename to " + path.string() + ": " + ec.message());
}

namespace {
std::vector<std::string_view> csv_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

template <typename T>
T parse_field(std::string_view s, const fs::path& path, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw Error(ErrorCode::BadInput, path.string() + ":" + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  return v;
}
}  // namespace

std::vector<ProbeRecord> read_probe_csv(const fs::path& path) {
  const std::string text = read_file(path);
  const auto lines = csv_lines(text);
  if (lines.empty() || lines[0] != "seq,egress_ns")
    throw Error(ErrorCode::BadInput, path.string() + ": expected header 'seq,egress_ns'");
  std::vector<ProbeRecord> out;
  out.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto comma = lines[i].find(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::BadInput, path.string() + ": missing comma");
    out.push_back({parse_field<std::uint32_t>(lines[i].substr(0, comma), path, i + 1),
                   TimeNs{static_cast<std::int64_t>(parse_field<std::uint64_t>(lines[i].substr(comma + 1), path, i + 1))}});
  }
  return out;
}

std::string probe_csv(const std::vector<ProbeRecord>& records) {
  std::string s = "seq,egress_ns\n";
  s.reserve(records.size() * 20 + s.size());
  for (const auto& r : records) {
    s += std::to_string(r.seq);
    s += ',';
    s += std::to_string(r.egress.count());
    s += '\n';
  }
  return s;
}

std::vector<TimeNs> read_delay_csv(const fs::path& path) {
  const std::string text = read_file(path);
  const auto lines = csv_lines(text);
  if (lines.empty() || lines[0] != "delay_ns") throw Error(ErrorCode::BadInput, path.string() + ": expected header 'delay_ns'");
  std::vector<TimeNs> out;
  for (std::size_t i = 1; i < lines.size(); ++i)
    out.emplace_back(static_cast<std::int64_t>(parse_field<std::uint64_t>(lines[i], path, i + 1)));
  return out;
}

std::string delay_csv(const std::vector<TimeNs>& delays) {
  std::string s = "delay_ns\n";
  for (TimeNs d : delays) s += std::to_string(d.count()) + "\n";
  return s;
}

std::string format_probability(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", p);
  return buf;
}

std::string distribution_csv(const std::vector<DistPoint>& points) {
  std::string s = "x_ns,probability\n";
  for (const auto& p : points) s += std::to_string(p.x.count()) + "," + format_probability(p.y) + "\n";
  return s;
}

std::string cluster_csv(const IciReport& report) {
  std::string s = "k,fraction\n";
  for (const auto& c : report.clusters) s += std::to_string(c.k) + "," + format_probability(c.fraction) + "\n";
  return s;
}

std::string run_summary_csv(const RunResult& r) {
  std::ostringstream os;
  os << "key,value\n";
  os << "seed," << r.seed << "\n";
  os << "cycle_ns," << r.cycle.count() << "\n";
  for (const auto& [pcp, k] : r.k_by_pcp) os << "K_ns_pcp" << pcp << "," << k.count() << "\n";
  os << "packets_in," << r.packets_in << "\n";
  os << "packets_out," << r.packets_out << "\n";
  os << "still_queued," << r.still_queued << "\n";
  os << "in_transit," << r.in_transit << "\n";
  os << "dropped," << r.dropped << "\n";
  os << "events," << r.events << "\n";
  for (const auto& q : r.queues) {
    const std::string tag = "queue_" + std::string(to_string(q.node)) + "_pcp" + std::to_string(q.pcp);
    os << tag << "_capacity_bytes," << q.capacity_bytes << "\n";
    os << tag << "_enqueued," << q.enqueued << "\n";
    os << tag << "_dropped," << q.dropped << "\n";
    os << tag << "_max_occupancy_bytes," << q.max_occupancy_bytes << "\n";
    os << tag << "_still_queued," << q.still_queued << "\n";
  }
  return os.str();
}

fs::path probe_path(const fs::path& dir, NodeId point, int pcp) {
  std::string name = "probe_";
  name += point == NodeId::MS ? "ms" : "sl";
  name += "_pcp" + std::to_string(pcp) + ".csv";
  return dir / name;
}

void write_run_outputs(const RunResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& [point, by_pcp] : r.probes)
    for (const auto& [pcp, records] : by_pcp) write_file_atomic(probe_path(dir, point, pcp), probe_csv(records));
  write_file_atomic(dir / "summary.csv", run_summary_csv(r));
}

}  // namespace tsn5g
