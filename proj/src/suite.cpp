#include "crowdbench/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "crowdbench/bridge.hpp"
#include "crowdbench/errors.hpp"

namespace crowdbench {

std::string_view to_string(EpisodeSet set) {
  return set == EpisodeSet::invisible ? "invisible" : "visible";
}

namespace {

EpisodeSet parse_episode_set(std::string_view name) {
  if (name == "invisible") return EpisodeSet::invisible;
  if (name == "visible") return EpisodeSet::visible;
  throw IoError("unknown episode set: " + std::string(name));
}

std::uint64_t kind_index(ScenarioKind kind) {
  return static_cast<std::uint64_t>(
      std::find(kAllScenarioKinds.begin(), kAllScenarioKinds.end(), kind) -
      kAllScenarioKinds.begin());
}

bool is_builtin_name(std::string_view name) {
  try {
    parse_builtin_policy(name);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

struct Task {
  ScenarioKind kind;
  EpisodeSet set;
  std::uint32_t index;
};

std::vector<Task> schedule(const RunConfig& config) {
  std::vector<Task> tasks;
  std::vector<EpisodeSet> sets{EpisodeSet::invisible};
  if (config.visible_set) sets.push_back(EpisodeSet::visible);
  for (EpisodeSet set : sets) {
    for (const KindCount& kc : config.scenarios) {
      for (std::uint32_t i = 0; i < kc.episodes; ++i) tasks.push_back({kc.kind, set, i});
    }
  }
  return tasks;
}

std::string policy_display_name(const RunConfig& config) {
  if (is_builtin_name(config.policy)) return config.policy;
  return "bridge:" + config.policy;
}

}  // namespace

std::vector<KindCount> default_kind_counts() {
  std::vector<KindCount> out;
  for (ScenarioKind k : kAllScenarioKinds) out.push_back({k, is_single_human(k) ? 200u : 500u});
  return out;
}

void validate(const RunConfig& config) {
  if (config.scenarios.empty()) throw ConfigError("no scenario kinds selected");
  for (const KindCount& kc : config.scenarios) {
    if (kc.episodes < 1) throw ConfigError("episode count must be >= 1 for " + std::string(to_string(kc.kind)));
  }
  for (std::size_t i = 0; i < config.scenarios.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (config.scenarios[i].kind == config.scenarios[j].kind) {
        throw ConfigError("scenario kind listed twice: " + std::string(to_string(config.scenarios[i].kind)));
      }
    }
  }
  if (config.n_humans < 1) throw ConfigError("n_humans must be >= 1");
  if (!std::isfinite(config.s_y_r) || config.s_y_r == 0.0) throw ConfigError("s_y_r must be finite and non-zero");
  if (config.threads < 1) throw ConfigError("threads must be >= 1");
  if (config.action_timeout.count() <= 0) throw ConfigError("action timeout must be positive");
  try {
    validate(config.sim);
    validate(config.metrics);
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (!is_builtin_name(config.policy) && !parse_transport(config.policy)) {
    throw ConfigError("policy is neither a built-in name nor stdio:<command> / tcp:<port>: " +
                      config.policy);
  }
}

Json to_json(const RunConfig& c) {
  Json scenarios = Json::object();
  for (const KindCount& kc : c.scenarios) scenarios[std::string(to_string(kc.kind))] = kc.episodes;
  const ScenarioParams& s = c.scenario;
  return {{"scenarios", std::move(scenarios)},
          {"n_humans", c.n_humans},
          {"seed", c.master_seed},
          {"s_y_r", c.s_y_r},
          {"scenario_params",
           {{"human_radius", s.human_radius},
            {"robot_radius", s.robot_radius},
            {"human_speed", s.human_speed},
            {"robot_speed", s.robot_speed},
            {"overtaken_speed", s.overtaken_speed},
            {"ring_jitter", s.ring_jitter},
            {"strip_across", s.strip_across},
            {"strip_along", s.strip_along},
            {"overtake_lead_min", s.overtake_lead_min},
            {"overtake_lead_max", s.overtake_lead_max},
            {"overtake_goal_offset", s.overtake_goal_offset}}},
          {"sim", to_json(c.sim)},
          {"metrics", to_json(c.metrics)},
          {"policy", c.policy},
          {"visible_set", c.visible_set},
          {"action_timeout_ms", c.action_timeout.count()}};
}

RunConfig run_config_from_json(const Json& j, RunConfig c) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("scenarios")) {
      c.scenarios.clear();
      for (const auto& [name, count] : j.at("scenarios").items()) {
        const auto n = count.get<std::int64_t>();
        if (n < 1) throw ConfigError("episode count must be >= 1 for " + name);
        c.scenarios.push_back({parse_scenario_kind(name), static_cast<std::uint32_t>(n)});
      }
    }
    c.n_humans = j.value("n_humans", c.n_humans);
    c.master_seed = j.value("seed", c.master_seed);
    c.s_y_r = j.value("s_y_r", c.s_y_r);
    if (j.contains("scenario_params")) {
      const Json& p = j.at("scenario_params");
      ScenarioParams& s = c.scenario;
      s.human_radius = p.value("human_radius", s.human_radius);
      s.robot_radius = p.value("robot_radius", s.robot_radius);
      s.human_speed = p.value("human_speed", s.human_speed);
      s.robot_speed = p.value("robot_speed", s.robot_speed);
      s.overtaken_speed = p.value("overtaken_speed", s.overtaken_speed);
      s.ring_jitter = p.value("ring_jitter", s.ring_jitter);
      s.strip_across = p.value("strip_across", s.strip_across);
      s.strip_along = p.value("strip_along", s.strip_along);
      s.overtake_lead_min = p.value("overtake_lead_min", s.overtake_lead_min);
      s.overtake_lead_max = p.value("overtake_lead_max", s.overtake_lead_max);
      s.overtake_goal_offset = p.value("overtake_goal_offset", s.overtake_goal_offset);
    }
    if (j.contains("sim")) c.sim = sim_config_from_json(j.at("sim"), c.sim);
    if (j.contains("metrics")) c.metrics = metric_config_from_json(j.at("metrics"), c.metrics);
    c.policy = j.value("policy", c.policy);
    c.visible_set = j.value("visible_set", c.visible_set);
    if (j.contains("action_timeout_ms")) {
      c.action_timeout = std::chrono::milliseconds(j.at("action_timeout_ms").get<std::int64_t>());
    }
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    c.threads = j.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config: ") + e.what());
  }
  return c;
}

std::uint64_t episode_seed(std::uint64_t master, ScenarioKind kind, EpisodeSet set,
                           std::uint32_t index) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ (kind_index(kind) + 1));
  h = mix64(h ^ (set == EpisodeSet::visible ? 0x5649534942ull : 0x494e564953ull));
  return mix64(h ^ index);
}

std::string episode_id(ScenarioKind kind, EpisodeSet set, std::uint32_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04u", index);
  return std::string(to_string(kind)) + "/" + std::string(to_string(set)) + "/" + buf;
}

std::filesystem::path episode_log_path(ScenarioKind kind, EpisodeSet set, std::uint32_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04u.jsonl", index);
  return std::filesystem::path("logs") / std::string(to_string(kind)) /
         (std::string(to_string(set)) + buf);
}

std::vector<ReportRow> build_rows(const RunConfig& config, std::span<const EpisodeRecord> records,
                                  const std::string& policy_name) {
  std::vector<ReportRow> rows;
  for (const KindCount& kc : config.scenarios) {
    std::vector<MetricReport> invisible;
    std::vector<MetricReport> visible;
    for (const EpisodeRecord& r : records) {
      if (r.kind != kc.kind) continue;
      (r.set == EpisodeSet::invisible ? invisible : visible).push_back(r.metrics);
    }
    if (invisible.empty()) continue;
    const std::string kind(to_string(kc.kind));
    AggregateReport agg = aggregate(invisible, kind);
    if (!visible.empty()) agg = merge_visible(std::move(agg), aggregate(visible, kind));
    rows.push_back({kind, policy_name, std::move(agg)});
  }
  return rows;
}

namespace {

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> optional_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

Json episodes_json(std::span<const EpisodeRecord> records) {
  Json arr = Json::array();
  for (const EpisodeRecord& r : records) {
    const MetricReport& m = r.metrics;
    arr.push_back({{"id", m.episode_id},
                   {"kind", std::string(to_string(r.kind))},
                   {"set", std::string(to_string(r.set))},
                   {"index", r.index},
                   {"seed", r.seed},
                   {"outcome", std::string(to_string(m.outcome))},
                   {"abort_reason", r.abort_reason},
                   {"clipped_commands", r.clipped_commands},
                   {"robot_visible", m.robot_visible},
                   {"nav_time", m.nav_time},
                   {"horizon", m.horizon},
                   {"m1", optional_json(m.m1)},
                   {"m1_seconds", optional_json(m.m1_seconds)},
                   {"m2", optional_json(m.m2)},
                   {"m2_seconds", optional_json(m.m2_seconds)},
                   {"m3", optional_json(m.m3)},
                   {"m4", optional_json(m.m4)},
                   {"m5", optional_json(m.m5)},
                   {"m5_seconds", optional_json(m.m5_seconds)},
                   {"side", std::string(to_string(m.side_label))}});
  }
  return arr;
}

namespace {

EpisodeRecord record_from_json(const Json& j) {
  EpisodeRecord r;
  r.kind = parse_scenario_kind(j.at("kind").get<std::string>());
  r.set = parse_episode_set(j.at("set").get<std::string>());
  r.index = j.at("index").get<std::uint32_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.abort_reason = j.at("abort_reason").get<std::string>();
  r.clipped_commands = j.at("clipped_commands").get<std::uint64_t>();
  MetricReport& m = r.metrics;
  m.episode_id = j.at("id").get<std::string>();
  m.kind = r.kind;
  m.outcome = parse_outcome(j.at("outcome").get<std::string>());
  m.robot_visible = j.at("robot_visible").get<bool>();
  m.nav_time = j.at("nav_time").get<double>();
  m.horizon = j.at("horizon").get<double>();
  m.m1 = optional_from(j.at("m1"));
  m.m1_seconds = optional_from(j.at("m1_seconds"));
  m.m2 = optional_from(j.at("m2"));
  m.m2_seconds = optional_from(j.at("m2_seconds"));
  m.m3 = optional_from(j.at("m3"));
  m.m4 = optional_from(j.at("m4"));
  m.m5 = optional_from(j.at("m5"));
  m.m5_seconds = optional_from(j.at("m5_seconds"));
  m.side_label = parse_side_label(j.at("side").get<std::string>());
  return r;
}

}  // namespace

std::string episodes_csv(std::span<const EpisodeRecord> records) {
  std::string out =
      "id,kind,set,index,seed,outcome,nav_time,horizon,m1,m1_seconds,m2,m2_seconds,m3,m4,m5,"
      "m5_seconds,side,clipped_commands\n";
  for (const EpisodeRecord& r : records) {
    const MetricReport& m = r.metrics;
    out += m.episode_id + ',' + std::string(to_string(r.kind)) + ',' +
           std::string(to_string(r.set)) + ',' + std::to_string(r.index) + ',' +
           std::to_string(r.seed) + ',' + std::string(to_string(m.outcome)) + ',' +
           format_double(m.nav_time) + ',' + format_double(m.horizon) + ',' + csv_optional(m.m1) +
           ',' + csv_optional(m.m1_seconds) + ',' + csv_optional(m.m2) + ',' +
           csv_optional(m.m2_seconds) + ',' + csv_optional(m.m3) + ',' + csv_optional(m.m4) + ',' +
           csv_optional(m.m5) + ',' + csv_optional(m.m5_seconds) + ',' +
           std::string(to_string(m.side_label)) + ',' + std::to_string(r.clipped_commands) + '\n';
  }
  return out;
}

Json manifest_json(const RunConfig& config, std::span<const EpisodeRecord> records,
                   const std::string& policy_name) {
  Json episodes = Json::array();
  std::map<std::string, std::size_t> outcomes;
  for (Outcome o : {Outcome::success, Outcome::collision, Outcome::timeout, Outcome::aborted}) {
    outcomes[std::string(to_string(o))] = 0;
  }
  for (const EpisodeRecord& r : records) {
    ++outcomes[std::string(to_string(r.metrics.outcome))];
    episodes.push_back({{"id", r.metrics.episode_id},
                        {"kind", std::string(to_string(r.kind))},
                        {"set", std::string(to_string(r.set))},
                        {"index", r.index},
                        {"seed", r.seed},
                        {"outcome", std::string(to_string(r.metrics.outcome))},
                        {"log", episode_log_path(r.kind, r.set, r.index).generic_string()}});
  }
  Json counts = Json::object();
  for (const auto& [name, n] : outcomes) counts[name] = n;
  return {{"artifact", "crowdbench"},
          {"version", kArtifactVersion},
          {"config", to_json(config)},
          {"policy_name", policy_name},
          {"episode_count", records.size()},
          {"outcome_counts", std::move(counts)},
          {"episodes", std::move(episodes)}};
}

namespace {

std::string iso_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::unique_ptr<RobotPolicy> make_policy(const RunConfig& config, TcpListener* listener) {
  if (is_builtin_name(config.policy)) {
    OrcaParams params = config.sim.orca;
    params.max_speed = config.sim.robot_max_speed;
    return make_builtin_policy(parse_builtin_policy(config.policy), params);
  }
  BridgeSettings settings;
  settings.dt = config.sim.dt;
  settings.robot_max_speed = config.sim.robot_max_speed;
  settings.robot_radius = config.scenario.robot_radius;
  settings.action_timeout = config.action_timeout;
  return std::make_unique<BridgePolicy>(*parse_transport(config.policy), settings, listener);
}

void write_reports(const std::filesystem::path& dir, std::span<const ReportRow> rows) {
  write_text_file(dir / "report.md", emit_report(rows, ReportFormat::markdown));
  write_text_file(dir / "report.csv", emit_report(rows, ReportFormat::csv));
  write_text_file(dir / "report.json", emit_report(rows, ReportFormat::json));
}

}  // namespace

SuiteResult run_suite(const RunConfig& config, const ProgressFn& progress) {
  validate(config);
  const std::string started = iso_now();
  const std::vector<Task> tasks = schedule(config);

  std::unique_ptr<TcpListener> listener;
  if (const auto t = parse_transport(config.policy); t && t->kind == Transport::Kind::tcp) {
    listener = std::make_unique<TcpListener>(t->port);
  }

  SuiteResult result;
  result.episodes.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::mutex progress_mutex;

  const auto worker = [&] {
    try {
      auto policy = make_policy(config, listener.get());
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) break;
        {
          std::lock_guard lock(error_mutex);
          if (error) break;
        }
        const Task& task = tasks[i];
        const std::uint64_t seed = episode_seed(config.master_seed, task.kind, task.set, task.index);
        ScenarioSpec spec =
            sample_scenario(task.kind, config.n_humans, config.s_y_r, seed, config.scenario);
        SimConfig sim = config.sim;
        sim.robot_visible = task.set == EpisodeSet::visible;
        const EpisodeLog log =
            run_episode(spec, *policy, sim, episode_id(task.kind, task.set, task.index));
        if (!config.out_dir.empty()) {
          save_episode_log(config.out_dir / episode_log_path(task.kind, task.set, task.index), log);
        }
        EpisodeRecord& rec = result.episodes[i];
        rec.kind = task.kind;
        rec.set = task.set;
        rec.index = task.index;
        rec.seed = seed;
        rec.abort_reason = log.abort_reason;
        rec.clipped_commands = log.clipped_commands;
        rec.metrics = score_episode(log, config.metrics);
        const std::size_t d = ++done;
        if (progress) {
          std::lock_guard lock(progress_mutex);
          progress(d, tasks.size());
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };

  const unsigned n_threads =
      static_cast<unsigned>(std::min<std::size_t>(config.threads, std::max<std::size_t>(tasks.size(), 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  for (const EpisodeRecord& r : result.episodes) result.aborted += r.metrics.outcome == Outcome::aborted;
  const std::string policy_name = policy_display_name(config);
  result.rows = build_rows(config, result.episodes, policy_name);

  if (!config.out_dir.empty()) {
    const auto& dir = config.out_dir;
    write_text_file(dir / "manifest.json",
                    manifest_json(config, result.episodes, policy_name).dump(2) + "\n");
    write_text_file(dir / "episodes.json", episodes_json(result.episodes).dump(1) + "\n");
    write_text_file(dir / "episodes.csv", episodes_csv(result.episodes));
    write_reports(dir, result.rows);
    write_text_file(dir / "timestamps.json",
                    Json{{"started", started}, {"finished", iso_now()}}.dump(2) + "\n");
  }
  return result;
}

RescoreResult rescore_run(const std::filesystem::path& out_dir) {
  RescoreResult out;
  Json manifest;
  Json recorded;
  try {
    manifest = Json::parse(read_text_file(out_dir / "manifest.json"));
    recorded = Json::parse(read_text_file(out_dir / "episodes.json"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cannot parse run metadata: ") + e.what());
  }
  const RunConfig config = run_config_from_json(manifest.at("config"));
  const std::string policy_name = manifest.at("policy_name").get<std::string>();

  std::vector<EpisodeRecord> stored;
  for (const Json& j : recorded) stored.push_back(record_from_json(j));
  const Json& listed = manifest.at("episodes");
  if (listed.size() != stored.size()) {
    out.mismatches.push_back("manifest and episodes.json list different episode counts");
    return out;
  }

  std::vector<EpisodeRecord> rescored;
  for (std::size_t i = 0; i < listed.size(); ++i) {
    const Json& entry = listed[i];
    const EpisodeLog log = load_episode_log(out_dir / entry.at("log").get<std::string>());
    EpisodeRecord rec = stored[i];
    rec.metrics = score_episode(log, config.metrics);
    rec.abort_reason = log.abort_reason;
    rec.clipped_commands = log.clipped_commands;
    if (log.spec.seed != rec.seed) out.mismatches.push_back(rec.metrics.episode_id + ": seed differs");
    if (!(rec == stored[i])) out.mismatches.push_back(rec.metrics.episode_id + ": metrics differ");
    rescored.push_back(std::move(rec));
    ++out.episodes;
  }

  const auto rows = build_rows(config, rescored, policy_name);
  for (const auto& [file, format] : {std::pair{"report.md", ReportFormat::markdown},
                                     std::pair{"report.csv", ReportFormat::csv},
                                     std::pair{"report.json", ReportFormat::json}}) {
    if (read_text_file(out_dir / file) != emit_report(rows, format)) {
      out.mismatches.push_back(std::string(file) + " differs from the re-scored aggregate");
    }
  }
  return out;
}

}  // namespace crowdbench
