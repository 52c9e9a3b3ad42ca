#include "crowdbench/episode_io.hpp"

#include <fstream>
#include <sstream>

#include "crowdbench/errors.hpp"

namespace crowdbench {

Json to_json(const Vec2& v) { return Json::array({v.x, v.y}); }

Vec2 vec2_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw IoError("expected [x, y], got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const ScenarioSpec& spec) {
  Json humans = Json::array();
  for (const HumanSpec& h : spec.humans) {
    humans.push_back({{"start", to_json(h.start)},
                      {"goal", to_json(h.goal)},
                      {"preferred_speed", h.preferred_speed},
                      {"radius", h.radius}});
  }
  return {{"kind", std::string(to_string(spec.kind))},
          {"seed", spec.seed},
          {"robot_start", to_json(spec.robot_start)},
          {"robot_goal", to_json(spec.robot_goal)},
          {"robot_radius", spec.robot_radius},
          {"robot_preferred_speed", spec.robot_preferred_speed},
          {"robot_visible", spec.robot_visible},
          {"humans", std::move(humans)}};
}

ScenarioSpec scenario_spec_from_json(const Json& j) {
  ScenarioSpec spec;
  spec.kind = parse_scenario_kind(j.at("kind").get<std::string>());
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.robot_start = vec2_from_json(j.at("robot_start"));
  spec.robot_goal = vec2_from_json(j.at("robot_goal"));
  spec.robot_radius = j.at("robot_radius").get<double>();
  spec.robot_preferred_speed = j.at("robot_preferred_speed").get<double>();
  spec.robot_visible = j.at("robot_visible").get<bool>();
  for (const Json& h : j.at("humans")) {
    spec.humans.push_back({vec2_from_json(h.at("start")), vec2_from_json(h.at("goal")),
                           h.at("preferred_speed").get<double>(), h.at("radius").get<double>()});
  }
  return spec;
}

Json to_json(const OrcaParams& p) {
  return {{"neighbor_dist", p.neighbor_dist},
          {"time_horizon_agents", p.time_horizon_agents},
          {"max_speed", p.max_speed},
          {"max_neighbors", p.max_neighbors}};
}

OrcaParams orca_params_from_json(const Json& j, OrcaParams p) {
  p.neighbor_dist = j.value("neighbor_dist", p.neighbor_dist);
  p.time_horizon_agents = j.value("time_horizon_agents", p.time_horizon_agents);
  p.max_speed = j.value("max_speed", p.max_speed);
  p.max_neighbors = j.value("max_neighbors", p.max_neighbors);
  return p;
}

Json to_json(const SimConfig& c) {
  return {{"dt", c.dt},
          {"time_limit", c.time_limit},
          {"goal_tolerance", c.goal_tolerance},
          {"robot_visible", c.robot_visible},
          {"robot_max_speed", c.robot_max_speed},
          {"orca", to_json(c.orca)}};
}

SimConfig sim_config_from_json(const Json& j, SimConfig c) {
  c.dt = j.value("dt", c.dt);
  c.time_limit = j.value("time_limit", c.time_limit);
  c.goal_tolerance = j.value("goal_tolerance", c.goal_tolerance);
  c.robot_visible = j.value("robot_visible", c.robot_visible);
  c.robot_max_speed = j.value("robot_max_speed", c.robot_max_speed);
  if (j.contains("orca")) c.orca = orca_params_from_json(j.at("orca"), c.orca);
  return c;
}

Json to_json(const MetricConfig& m) {
  return {{"epsilon", m.epsilon},
          {"projection_horizon", m.projection_horizon},
          {"speed_limit", m.speed_limit},
          {"side_rule", m.side_rule == SideRule::majority ? "majority" : "last_approach_frame"}};
}

MetricConfig metric_config_from_json(const Json& j, MetricConfig m) {
  m.epsilon = j.value("epsilon", m.epsilon);
  m.projection_horizon = j.value("projection_horizon", m.projection_horizon);
  m.speed_limit = j.value("speed_limit", m.speed_limit);
  if (j.contains("side_rule")) {
    const auto rule = j.at("side_rule").get<std::string>();
    if (rule == "majority") {
      m.side_rule = SideRule::majority;
    } else if (rule == "last_approach_frame") {
      m.side_rule = SideRule::last_approach_frame;
    } else {
      throw ConfigError("unknown side_rule: " + rule);
    }
  }
  return m;
}

void write_episode_log(std::ostream& out, const EpisodeLog& log) {
  const Json header{{"type", "header"},
                    {"format", kEpisodeLogFormat},
                    {"episode_id", log.episode_id},
                    {"policy", log.policy_name},
                    {"spec", to_json(log.spec)},
                    {"config", to_json(log.config)}};
  out << header.dump() << '\n';

  for (const Frame& frame : log.frames) {
    Json p = Json::array();
    Json v = Json::array();
    for (const AgentSnapshot& a : frame.agents) {
      p.push_back(to_json(a.position));
      v.push_back(to_json(a.velocity));
    }
    const Json line{{"step", frame.step}, {"p", std::move(p)}, {"v", std::move(v)}};
    out << line.dump() << '\n';
  }

  Json contacts = Json::array();
  for (const HumanContact& c : log.human_contacts) contacts.push_back({c.step, c.first, c.second});
  const Json outcome{{"type", "outcome"},
                     {"outcome", std::string(to_string(log.outcome))},
                     {"abort_reason", log.abort_reason},
                     {"robot_nav_time", log.robot_nav_time},
                     {"human_nav_times", log.human_nav_times},
                     {"human_contacts", std::move(contacts)},
                     {"clipped_commands", log.clipped_commands}};
  out << outcome.dump() << '\n';
}

EpisodeLog read_episode_log(std::istream& in) {
  EpisodeLog log;
  std::string line;
  bool have_header = false;
  bool have_outcome = false;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (have_outcome) throw IoError("content after outcome record");
      const Json j = Json::parse(line);
      if (!have_header) {
        if (j.value("type", "") != "header") throw IoError("missing header record");
        if (j.at("format").get<int>() != kEpisodeLogFormat) throw IoError("unsupported log format");
        log.episode_id = j.at("episode_id").get<std::string>();
        log.policy_name = j.at("policy").get<std::string>();
        log.spec = scenario_spec_from_json(j.at("spec"));
        log.config = sim_config_from_json(j.at("config"));
        have_header = true;
        continue;
      }
      if (j.contains("type")) {
        if (j.at("type") != "outcome") throw IoError("unexpected record type");
        log.outcome = parse_outcome(j.at("outcome").get<std::string>());
        log.abort_reason = j.at("abort_reason").get<std::string>();
        log.robot_nav_time = j.at("robot_nav_time").get<double>();
        log.human_nav_times = j.at("human_nav_times").get<std::vector<double>>();
        for (const Json& c : j.at("human_contacts")) {
          log.human_contacts.push_back(
              {c.at(0).get<std::uint64_t>(), c.at(1).get<std::uint32_t>(), c.at(2).get<std::uint32_t>()});
        }
        log.clipped_commands = j.at("clipped_commands").get<std::uint64_t>();
        have_outcome = true;
        continue;
      }
      Frame frame;
      frame.step = j.at("step").get<std::uint64_t>();
      const Json& p = j.at("p");
      const Json& v = j.at("v");
      if (p.size() != v.size() || p.size() != log.spec.humans.size() + 1) {
        throw IoError("frame agent count does not match the scenario");
      }
      for (std::size_t i = 0; i < p.size(); ++i) {
        frame.agents.push_back({vec2_from_json(p[i]), vec2_from_json(v[i])});
      }
      log.frames.push_back(std::move(frame));
    }
  } catch (const IoError& e) {
    throw IoError("episode log line " + std::to_string(line_no) + ": " + e.what());
  } catch (const std::exception& e) {
    throw IoError("episode log line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header || !have_outcome) throw IoError("truncated episode log");
  if (log.frames.empty()) throw IoError("episode log has no frames");
  return log;
}

std::string serialize_episode_log(const EpisodeLog& log) {
  std::ostringstream out;
  write_episode_log(out, log);
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void save_episode_log(const std::filesystem::path& path, const EpisodeLog& log) {
  write_text_file(path, serialize_episode_log(log));
}

EpisodeLog load_episode_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_episode_log(in);
}

}  // namespace crowdbench
