#include "crowdbench/sim.hpp"

#include <cmath>

#include "crowdbench/errors.hpp"
#include "crowdbench/orca.hpp"

namespace crowdbench {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::success: return "success";
    case Outcome::collision: return "collision";
    case Outcome::timeout: return "timeout";
    case Outcome::aborted: return "aborted";
  }
  return "unknown";
}

Outcome parse_outcome(std::string_view name) {
  for (Outcome o : {Outcome::success, Outcome::collision, Outcome::timeout, Outcome::aborted}) {
    if (to_string(o) == name) return o;
  }
  throw InvalidInput("unknown outcome: " + std::string(name));
}

void validate(const SimConfig& config) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(config.dt)) throw InvalidInput("dt must be positive");
  if (!positive(config.time_limit) || !(config.time_limit > config.dt)) {
    throw InvalidInput("time_limit must exceed dt");
  }
  if (!positive(config.goal_tolerance)) throw InvalidInput("goal_tolerance must be positive");
  if (!positive(config.robot_max_speed)) throw InvalidInput("robot_max_speed must be positive");
  validate(config.orca);
}

double EpisodeLog::duration() const {
  return frames.empty() ? 0.0 : static_cast<double>(frames.back().step) * config.dt;
}

double EpisodeLog::horizon() const { return static_cast<double>(frames.size()) * config.dt; }

AgentState EpisodeLog::agent_state(std::size_t frame, std::size_t index) const {
  const AgentSnapshot& snap = frames.at(frame).agents.at(index);
  AgentState s;
  s.id = static_cast<AgentId>(index);
  s.position = snap.position;
  s.velocity = snap.velocity;
  if (index == 0) {
    s.kind = AgentKind::robot;
    s.radius = spec.robot_radius;
    s.goal = spec.robot_goal;
    s.preferred_speed = spec.robot_preferred_speed;
  } else {
    const HumanSpec& h = spec.humans.at(index - 1);
    s.kind = AgentKind::human;
    s.radius = h.radius;
    s.goal = h.goal;
    s.preferred_speed = h.preferred_speed;
  }
  return s;
}

namespace {

bool overlapping(const AgentState& a, const AgentState& b) {
  const double r = a.radius + b.radius;
  return abs_sq(a.position - b.position) < r * r;
}

bool within(const Vec2& p, const Vec2& goal, double tolerance) {
  return abs_sq(p - goal) < tolerance * tolerance;
}

Frame snapshot(std::uint64_t step, const std::vector<AgentState>& agents) {
  Frame f;
  f.step = step;
  f.agents.reserve(agents.size());
  for (const AgentState& a : agents) f.agents.push_back({a.position, a.velocity});
  return f;
}

}  // namespace

EpisodeLog run_episode(const ScenarioSpec& spec, RobotPolicy& policy, const SimConfig& config,
                       std::string episode_id) {
  validate(config);

  EpisodeLog log;
  log.episode_id = std::move(episode_id);
  log.spec = spec;
  log.spec.robot_visible = config.robot_visible;
  log.config = config;
  log.policy_name = policy.name();

  std::vector<AgentState> agents;
  agents.reserve(spec.humans.size() + 1);
  {
    AgentState robot;
    robot.id = 0;
    robot.kind = AgentKind::robot;
    robot.position = spec.robot_start;
    robot.goal = spec.robot_goal;
    robot.radius = spec.robot_radius;
    robot.preferred_speed = spec.robot_preferred_speed;
    agents.push_back(robot);
  }
  for (std::size_t i = 0; i < spec.humans.size(); ++i) {
    const HumanSpec& h = spec.humans[i];
    AgentState human;
    human.id = static_cast<AgentId>(i + 1);
    human.kind = AgentKind::human;
    human.position = h.start;
    human.goal = h.goal;
    human.radius = h.radius;
    human.preferred_speed = h.preferred_speed;
    agents.push_back(human);
  }
  for (const AgentState& a : agents) {
    require_finite(a.position, "start position");
    require_finite(a.goal, "goal position");
  }

  const std::size_t n_humans = spec.humans.size();
  std::vector<std::optional<double>> human_arrival(n_humans);
  for (std::size_t i = 0; i < n_humans; ++i) {
    if (within(agents[i + 1].position, agents[i + 1].goal, agents[i + 1].radius)) {
      human_arrival[i] = 0.0;
    }
  }
  log.frames.push_back(snapshot(0, agents));

  const auto finish = [&](Outcome outcome, std::string reason = {}) {
    const double elapsed = log.duration();
    log.outcome = outcome;
    log.abort_reason = std::move(reason);
    log.robot_nav_time = elapsed;
    log.human_nav_times.clear();
    for (const auto& arrival : human_arrival) log.human_nav_times.push_back(arrival.value_or(elapsed));
    log.clipped_commands += policy.take_clip_count();
  };

  try {
    policy.begin_episode({log.episode_id, std::string(to_string(spec.kind)), spec.seed, config.dt,
                          config.robot_max_speed});
  } catch (const PolicyError& e) {
    finish(Outcome::aborted, e.what());
    return log;
  }

  std::vector<Vec2> next_velocity(agents.size());
  std::vector<AgentState> neighbors;
  neighbors.reserve(agents.size());

  for (std::uint64_t step = 0;; ++step) {
    Observation obs;
    obs.episode_id = log.episode_id;
    obs.step = step;
    obs.dt = config.dt;
    obs.robot = agents[0];
    obs.robot_goal = spec.robot_goal;
    obs.time_remaining = config.time_limit - static_cast<double>(step) * config.dt;
    obs.humans.assign(agents.begin() + 1, agents.end());
    for (AgentState& h : obs.humans) h.goal = Vec2{};

    PolicyAction action;
    try {
      action = policy.act(obs);
    } catch (const PolicyError& e) {
      finish(Outcome::aborted, e.what());
      return log;
    }
    if (!action.command_velocity.finite()) {
      finish(Outcome::aborted, "non-finite command velocity");
      return log;
    }
    next_velocity[0] = clip_to_speed(action.command_velocity, config.robot_max_speed);
    if (!(next_velocity[0] == action.command_velocity)) ++log.clipped_commands;

    for (std::size_t i = 1; i < agents.size(); ++i) {
      const AgentState& human = agents[i];
      neighbors.clear();
      if (config.robot_visible) neighbors.push_back(agents[0]);
      for (std::size_t j = 1; j < agents.size(); ++j) {
        if (j != i) neighbors.push_back(agents[j]);
      }
      OrcaParams params = config.orca;
      params.max_speed = human.preferred_speed;
      const Vec2 preferred = within(human.position, human.goal, human.radius)
                                 ? Vec2{}
                                 : preferred_velocity(human, config.dt);
      next_velocity[i] = orca_velocity(human, neighbors, params, config.dt, preferred);
    }

    for (std::size_t i = 0; i < agents.size(); ++i) {
      agents[i].velocity = next_velocity[i];
      agents[i].position += next_velocity[i] * config.dt;
    }
    const std::uint64_t frame_step = step + 1;
    log.frames.push_back(snapshot(frame_step, agents));
    const double elapsed = static_cast<double>(frame_step) * config.dt;

    for (std::size_t i = 0; i < n_humans; ++i) {
      if (!human_arrival[i] && within(agents[i + 1].position, agents[i + 1].goal, agents[i + 1].radius)) {
        human_arrival[i] = elapsed;
      }
      for (std::size_t j = i + 1; j < n_humans; ++j) {
        if (overlapping(agents[i + 1], agents[j + 1])) {
          log.human_contacts.push_back({frame_step, static_cast<std::uint32_t>(i + 1),
                                        static_cast<std::uint32_t>(j + 1)});
        }
      }
    }

    bool collided = false;
    for (std::size_t i = 1; i < agents.size() && !collided; ++i) {
      collided = overlapping(agents[0], agents[i]);
    }

    if (collided) {
      finish(Outcome::collision);
    } else if (within(agents[0].position, spec.robot_goal, config.goal_tolerance)) {
      finish(Outcome::success);
    } else if (elapsed >= config.time_limit) {
      finish(Outcome::timeout);
    } else {
      continue;
    }
    try {
      policy.end_episode(log.episode_id, to_string(log.outcome));
    } catch (const PolicyError& e) {
      // The episode itself completed; keep its outcome but note the failure.
      log.abort_reason = std::string("end-of-episode: ") + e.what();
    }
    return log;
  }
}

}  // namespace crowdbench
