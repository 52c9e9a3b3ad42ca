#pragma once

/**
 * @file sim.hpp
 * @brief Fixed-step episode execution.
 *
 * Per step: the robot policy acts on the current state, every human picks
 * an ORCA velocity, then all agents move simultaneously. The episode ends
 * on the first of collision, success or timeout (checked in that order
 * after each move). Agent index 0 in every frame is the robot; humans
 * follow in spec order with ids 1..n.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crowdbench/agent.hpp"
#include "crowdbench/policy.hpp"
#include "crowdbench/scenario.hpp"

namespace crowdbench {

struct SimConfig {
  double dt{0.25};
  double time_limit{25.0};
  double goal_tolerance{0.2};
  bool robot_visible{false};
  double robot_max_speed{1.0};
  /// Human ORCA parameters; max_speed is overridden per human by its preferred speed.
  OrcaParams orca{};
};

void validate(const SimConfig& config);

enum class Outcome { success, collision, timeout, aborted };

std::string_view to_string(Outcome outcome);
Outcome parse_outcome(std::string_view name);

struct AgentSnapshot {
  Vec2 position;
  Vec2 velocity;

  bool operator==(const AgentSnapshot&) const = default;
};

struct Frame {
  std::uint64_t step{0};
  std::vector<AgentSnapshot> agents;

  bool operator==(const Frame&) const = default;
};

/// Two humans overlapping at some step; recorded, never terminal.
struct HumanContact {
  std::uint64_t step{0};
  std::uint32_t first{0};
  std::uint32_t second{0};

  bool operator==(const HumanContact&) const = default;
};

struct EpisodeLog {
  std::string episode_id;
  ScenarioSpec spec;
  SimConfig config;
  std::string policy_name;
  std::vector<Frame> frames;
  Outcome outcome{Outcome::timeout};
  std::string abort_reason;
  double robot_nav_time{0.0};
  std::vector<double> human_nav_times;
  std::vector<HumanContact> human_contacts;
  std::uint64_t clipped_commands{0};

  double dt() const { return config.dt; }
  std::size_t human_count() const { return spec.humans.size(); }
  /// Simulated time from the first to the last frame.
  double duration() const;
  /// Normalizing horizon for per-frame metrics: frame count times dt.
  double horizon() const;
  /// Full state of agent `index` (0 = robot) at frame `frame`.
  AgentState agent_state(std::size_t frame, std::size_t index) const;
};

/// Runs one episode. Policy failures end the episode with Outcome::aborted.
EpisodeLog run_episode(const ScenarioSpec& spec, RobotPolicy& policy, const SimConfig& config,
                       std::string episode_id = "e0");

}  // namespace crowdbench
