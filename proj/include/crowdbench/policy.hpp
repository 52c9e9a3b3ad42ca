#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crowdbench/agent.hpp"

namespace crowdbench {

/// What the robot policy sees at one step. Human goals are withheld (zeroed).
struct Observation {
  std::string episode_id;
  std::uint64_t step{0};
  double dt{0.0};
  AgentState robot;
  std::vector<AgentState> humans;
  Vec2 robot_goal;
  double time_remaining{0.0};
};

/// Sent once before the first observation of an episode.
struct EpisodeInfo {
  std::string episode_id;
  std::string scenario_kind;
  std::uint64_t seed{0};
  double dt{0.0};
  double robot_max_speed{0.0};
};

/**
 * Anything that can drive the robot. Implementations signal failure by
 * throwing PolicyError, which aborts the episode.
 */
class RobotPolicy {
public:
  virtual ~RobotPolicy() = default;

  virtual std::string name() const = 0;
  virtual void begin_episode(const EpisodeInfo& /*info*/) {}
  virtual PolicyAction act(const Observation& obs) = 0;
  virtual void end_episode(std::string_view /*episode_id*/, std::string_view /*outcome*/) {}

  /// Number of commands the policy itself reported as out of range (bridge clipping).
  virtual std::uint64_t take_clip_count() { return 0; }
};

enum class BuiltinPolicy { goal_greedy, orca, stationary };

/// Throws ConfigError for unknown names.
BuiltinPolicy parse_builtin_policy(std::string_view name);
std::string_view to_string(BuiltinPolicy policy);

/// Stateless evaluation of a built-in policy on one observation.
PolicyAction builtin_policy(BuiltinPolicy policy, const AgentState& state,
                            std::span<const AgentState> visible_others, const OrcaParams& params,
                            double dt);
PolicyAction builtin_policy(std::string_view name, const AgentState& state,
                            std::span<const AgentState> visible_others, const OrcaParams& params,
                            double dt);

/// RobotPolicy adapter over builtin_policy; `params` configures the orca variant.
std::unique_ptr<RobotPolicy> make_builtin_policy(BuiltinPolicy policy, const OrcaParams& params);

}  // namespace crowdbench
