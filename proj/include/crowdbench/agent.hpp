#pragma once

#include <cstdint>
#include <string_view>

#include "crowdbench/geometry.hpp"

namespace crowdbench {

using AgentId = std::uint32_t;

enum class AgentKind { robot, human };

std::string_view to_string(AgentKind kind);

/// Kinematic snapshot of one disc-shaped agent.
struct AgentState {
  AgentId id{0};
  Vec2 position;
  Vec2 velocity;
  double radius{0.2};
  Vec2 goal;
  double preferred_speed{1.0};
  AgentKind kind{AgentKind::human};
};

struct OrcaParams {
  double neighbor_dist{10.0};
  double time_horizon_agents{5.0};
  double max_speed{1.0};
  std::uint32_t max_neighbors{10};
};

/// Throws InvalidInput unless every field is strictly positive and finite.
void validate(const OrcaParams& params);

struct PolicyAction {
  Vec2 command_velocity;
};

/**
 * Goal-directed velocity of norm preferred_speed, shortened so that the
 * agent lands exactly on its goal instead of overshooting within one dt.
 */
Vec2 preferred_velocity(const AgentState& state, double dt);

/// Scales v down to norm max_speed if it is longer; otherwise returns v.
Vec2 clip_to_speed(const Vec2& v, double max_speed);

}  // namespace crowdbench
