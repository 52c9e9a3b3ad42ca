#include "crowdbench/agent.hpp"

#include <cmath>

#include "crowdbench/errors.hpp"

namespace crowdbench {

std::string_view to_string(AgentKind kind) {
  return kind == AgentKind::robot ? "robot" : "human";
}

void validate(const OrcaParams& params) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(params.neighbor_dist) || !positive(params.time_horizon_agents) ||
      !positive(params.max_speed) || params.max_neighbors == 0) {
    throw InvalidInput("ORCA parameters must be strictly positive");
  }
}

Vec2 preferred_velocity(const AgentState& state, double dt) {
  require_finite(state.position, "position");
  require_finite(state.goal, "goal");
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");

  const Vec2 to_goal = state.goal - state.position;
  const double distance = norm(to_goal);
  if (distance == 0.0) return {};
  if (distance < state.preferred_speed * dt) {
    return to_goal / dt;
  }
  return to_goal * (state.preferred_speed / distance);
}

Vec2 clip_to_speed(const Vec2& v, double max_speed) {
  const double n = norm(v);
  if (n <= max_speed) return v;
  Vec2 out = v * (max_speed / n);
  // Rounding can leave the scaled vector a few ulps long.
  while (norm(out) > max_speed) {
    out *= std::nextafter(1.0, 0.0);
  }
  return out;
}

}  // namespace crowdbench
