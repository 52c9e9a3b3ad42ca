#pragma once

/**
 * @file orca.hpp
 * @brief Optimal reciprocal collision avoidance for disc agents.
 *
 * Each neighbor contributes one half-plane in velocity space. The new
 * velocity is the point of the intersection of those half-planes and the
 * max-speed disc closest to the preferred velocity. When the intersection
 * is empty, the velocity minimizing the largest constraint violation is
 * returned instead.
 *
 * Neighbors are filtered to those closer than neighbor_dist, truncated to
 * the max_neighbors nearest (ties by id) and then ordered by id, so the
 * result never depends on the order of the input list.
 */

#include <span>
#include <vector>

#include "crowdbench/agent.hpp"

namespace crowdbench {

/// Admissible set is the closed half-plane to the left of `direction` through `point`.
struct HalfPlane {
  Vec2 point;
  Vec2 direction;

  /// Signed distance of v into the admissible side; negative means violated.
  double slack(const Vec2& v) const { return det(direction, v - point); }
};

/// One half-plane per selected neighbor, in solver order.
std::vector<HalfPlane> orca_constraints(const AgentState& self,
                                        std::span<const AgentState> neighbors,
                                        const OrcaParams& params, double dt);

/**
 * Closest point to `preferred` inside all half-planes and the disc of radius
 * max_speed. Falls back to the least-violating velocity if infeasible.
 * `feasible`, when given, reports which branch produced the result.
 */
Vec2 solve_velocity_lp(std::span<const HalfPlane> constraints, double max_speed,
                       const Vec2& preferred, bool* feasible = nullptr);

/// ORCA velocity toward the agent's own preferred velocity.
Vec2 orca_velocity(const AgentState& self, std::span<const AgentState> neighbors,
                   const OrcaParams& params, double dt);

/// Same, with an explicit preferred velocity (e.g. zero for an agent holding at its goal).
Vec2 orca_velocity(const AgentState& self, std::span<const AgentState> neighbors,
                   const OrcaParams& params, double dt, const Vec2& preferred);

}  // namespace crowdbench
