#include "crowdbench/orca.hpp"

#include <algorithm>
#include <cmath>

#include "crowdbench/errors.hpp"

namespace crowdbench {
namespace {

constexpr double kParallelEps = 1e-10;

// 1D program along constraint `line_no`, bounded by the speed disc and all
// earlier constraints. Returns false when that segment is empty.
bool solve_on_line(std::span<const HalfPlane> lines, std::size_t line_no, double radius,
                   const Vec2& opt, bool direction_opt, Vec2& result) {
  const HalfPlane& line = lines[line_no];
  const double dot_product = dot(line.point, line.direction);
  const double discriminant = dot_product * dot_product + radius * radius - abs_sq(line.point);
  if (discriminant < 0.0) {
    return false;
  }

  const double sqrt_disc = std::sqrt(discriminant);
  double t_left = -dot_product - sqrt_disc;
  double t_right = -dot_product + sqrt_disc;

  for (std::size_t i = 0; i < line_no; ++i) {
    const double denominator = det(line.direction, lines[i].direction);
    const double numerator = det(lines[i].direction, line.point - lines[i].point);

    if (std::abs(denominator) <= kParallelEps) {
      if (numerator < 0.0) return false;
      continue;
    }

    const double t = numerator / denominator;
    if (denominator >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  if (direction_opt) {
    result = dot(opt, line.direction) > 0.0 ? line.point + t_right * line.direction
                                             : line.point + t_left * line.direction;
  } else {
    const double t = std::clamp(dot(line.direction, opt - line.point), t_left, t_right);
    result = line.point + t * line.direction;
  }
  return true;
}

// Incremental 2D program. Returns the index of the first constraint that
// could not be satisfied, or lines.size() on success.
std::size_t solve_incremental(std::span<const HalfPlane> lines, double radius, const Vec2& opt,
                              bool direction_opt, Vec2& result) {
  if (direction_opt) {
    result = opt * radius;
  } else if (abs_sq(opt) > radius * radius) {
    result = normalized(opt) * radius;
  } else {
    result = opt;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].slack(result) < 0.0) {
      const Vec2 previous = result;
      if (!solve_on_line(lines, i, radius, opt, direction_opt, result)) {
        result = previous;
        return i;
      }
    }
  }
  return lines.size();
}

// Infeasible case: minimize the largest violation over constraints from
// `begin` on, by a 2D program on the bisectors of each violated pair.
void solve_least_violation(std::span<const HalfPlane> lines, std::size_t begin, double radius,
                           Vec2& result) {
  double distance = 0.0;
  std::vector<HalfPlane> projected;

  for (std::size_t i = begin; i < lines.size(); ++i) {
    if (-lines[i].slack(result) <= distance) continue;

    projected.clear();
    for (std::size_t j = 0; j < i; ++j) {
      HalfPlane line;
      const double determinant = det(lines[i].direction, lines[j].direction);
      if (std::abs(determinant) <= kParallelEps) {
        if (dot(lines[i].direction, lines[j].direction) > 0.0) continue;
        line.point = 0.5 * (lines[i].point + lines[j].point);
      } else {
        line.point = lines[i].point +
                     (det(lines[j].direction, lines[i].point - lines[j].point) / determinant) *
                         lines[i].direction;
      }
      line.direction = normalized(lines[j].direction - lines[i].direction);
      projected.push_back(line);
    }

    const Vec2 previous = result;
    if (solve_incremental(projected, radius, perp(lines[i].direction), true, result) <
        projected.size()) {
      // Only reachable through rounding; the previous result is already feasible here.
      result = previous;
    }
    distance = -lines[i].slack(result);
  }
}

HalfPlane reciprocal_constraint(const AgentState& self, const AgentState& other,
                                double inv_time_horizon, double dt) {
  const Vec2 relative_position = other.position - self.position;
  const Vec2 relative_velocity = self.velocity - other.velocity;
  const double dist_sq = abs_sq(relative_position);
  const double combined_radius = self.radius + other.radius;
  const double combined_radius_sq = combined_radius * combined_radius;

  HalfPlane line;
  Vec2 u;

  if (dist_sq > combined_radius_sq) {
    // Vector from the cut-off circle center to the relative velocity.
    const Vec2 w = relative_velocity - inv_time_horizon * relative_position;
    const double w_length_sq = abs_sq(w);
    const double dot_product = dot(w, relative_position);

    if (dot_product < 0.0 && dot_product * dot_product > combined_radius_sq * w_length_sq) {
      const double w_length = std::sqrt(w_length_sq);
      const Vec2 unit_w = w / w_length;
      line.direction = Vec2(unit_w.y, -unit_w.x);
      u = (combined_radius * inv_time_horizon - w_length) * unit_w;
    } else {
      const double leg = std::sqrt(dist_sq - combined_radius_sq);
      if (det(relative_position, w) > 0.0) {
        line.direction = Vec2(relative_position.x * leg - relative_position.y * combined_radius,
                              relative_position.x * combined_radius + relative_position.y * leg) /
                         dist_sq;
      } else {
        line.direction = -Vec2(relative_position.x * leg + relative_position.y * combined_radius,
                               -relative_position.x * combined_radius + relative_position.y * leg) /
                         dist_sq;
      }
      u = dot(relative_velocity, line.direction) * line.direction - relative_velocity;
    }
  } else {
    // Already overlapping: resolve the penetration within one step.
    const double inv_dt = 1.0 / dt;
    const Vec2 w = relative_velocity - inv_dt * relative_position;
    const double w_length = norm(w);
    Vec2 unit_w;
    if (w_length > kParallelEps) {
      unit_w = w / w_length;
    } else if (dist_sq > 0.0) {
      unit_w = -relative_position / std::sqrt(dist_sq);
    } else {
      unit_w = self.id < other.id ? Vec2(-1.0, 0.0) : Vec2(1.0, 0.0);
    }
    line.direction = Vec2(unit_w.y, -unit_w.x);
    u = (combined_radius * inv_dt - w_length) * unit_w;
  }

  line.point = self.velocity + 0.5 * u;
  return line;
}

void require_neighbor(const AgentState& a) {
  require_finite(a.position, "neighbor position");
  require_finite(a.velocity, "neighbor velocity");
  if (!(a.radius > 0.0) || !std::isfinite(a.radius)) throw InvalidInput("neighbor radius must be positive");
}

void require_state(const AgentState& a) {
  require_finite(a.position, "agent position");
  require_finite(a.velocity, "agent velocity");
  require_finite(a.goal, "agent goal");
  if (!(a.radius > 0.0) || !std::isfinite(a.radius)) throw InvalidInput("agent radius must be positive");
  if (!(a.preferred_speed > 0.0) || !std::isfinite(a.preferred_speed)) {
    throw InvalidInput("agent preferred speed must be positive");
  }
}

}  // namespace

std::vector<HalfPlane> orca_constraints(const AgentState& self,
                                        std::span<const AgentState> neighbors,
                                        const OrcaParams& params, double dt) {
  validate(params);
  require_state(self);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");

  struct Candidate {
    double dist_sq;
    const AgentState* agent;
  };
  std::vector<Candidate> in_range;
  const double range_sq = params.neighbor_dist * params.neighbor_dist;
  for (const AgentState& other : neighbors) {
    if (other.id == self.id) throw InvalidInput("agent listed among its own neighbors");
    require_neighbor(other);
    const double d = abs_sq(other.position - self.position);
    if (d < range_sq) in_range.push_back({d, &other});
  }

  std::sort(in_range.begin(), in_range.end(), [](const Candidate& a, const Candidate& b) {
    return a.dist_sq != b.dist_sq ? a.dist_sq < b.dist_sq : a.agent->id < b.agent->id;
  });
  if (in_range.size() > params.max_neighbors) in_range.resize(params.max_neighbors);
  std::sort(in_range.begin(), in_range.end(),
            [](const Candidate& a, const Candidate& b) { return a.agent->id < b.agent->id; });

  std::vector<HalfPlane> lines;
  lines.reserve(in_range.size());
  const double inv_time_horizon = 1.0 / params.time_horizon_agents;
  for (const Candidate& c : in_range) {
    lines.push_back(reciprocal_constraint(self, *c.agent, inv_time_horizon, dt));
  }
  return lines;
}

Vec2 solve_velocity_lp(std::span<const HalfPlane> constraints, double max_speed,
                       const Vec2& preferred, bool* feasible) {
  if (!(max_speed > 0.0)) throw InvalidInput("max_speed must be positive");
  require_finite(preferred, "preferred velocity");

  Vec2 result;
  const std::size_t failed = solve_incremental(constraints, max_speed, preferred, false, result);
  if (feasible != nullptr) *feasible = failed == constraints.size();
  if (failed < constraints.size()) {
    solve_least_violation(constraints, failed, max_speed, result);
  }
  return clip_to_speed(result, max_speed);
}

Vec2 orca_velocity(const AgentState& self, std::span<const AgentState> neighbors,
                   const OrcaParams& params, double dt) {
  return orca_velocity(self, neighbors, params, dt, preferred_velocity(self, dt));
}

Vec2 orca_velocity(const AgentState& self, std::span<const AgentState> neighbors,
                   const OrcaParams& params, double dt, const Vec2& preferred) {
  const auto lines = orca_constraints(self, neighbors, params, dt);
  return solve_velocity_lp(lines, params.max_speed, preferred);
}

}  // namespace crowdbench
