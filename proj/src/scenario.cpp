#include "crowdbench/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "crowdbench/errors.hpp"

namespace crowdbench {

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::circular_crossing: return "circular_crossing";
    case ScenarioKind::random: return "random";
    case ScenarioKind::parallel_traffic: return "parallel_traffic";
    case ScenarioKind::perpendicular_traffic: return "perpendicular_traffic";
    case ScenarioKind::passing: return "passing";
    case ScenarioKind::overtaking: return "overtaking";
    case ScenarioKind::crossing: return "crossing";
  }
  return "unknown";
}

std::optional<ScenarioKind> try_parse_scenario_kind(std::string_view name) {
  for (ScenarioKind kind : kAllScenarioKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

ScenarioKind parse_scenario_kind(std::string_view name) {
  if (auto kind = try_parse_scenario_kind(name)) return *kind;
  throw ConfigError("unknown scenario kind: " + std::string(name));
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

UniformSource::UniformSource(std::uint64_t seed) : engine_(seed) {}

double UniformSource::next() {
  // Top 53 bits -> [0, 1) with full double resolution.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Vec2 UniformSource::in_disc(double radius) {
  while (true) {
    const Vec2 p{uniform(-1.0, 1.0), uniform(-1.0, 1.0)};
    if (abs_sq(p) <= 1.0) return p * radius;
  }
}

namespace {

bool clear_of(const Vec2& p, double radius, const std::vector<Vec2>& placed,
              const std::vector<double>& placed_radii) {
  for (std::size_t i = 0; i < placed.size(); ++i) {
    const double min_gap = radius + placed_radii[i] + kStartClearance;
    if (abs_sq(p - placed[i]) < min_gap * min_gap) return false;
  }
  return true;
}

void validate(const ScenarioParams& p) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.human_radius) || !positive(p.robot_radius) || !positive(p.human_speed) ||
      !positive(p.robot_speed) || !positive(p.overtaken_speed) || !positive(p.strip_across) ||
      !positive(p.strip_along) || !std::isfinite(p.ring_jitter) || p.ring_jitter < 0.0) {
    throw InvalidInput("scenario parameters must be positive");
  }
  if (!(p.overtaken_speed < p.robot_speed)) {
    throw InvalidInput("overtaken pedestrian must be slower than the robot");
  }
  if (!(p.overtake_lead_min >= 0.0 && p.overtake_lead_min <= p.overtake_lead_max)) {
    throw InvalidInput("overtaking lead range is empty");
  }
}

}  // namespace

ScenarioSpec sample_scenario(ScenarioKind kind, std::uint32_t n_humans, double s_y_r,
                             std::uint64_t seed, const ScenarioParams& params) {
  validate(params);
  if (!std::isfinite(s_y_r) || s_y_r == 0.0) throw InvalidInput("robot start y must be nonzero");
  if (is_single_human(kind)) {
    n_humans = 1;
  } else if (n_humans < 1) {
    throw InvalidInput("multi-human scenarios need at least one human");
  }

  const double half_span = std::abs(s_y_r);
  const bool traffic =
      kind == ScenarioKind::parallel_traffic || kind == ScenarioKind::perpendicular_traffic;
  if (traffic && !(half_span > 0.5 * params.strip_along)) {
    throw InvalidInput("spawn strips would straddle the origin");
  }

  ScenarioSpec spec;
  spec.kind = kind;
  spec.seed = seed;
  spec.robot_start = {0.0, s_y_r};
  spec.robot_goal = {0.0, -s_y_r};
  spec.robot_radius = params.robot_radius;
  spec.robot_preferred_speed = params.robot_speed;

  // +1 when the robot travels towards +y.
  const double heading = s_y_r < 0.0 ? 1.0 : -1.0;
  const double band = params.robot_radius + params.human_radius;

  UniformSource rng(seed);
  std::vector<Vec2> starts{spec.robot_start};
  std::vector<double> start_radii{params.robot_radius};
  std::vector<Vec2> goals;
  std::vector<double> goal_radii;

  for (std::uint32_t n = 0; n < n_humans; ++n) {
    HumanSpec human;
    human.radius = params.human_radius;
    human.preferred_speed = params.human_speed;

    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      switch (kind) {
        case ScenarioKind::circular_crossing: {
          const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
          const Vec2 on_ring{half_span * std::cos(angle), half_span * std::sin(angle)};
          human.start = on_ring + rng.in_disc(params.ring_jitter);
          human.goal = -human.start + rng.in_disc(params.ring_jitter);
          break;
        }
        case ScenarioKind::random: {
          const double half_side = 1.5 * half_span;
          human.start = {rng.uniform(-half_side, half_side), rng.uniform(-half_side, half_side)};
          human.goal = {rng.uniform(-half_side, half_side), rng.uniform(-half_side, half_side)};
          break;
        }
        case ScenarioKind::parallel_traffic:
        case ScenarioKind::perpendicular_traffic: {
          const double side = rng.coin() ? 1.0 : -1.0;
          const double a = 0.5 * params.strip_across;
          const double l = 0.5 * params.strip_along;
          const double start_across = rng.uniform(-a, a);
          const double start_along = side * half_span + rng.uniform(-l, l);
          const double goal_across = rng.uniform(-a, a);
          const double goal_along = -side * half_span + rng.uniform(-l, l);
          if (kind == ScenarioKind::parallel_traffic) {
            human.start = {start_across, start_along};
            human.goal = {goal_across, goal_along};
          } else {
            human.start = {start_along, start_across};
            human.goal = {goal_along, goal_across};
          }
          break;
        }
        case ScenarioKind::passing:
          human.start = {spec.robot_start.x + rng.uniform(-band, band), spec.robot_goal.y};
          human.goal = {spec.robot_start.x + rng.uniform(-band, band), spec.robot_start.y};
          break;
        case ScenarioKind::overtaking: {
          human.preferred_speed = params.overtaken_speed;
          const double lead = rng.uniform(params.overtake_lead_min, params.overtake_lead_max);
          human.start = {spec.robot_start.x + rng.uniform(-band, band),
                         spec.robot_start.y + heading * lead};
          human.goal = {spec.robot_start.x + rng.uniform(-band, band),
                        spec.robot_goal.y + heading * params.overtake_goal_offset};
          break;
        }
        case ScenarioKind::crossing:
          human.start = {s_y_r, rng.uniform(-band, band)};
          human.goal = {-s_y_r, rng.uniform(-band, band)};
          break;
      }

      placed = clear_of(human.start, human.radius, starts, start_radii) &&
               clear_of(human.goal, human.radius, goals, goal_radii);
    }
    if (!placed) {
      throw GenerationError("could not place human " + std::to_string(n) + " of " +
                            std::string(to_string(kind)) + " after " +
                            std::to_string(kMaxPlacementAttempts) + " attempts");
    }

    starts.push_back(human.start);
    start_radii.push_back(human.radius);
    goals.push_back(human.goal);
    goal_radii.push_back(human.radius);
    spec.humans.push_back(human);
  }
  return spec;
}

}  // namespace crowdbench
