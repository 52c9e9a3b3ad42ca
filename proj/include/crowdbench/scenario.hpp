#pragma once

/**
 * @file scenario.hpp
 * @brief Seeded instantiation of the seven evaluation scenarios.
 *
 * The robot always starts at (0, s_y) and heads for (0, -s_y). Humans are
 * placed per scenario kind with rejection sampling so that no two start
 * positions are closer than the sum of radii plus kStartClearance.
 */

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "crowdbench/geometry.hpp"

namespace crowdbench {

enum class ScenarioKind {
  circular_crossing,
  random,
  parallel_traffic,
  perpendicular_traffic,
  passing,
  overtaking,
  crossing,
};

inline constexpr std::array<ScenarioKind, 7> kAllScenarioKinds{
    ScenarioKind::circular_crossing, ScenarioKind::random,  ScenarioKind::parallel_traffic,
    ScenarioKind::perpendicular_traffic, ScenarioKind::passing, ScenarioKind::overtaking,
    ScenarioKind::crossing,
};

std::string_view to_string(ScenarioKind kind);
/// Throws ConfigError on unknown names.
ScenarioKind parse_scenario_kind(std::string_view name);
std::optional<ScenarioKind> try_parse_scenario_kind(std::string_view name);

/// Passing, overtaking and crossing carry one human and are scored for side preference.
constexpr bool is_single_human(ScenarioKind kind) {
  return kind == ScenarioKind::passing || kind == ScenarioKind::overtaking ||
         kind == ScenarioKind::crossing;
}

struct HumanSpec {
  Vec2 start;
  Vec2 goal;
  double preferred_speed{1.0};
  double radius{0.2};

  bool operator==(const HumanSpec&) const = default;
};

struct ScenarioSpec {
  ScenarioKind kind{ScenarioKind::circular_crossing};
  Vec2 robot_start;
  Vec2 robot_goal;
  double robot_radius{0.2};
  double robot_preferred_speed{1.0};
  std::vector<HumanSpec> humans;
  std::uint64_t seed{0};
  bool robot_visible{false};

  bool operator==(const ScenarioSpec&) const = default;
};

/// Placement knobs. Defaults are the documented protocol values.
struct ScenarioParams {
  double human_radius{0.2};
  double robot_radius{0.2};
  double human_speed{1.0};
  double robot_speed{1.0};
  /// Speed of the pedestrian being overtaken.
  double overtaken_speed{0.5};
  /// Circular crossing: max offset of starts from the ring and of goals from the antipode.
  double ring_jitter{0.5};
  /// Traffic spawn strips: extent across the robot's path and along it.
  double strip_across{6.0};
  double strip_along{2.0};
  /// Overtaking: human start lies this far ahead of the robot start.
  double overtake_lead_min{1.0};
  double overtake_lead_max{2.5};
  /// Overtaking: human goal lies this far beyond the robot goal.
  double overtake_goal_offset{1.0};
};

inline constexpr double kStartClearance = 0.1;
inline constexpr int kMaxPlacementAttempts = 1000;

/**
 * Builds a scenario. n_humans is forced to 1 for single-human kinds.
 * Identical arguments give identical specs. Throws InvalidInput on bad
 * arguments and GenerationError if placement fails.
 */
ScenarioSpec sample_scenario(ScenarioKind kind, std::uint32_t n_humans, double s_y_r,
                             std::uint64_t seed, const ScenarioParams& params = {});

/// Deterministic uniform source: mt19937_64 with a fixed mapping to doubles,
/// so results do not depend on the standard library's distributions.
class UniformSource {
public:
  explicit UniformSource(std::uint64_t seed);
  /// Uniform in [0, 1).
  double next();
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }
  /// Uniform over the closed disc of the given radius.
  Vec2 in_disc(double radius);
  bool coin() { return next() < 0.5; }

private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer; used to derive per-episode seeds.
std::uint64_t mix64(std::uint64_t x);

}  // namespace crowdbench
