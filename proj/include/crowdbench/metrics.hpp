#pragma once

/**
 * @file metrics.hpp
 * @brief Basic and social-conformity metrics over episode logs.
 *
 * Indicator metrics (personal space, projected path, walking speed) are
 * reported as the fraction of frames in violation together with the
 * violation time, fraction * horizon(). Integrated jerk uses third-order
 * backward differences of the robot position and averages the squared
 * jerk over the samples where it is defined.
 */

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "crowdbench/scenario.hpp"
#include "crowdbench/sim.hpp"

namespace crowdbench {

enum class SideRule {
  last_approach_frame,  ///< label at the last frame satisfying the approach trigger
  majority,             ///< majority label over all approach frames
};

struct MetricConfig {
  double epsilon{1.2};
  double projection_horizon{1.0};
  double speed_limit{1.5};
  SideRule side_rule{SideRule::last_approach_frame};
};

/// Epsilon used to reproduce the published evaluation, matching the person radius.
inline constexpr double kReproductionEpsilon = 0.2;

void validate(const MetricConfig& cfg);

struct FrameFraction {
  double fraction{0.0};
  double seconds{0.0};
  std::size_t count{0};
};

enum class SideLabel { left, right, undetermined, not_applicable };

std::string_view to_string(SideLabel label);
SideLabel parse_side_label(std::string_view name);

/// Per-frame M_I indicator: robot closer than epsilon to some human.
std::vector<bool> personal_space_flags(const EpisodeLog& log, const MetricConfig& cfg);
/// Per-frame M_II indicator: robot velocity rectangle meets some human's.
std::vector<bool> projected_path_flags(const EpisodeLog& log, const MetricConfig& cfg);

/// M_I. Empty optional when the log has no humans.
std::optional<FrameFraction> metric_personal_space(const EpisodeLog& log, const MetricConfig& cfg);
/// M_II. Empty optional when the log has no humans.
std::optional<FrameFraction> metric_projected_path(const EpisodeLog& log, const MetricConfig& cfg);
/// M_III: robot plus all human navigation times. Throws MisuseError on invisible-robot logs.
double metric_aggregated_time(const EpisodeLog& log);
/// M_IV. Empty optional with fewer than four frames.
std::optional<double> metric_integrated_jerk(const EpisodeLog& log);
/// Squared-norm jerk samples behind M_IV, one per frame from index 3 on.
std::vector<double> squared_jerk_samples(const EpisodeLog& log);
/// M_V.
FrameFraction metric_walking_speed(const EpisodeLog& log, const MetricConfig& cfg);
/// M_VI. Throws MisuseError unless the log is a single-human kind.
SideLabel metric_side_preference(const EpisodeLog& log, SideRule rule = SideRule::last_approach_frame);

struct MetricReport {
  std::string episode_id;
  ScenarioKind kind{ScenarioKind::circular_crossing};
  Outcome outcome{Outcome::timeout};
  bool robot_visible{false};
  double nav_time{0.0};
  double horizon{0.0};
  std::optional<double> m1;
  std::optional<double> m1_seconds;
  std::optional<double> m2;
  std::optional<double> m2_seconds;
  std::optional<double> m3;
  std::optional<double> m4;
  std::optional<double> m5;
  std::optional<double> m5_seconds;
  SideLabel side_label{SideLabel::not_applicable};

  bool operator==(const MetricReport&) const = default;
};

/**
 * Scores one log. Visible-robot logs get only M_III; invisible-robot logs
 * get everything else. Aborted logs carry the outcome and no metrics.
 */
MetricReport score_episode(const EpisodeLog& log, const MetricConfig& cfg);

struct MeanStd {
  double mean{0.0};
  double std{0.0};  ///< sample standard deviation (n - 1); 0 for a single value
  std::size_t n{0};

  bool operator==(const MeanStd&) const = default;
};

/// Empty optional for an empty sample.
std::optional<MeanStd> mean_std(std::span<const double> values);

struct AggregateReport {
  std::string label;  ///< usually the scenario kind
  std::size_t episodes{0};  ///< non-aborted episodes
  std::size_t successes{0};
  std::size_t collisions{0};
  std::size_t timeouts{0};
  std::size_t aborted{0};
  double success_pct{0.0};
  double collision_pct{0.0};
  double timeout_pct{0.0};
  std::optional<MeanStd> nav_time;
  std::optional<MeanStd> m1;
  std::optional<MeanStd> m2;
  std::optional<MeanStd> m3;
  std::optional<MeanStd> m4;
  std::optional<MeanStd> m5;
  bool side_applicable{false};
  std::size_t side_left{0};
  std::size_t side_right{0};
  std::size_t side_undetermined{0};
  std::optional<double> left_pct;
  std::optional<double> right_pct;

  bool operator==(const AggregateReport&) const = default;
};

/**
 * Outcome percentages over all non-aborted reports; metric statistics over
 * successful reports only. Throws InvalidInput on an empty list.
 */
AggregateReport aggregate(std::span<const MetricReport> reports, std::string label = {});

/// Takes M_III from a visible-robot aggregate and everything else from the invisible one.
AggregateReport merge_visible(AggregateReport invisible, const AggregateReport& visible);

}  // namespace crowdbench
