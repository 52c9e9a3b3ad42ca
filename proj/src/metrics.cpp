#include "crowdbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crowdbench/errors.hpp"

namespace crowdbench {

void validate(const MetricConfig& cfg) {
  // epsilon = 0 is allowed and yields an identically zero M_I.
  if (!std::isfinite(cfg.epsilon) || cfg.epsilon < 0.0) throw InvalidInput("epsilon must be >= 0");
  if (!std::isfinite(cfg.projection_horizon) || !(cfg.projection_horizon > 0.0)) {
    throw InvalidInput("projection horizon must be positive");
  }
  if (!std::isfinite(cfg.speed_limit) || !(cfg.speed_limit > 0.0)) {
    throw InvalidInput("speed limit must be positive");
  }
}

std::string_view to_string(SideLabel label) {
  switch (label) {
    case SideLabel::left: return "left";
    case SideLabel::right: return "right";
    case SideLabel::undetermined: return "undetermined";
    case SideLabel::not_applicable: return "not_applicable";
  }
  return "unknown";
}

SideLabel parse_side_label(std::string_view name) {
  for (SideLabel l : {SideLabel::left, SideLabel::right, SideLabel::undetermined,
                      SideLabel::not_applicable}) {
    if (to_string(l) == name) return l;
  }
  throw InvalidInput("unknown side label: " + std::string(name));
}

namespace {

FrameFraction fraction_of(const std::vector<bool>& flags, const EpisodeLog& log) {
  FrameFraction out;
  out.count = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
  out.fraction = flags.empty() ? 0.0 : static_cast<double>(out.count) / static_cast<double>(flags.size());
  out.seconds = static_cast<double>(out.count) * log.dt();
  return out;
}

void require_frames(const EpisodeLog& log) {
  if (log.frames.empty()) throw InvalidInput("episode log has no frames");
}

}  // namespace

std::vector<bool> personal_space_flags(const EpisodeLog& log, const MetricConfig& cfg) {
  validate(cfg);
  require_frames(log);
  std::vector<bool> flags;
  flags.reserve(log.frames.size());
  std::vector<Vec2> humans;
  for (const Frame& frame : log.frames) {
    humans.clear();
    for (std::size_t i = 1; i < frame.agents.size(); ++i) humans.push_back(frame.agents[i].position);
    flags.push_back(min_center_distance(frame.agents[0].position, humans) < cfg.epsilon);
  }
  return flags;
}

std::vector<bool> projected_path_flags(const EpisodeLog& log, const MetricConfig& cfg) {
  validate(cfg);
  require_frames(log);
  std::vector<bool> flags;
  flags.reserve(log.frames.size());
  for (const Frame& frame : log.frames) {
    const OrientedRect robot_rect =
        rect_from_agent(frame.agents[0].position, frame.agents[0].velocity,
                        2.0 * log.spec.robot_radius, cfg.projection_horizon);
    bool hit = false;
    for (std::size_t i = 1; i < frame.agents.size() && !hit; ++i) {
      const OrientedRect human_rect =
          rect_from_agent(frame.agents[i].position, frame.agents[i].velocity,
                          2.0 * log.spec.humans.at(i - 1).radius, cfg.projection_horizon);
      hit = rects_intersect(robot_rect, human_rect);
    }
    flags.push_back(hit);
  }
  return flags;
}

std::optional<FrameFraction> metric_personal_space(const EpisodeLog& log, const MetricConfig& cfg) {
  if (log.human_count() == 0) return std::nullopt;
  return fraction_of(personal_space_flags(log, cfg), log);
}

std::optional<FrameFraction> metric_projected_path(const EpisodeLog& log, const MetricConfig& cfg) {
  if (log.human_count() == 0) return std::nullopt;
  return fraction_of(projected_path_flags(log, cfg), log);
}

double metric_aggregated_time(const EpisodeLog& log) {
  if (!log.spec.robot_visible) {
    throw MisuseError("aggregated time is only defined for visible-robot episodes");
  }
  return std::accumulate(log.human_nav_times.begin(), log.human_nav_times.end(),
                         log.robot_nav_time);
}

std::vector<double> squared_jerk_samples(const EpisodeLog& log) {
  std::vector<double> out;
  const auto& f = log.frames;
  if (f.size() < 4) return out;
  const double dt3 = log.dt() * log.dt() * log.dt();
  out.reserve(f.size() - 3);
  for (std::size_t t = 3; t < f.size(); ++t) {
    const Vec2 jerk = (f[t].agents[0].position - 3.0 * f[t - 1].agents[0].position +
                       3.0 * f[t - 2].agents[0].position - f[t - 3].agents[0].position) /
                      dt3;
    out.push_back(abs_sq(jerk));
  }
  return out;
}

std::optional<double> metric_integrated_jerk(const EpisodeLog& log) {
  const auto samples = squared_jerk_samples(log);
  if (samples.empty()) return std::nullopt;
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

FrameFraction metric_walking_speed(const EpisodeLog& log, const MetricConfig& cfg) {
  validate(cfg);
  require_frames(log);
  std::vector<bool> flags;
  flags.reserve(log.frames.size());
  for (const Frame& frame : log.frames) {
    flags.push_back(norm(frame.agents[0].velocity) > cfg.speed_limit);
  }
  return fraction_of(flags, log);
}

SideLabel metric_side_preference(const EpisodeLog& log, SideRule rule) {
  if (!is_single_human(log.spec.kind) || log.human_count() != 1) {
    throw MisuseError("side preference needs a passing, overtaking or crossing log");
  }
  require_frames(log);

  // Rotate by 180 degrees when the robot heads towards -y so the rule always sees +y travel.
  const double flip = log.spec.robot_goal.y < log.spec.robot_start.y ? -1.0 : 1.0;
  const double reach = log.spec.robot_radius + log.spec.humans[0].radius;

  const auto label_at = [&](const Frame& frame) {
    const double rx = flip * frame.agents[0].position.x;
    const double hx = flip * frame.agents[1].position.x;
    if (hx > rx) return SideLabel::left;
    if (hx < rx) return SideLabel::right;
    return SideLabel::undetermined;
  };
  const auto approaching = [&](const Frame& frame) {
    return flip * frame.agents[0].position.y < flip * frame.agents[1].position.y + reach;
  };

  if (rule == SideRule::last_approach_frame) {
    for (auto it = log.frames.rbegin(); it != log.frames.rend(); ++it) {
      if (approaching(*it)) return label_at(*it);
    }
    return SideLabel::undetermined;
  }

  std::size_t left = 0;
  std::size_t right = 0;
  for (const Frame& frame : log.frames) {
    if (!approaching(frame)) continue;
    const SideLabel l = label_at(frame);
    left += l == SideLabel::left;
    right += l == SideLabel::right;
  }
  if (left > right) return SideLabel::left;
  if (right > left) return SideLabel::right;
  return SideLabel::undetermined;
}

MetricReport score_episode(const EpisodeLog& log, const MetricConfig& cfg) {
  validate(cfg);
  MetricReport r;
  r.episode_id = log.episode_id;
  r.kind = log.spec.kind;
  r.outcome = log.outcome;
  r.robot_visible = log.spec.robot_visible;
  r.nav_time = log.robot_nav_time;
  r.horizon = log.horizon();
  if (log.outcome == Outcome::aborted || log.frames.empty()) return r;

  if (log.spec.robot_visible) {
    r.m3 = metric_aggregated_time(log);
    return r;
  }

  if (auto m1 = metric_personal_space(log, cfg)) {
    r.m1 = m1->fraction;
    r.m1_seconds = m1->seconds;
  }
  if (auto m2 = metric_projected_path(log, cfg)) {
    r.m2 = m2->fraction;
    r.m2_seconds = m2->seconds;
  }
  r.m4 = metric_integrated_jerk(log);
  const FrameFraction m5 = metric_walking_speed(log, cfg);
  r.m5 = m5.fraction;
  r.m5_seconds = m5.seconds;
  if (is_single_human(log.spec.kind) && log.human_count() == 1) {
    r.side_label = metric_side_preference(log, cfg.side_rule);
  }
  return r;
}

std::optional<MeanStd> mean_std(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  MeanStd out;
  out.n = values.size();
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

AggregateReport aggregate(std::span<const MetricReport> reports, std::string label) {
  if (reports.empty()) throw InvalidInput("cannot aggregate an empty report list");

  AggregateReport agg;
  agg.label = std::move(label);
  std::vector<double> nav, m1, m2, m3, m4, m5;
  for (const MetricReport& r : reports) {
    switch (r.outcome) {
      case Outcome::aborted: ++agg.aborted; continue;
      case Outcome::success: ++agg.successes; break;
      case Outcome::collision: ++agg.collisions; break;
      case Outcome::timeout: ++agg.timeouts; break;
    }
    ++agg.episodes;
    if (is_single_human(r.kind)) agg.side_applicable = true;
    if (r.outcome != Outcome::success) continue;

    nav.push_back(r.nav_time);
    if (r.m1) m1.push_back(*r.m1);
    if (r.m2) m2.push_back(*r.m2);
    if (r.m3) m3.push_back(*r.m3);
    if (r.m4) m4.push_back(*r.m4);
    if (r.m5) m5.push_back(*r.m5);
    switch (r.side_label) {
      case SideLabel::left: ++agg.side_left; break;
      case SideLabel::right: ++agg.side_right; break;
      case SideLabel::undetermined: ++agg.side_undetermined; break;
      case SideLabel::not_applicable: break;
    }
  }

  if (agg.episodes > 0) {
    const double total = static_cast<double>(agg.episodes);
    agg.success_pct = 100.0 * static_cast<double>(agg.successes) / total;
    agg.collision_pct = 100.0 * static_cast<double>(agg.collisions) / total;
    agg.timeout_pct = 100.0 * static_cast<double>(agg.timeouts) / total;
  }
  agg.nav_time = mean_std(nav);
  agg.m1 = mean_std(m1);
  agg.m2 = mean_std(m2);
  agg.m3 = mean_std(m3);
  agg.m4 = mean_std(m4);
  agg.m5 = mean_std(m5);
  const std::size_t determinate = agg.side_left + agg.side_right;
  if (determinate > 0) {
    agg.left_pct = 100.0 * static_cast<double>(agg.side_left) / static_cast<double>(determinate);
    agg.right_pct = 100.0 * static_cast<double>(agg.side_right) / static_cast<double>(determinate);
  }
  return agg;
}

AggregateReport merge_visible(AggregateReport invisible, const AggregateReport& visible) {
  invisible.m3 = visible.m3;
  return invisible;
}

}  // namespace crowdbench
