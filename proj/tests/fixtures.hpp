#pragma once

// Hand-built episode logs and scenes shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "crowdbench/sim.hpp"

namespace fixture {

using crowdbench::EpisodeLog;
using crowdbench::Vec2;

/// Empty log skeleton: robot from (0,-4) to (0,4), `n_humans` humans, given dt.
inline EpisodeLog blank_log(std::size_t n_humans, double dt = 0.25,
                            crowdbench::ScenarioKind kind = crowdbench::ScenarioKind::random) {
  EpisodeLog log;
  log.episode_id = "synthetic";
  log.spec.kind = kind;
  log.spec.robot_start = {0.0, -4.0};
  log.spec.robot_goal = {0.0, 4.0};
  for (std::size_t i = 0; i < n_humans; ++i) log.spec.humans.push_back({{0.0, 0.0}, {0.0, 0.0}, 1.0, 0.2});
  log.config.dt = dt;
  log.outcome = crowdbench::Outcome::success;
  log.human_nav_times.assign(n_humans, 0.0);
  return log;
}

/// Appends a frame; velocities are left to the caller.
inline void push_frame(EpisodeLog& log, std::vector<crowdbench::AgentSnapshot> agents) {
  crowdbench::Frame f;
  f.step = log.frames.size();
  f.agents = std::move(agents);
  log.frames.push_back(std::move(f));
}

/// Robot-only log sampled from x(t), y(t) at t = k*dt for k = 0..steps.
inline EpisodeLog trajectory_log(const std::function<Vec2(double)>& p, double dt, std::size_t steps) {
  EpisodeLog log = blank_log(0, dt);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec2 v = k == 0 ? Vec2{} : (p(t) - p(t - dt)) / dt;
    push_frame(log, {{p(t), v}});
  }
  return log;
}

/**
 * Random walk log with dense interaction: all agents move inside a 6 m box,
 * velocities drawn independently (some near zero, some above 1.5 m/s).
 */
inline EpisodeLog random_log(std::uint64_t seed, std::size_t n_humans, std::size_t frames) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::uniform_real_distribution<double> step(-0.4, 0.4);
  std::uniform_real_distribution<double> speed(0.0, 2.2);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EpisodeLog log = blank_log(n_humans);
  std::vector<Vec2> p(n_humans + 1);
  for (auto& q : p) q = {pos(rng), pos(rng)};
  for (std::size_t f = 0; f < frames; ++f) {
    std::vector<crowdbench::AgentSnapshot> agents;
    for (auto& q : p) {
      q = {std::clamp(q.x + step(rng), -3.0, 3.0), std::clamp(q.y + step(rng), -3.0, 3.0)};
      const double s = unit(rng) < 0.1 ? 0.0 : speed(rng);
      const double a = angle(rng);
      agents.push_back({q, {s * std::cos(a), s * std::sin(a)}});
    }
    push_frame(log, std::move(agents));
  }
  return log;
}

/**
 * Single-human approach log: robot drives +y along x = 0 from y = -4, the
 * human stands at (offset, 0). Velocities are the robot's constant (0, 1).
 */
inline EpisodeLog approach_log(double human_x_offset, double dt = 0.25, std::size_t steps = 32,
                               crowdbench::ScenarioKind kind = crowdbench::ScenarioKind::passing) {
  EpisodeLog log = blank_log(1, dt, kind);
  log.spec.humans[0].start = {human_x_offset, 0.0};
  log.spec.humans[0].goal = {human_x_offset, 0.0};
  for (std::size_t k = 0; k <= steps; ++k) {
    const double y = -4.0 + static_cast<double>(k) * dt;
    push_frame(log, {{{0.0, y}, {0.0, 1.0}}, {{human_x_offset, 0.0}, {0.0, 0.0}}});
  }
  return log;
}

/// Negates every x coordinate (positions, velocities, spec placements).
inline EpisodeLog mirror_x(EpisodeLog log) {
  const auto m = [](Vec2& v) { v.x = -v.x; };
  m(log.spec.robot_start);
  m(log.spec.robot_goal);
  for (auto& h : log.spec.humans) {
    m(h.start);
    m(h.goal);
  }
  for (auto& f : log.frames) {
    for (auto& a : f.agents) {
      m(a.position);
      m(a.velocity);
    }
  }
  return log;
}

}  // namespace fixture
