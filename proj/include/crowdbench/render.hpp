#pragma once

/**
 * @file render.hpp
 * @brief SVG trajectory plots.
 *
 * Conventions: blue dot = robot start, black star = robot destination,
 * hollow circles / crosses = human starts / goals. Frames inside the
 * personal-space threshold are drawn as red segments (class "violation")
 * and per-frame markers (class "violation-frame", attribute data-frame).
 * A collision is marked at the final frame (class "collision").
 */

#include <filesystem>
#include <string>

#include "crowdbench/metrics.hpp"
#include "crowdbench/sim.hpp"

namespace crowdbench {

std::string render_trajectory_svg(const EpisodeLog& log, const MetricConfig& cfg = {});

/// Throws IoError when the file cannot be written.
void render_trajectory(const EpisodeLog& log, const std::filesystem::path& path,
                       const MetricConfig& cfg = {});

}  // namespace crowdbench
