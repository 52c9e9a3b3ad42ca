#pragma once

/**
 * @file episode_io.hpp
 * @brief JSON Lines episode logs.
 *
 * Line 1 is a header object {"type":"header","format":1,...} carrying the
 * scenario spec and sim config. Each following line is one frame
 * {"step":k,"p":[[x,y],...],"v":[[x,y],...]} with the robot first. The
 * last line is {"type":"outcome",...}. Doubles are written in shortest
 * round-trip form, so a reloaded log compares equal to the original.
 */

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "crowdbench/metrics.hpp"
#include "crowdbench/scenario.hpp"
#include "crowdbench/sim.hpp"

namespace crowdbench {

using Json = nlohmann::ordered_json;

inline constexpr int kEpisodeLogFormat = 1;

Json to_json(const Vec2& v);
Vec2 vec2_from_json(const Json& j);

Json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_spec_from_json(const Json& j);

Json to_json(const OrcaParams& params);
OrcaParams orca_params_from_json(const Json& j, OrcaParams defaults = {});

Json to_json(const SimConfig& config);
/// Missing keys keep the values in `defaults`.
SimConfig sim_config_from_json(const Json& j, SimConfig defaults = {});

Json to_json(const MetricConfig& cfg);
MetricConfig metric_config_from_json(const Json& j, MetricConfig defaults = {});

void write_episode_log(std::ostream& out, const EpisodeLog& log);
/// Throws IoError on malformed input.
EpisodeLog read_episode_log(std::istream& in);

std::string serialize_episode_log(const EpisodeLog& log);

void save_episode_log(const std::filesystem::path& path, const EpisodeLog& log);
EpisodeLog load_episode_log(const std::filesystem::path& path);

/// Writes `contents` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace crowdbench
