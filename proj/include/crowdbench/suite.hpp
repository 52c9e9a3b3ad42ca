#pragma once

/**
 * @file suite.hpp
 * @brief Batch evaluation: scheduling, persistence, aggregation, re-scoring.
 *
 * Output directory layout:
 *
 *   manifest.json         resolved config, seed table, outcome index
 *   timestamps.json       wall-clock start/finish (the only non-deterministic file)
 *   episodes.json         per-episode metric values, round-trip exact
 *   episodes.csv          the same, for spreadsheets
 *   report.md/.csv/.json  aggregate tables
 *   logs/<kind>/<set>_<index>.jsonl
 */

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "crowdbench/episode_io.hpp"
#include "crowdbench/metrics.hpp"
#include "crowdbench/report.hpp"
#include "crowdbench/scenario.hpp"
#include "crowdbench/sim.hpp"

namespace crowdbench {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Invisible-robot runs feed every metric except aggregated time; visible runs feed only that.
enum class EpisodeSet { invisible, visible };

std::string_view to_string(EpisodeSet set);

struct KindCount {
  ScenarioKind kind;
  std::uint32_t episodes;

  bool operator==(const KindCount&) const = default;
};

/// 500 episodes for each multi-human kind and 200 for each single-human kind.
std::vector<KindCount> default_kind_counts();

struct RunConfig {
  std::vector<KindCount> scenarios{default_kind_counts()};
  std::uint32_t n_humans{5};
  std::uint64_t master_seed{0};
  /// Robot start y; the goal is at -s_y_r.
  double s_y_r{-4.0};
  ScenarioParams scenario{};
  SimConfig sim{};
  MetricConfig metrics{};
  /// Built-in policy name, or "stdio:<command>" / "tcp:<port>" for an external client.
  std::string policy{"goal_greedy"};
  bool visible_set{true};
  std::chrono::milliseconds action_timeout{10000};

  /// Not part of the manifest: they must not change any output byte.
  std::filesystem::path out_dir;
  unsigned threads{1};
};

/// Throws ConfigError.
void validate(const RunConfig& config);

/// Serializes the fields that determine results (not out_dir or threads).
Json to_json(const RunConfig& config);
/// Missing keys keep the values in `defaults`. Throws ConfigError.
RunConfig run_config_from_json(const Json& j, RunConfig defaults = {});

/// seed = f(master, kind, set, index), stable across platforms.
std::uint64_t episode_seed(std::uint64_t master, ScenarioKind kind, EpisodeSet set,
                           std::uint32_t index);

std::string episode_id(ScenarioKind kind, EpisodeSet set, std::uint32_t index);
/// Relative to the output directory.
std::filesystem::path episode_log_path(ScenarioKind kind, EpisodeSet set, std::uint32_t index);

struct EpisodeRecord {
  ScenarioKind kind{ScenarioKind::circular_crossing};
  EpisodeSet set{EpisodeSet::invisible};
  std::uint32_t index{0};
  std::uint64_t seed{0};
  std::string abort_reason;
  std::uint64_t clipped_commands{0};
  MetricReport metrics;

  bool operator==(const EpisodeRecord&) const = default;
};

struct SuiteResult {
  std::vector<EpisodeRecord> episodes;  ///< in schedule order
  std::vector<ReportRow> rows;          ///< one per configured kind
  std::size_t aborted{0};
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/**
 * Runs every configured episode. Results do not depend on `threads`. When
 * out_dir is set, logs and reports are written there. Throws IoError or
 * ConfigError; policy failures only abort their episode.
 */
SuiteResult run_suite(const RunConfig& config, const ProgressFn& progress = {});

/// Aggregates records into per-kind rows (visible-set M_III merged in).
std::vector<ReportRow> build_rows(const RunConfig& config, std::span<const EpisodeRecord> records,
                                  const std::string& policy_name);

Json manifest_json(const RunConfig& config, std::span<const EpisodeRecord> records,
                   const std::string& policy_name);
Json episodes_json(std::span<const EpisodeRecord> records);
std::string episodes_csv(std::span<const EpisodeRecord> records);

struct RescoreResult {
  std::size_t episodes{0};
  std::vector<std::string> mismatches;

  bool ok() const { return mismatches.empty(); }
};

/**
 * Reloads every log listed in a run's manifest, re-scores it and compares
 * each value and each report document with what the run recorded.
 */
RescoreResult rescore_run(const std::filesystem::path& out_dir);

}  // namespace crowdbench
