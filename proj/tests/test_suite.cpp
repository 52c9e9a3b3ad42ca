#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "crowdbench/errors.hpp"
#include "crowdbench/suite.hpp"

using namespace crowdbench;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.scenarios = {{ScenarioKind::circular_crossing, 6},
                 {ScenarioKind::parallel_traffic, 4},
                 {ScenarioKind::passing, 5},
                 {ScenarioKind::crossing, 3}};
  c.master_seed = 17;
  c.policy = "orca";
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

/// Relative path -> contents, for every file except the wall-clock sidecar.
std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).generic_string();
    if (rel == "timestamps.json") continue;
    out[rel] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST(EpisodeSeed, DistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (ScenarioKind k : kAllScenarioKinds) {
    for (EpisodeSet set : {EpisodeSet::invisible, EpisodeSet::visible}) {
      for (std::uint32_t i = 0; i < 200; ++i) {
        const std::uint64_t s = episode_seed(5, k, set, i);
        EXPECT_EQ(s, episode_seed(5, k, set, i));
        seen.insert(s);
      }
    }
  }
  EXPECT_EQ(seen.size(), kAllScenarioKinds.size() * 2 * 200);
  EXPECT_NE(episode_seed(5, ScenarioKind::passing, EpisodeSet::invisible, 0),
            episode_seed(6, ScenarioKind::passing, EpisodeSet::invisible, 0));
}

TEST(EpisodeNaming, IdsAndPaths) {
  EXPECT_EQ(episode_id(ScenarioKind::passing, EpisodeSet::visible, 7), "passing/visible/0007");
  EXPECT_EQ(episode_log_path(ScenarioKind::crossing, EpisodeSet::invisible, 12).generic_string(),
            "logs/crossing/invisible_0012.jsonl");
}

TEST(RunConfig, JsonRoundTripAndValidation) {
  RunConfig c = small_config();
  c.metrics.epsilon = 0.35;
  c.sim.time_limit = 30.0;
  const RunConfig back = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.scenarios, c.scenarios);
  EXPECT_FALSE(to_json(c).contains("threads"));
  EXPECT_FALSE(to_json(c).contains("out_dir"));

  RunConfig bad = small_config();
  bad.policy = "teleport";
  EXPECT_THROW(validate(bad), ConfigError);
  bad = small_config();
  bad.scenarios.clear();
  EXPECT_THROW(validate(bad), ConfigError);
  bad = small_config();
  bad.metrics.epsilon = -1;
  EXPECT_THROW(validate(bad), ConfigError);
  bad = small_config();
  bad.policy = "stdio:";
  EXPECT_THROW(validate(bad), ConfigError);
  EXPECT_THROW(run_config_from_json(Json::parse(R"({"scenarios":[{"kind":"flying","episodes":3}]})")),
               ConfigError);
  EXPECT_NO_THROW(validate(RunConfig{}));
}

TEST(RunSuite, ResultsIndependentOfThreadCount) {
  RunConfig one = small_config();
  RunConfig many = small_config();
  many.threads = 4;
  const SuiteResult a = run_suite(one);
  const SuiteResult b = run_suite(many);
  EXPECT_EQ(a.episodes, b.episodes);
  EXPECT_EQ(a.rows, b.rows);
  // Both sets for every kind.
  EXPECT_EQ(a.episodes.size(), 2u * (6 + 4 + 5 + 3));
  ASSERT_EQ(a.rows.size(), 4u);
  EXPECT_EQ(a.rows[0].kind, "circular_crossing");
  EXPECT_TRUE(a.rows[2].agg.side_applicable);
  EXPECT_FALSE(a.rows[0].agg.side_applicable);
}

TEST(RunSuite, ScheduleIsInvisibleThenVisible) {
  RunConfig c = small_config();
  const SuiteResult r = run_suite(c);
  std::size_t i = 0;
  for (EpisodeSet set : {EpisodeSet::invisible, EpisodeSet::visible}) {
    for (const KindCount& kc : c.scenarios) {
      for (std::uint32_t k = 0; k < kc.episodes; ++k, ++i) {
        ASSERT_EQ(r.episodes[i].kind, kc.kind);
        ASSERT_EQ(r.episodes[i].set, set);
        ASSERT_EQ(r.episodes[i].index, k);
        ASSERT_EQ(r.episodes[i].seed, episode_seed(c.master_seed, kc.kind, set, k));
      }
    }
  }
  c.visible_set = false;
  EXPECT_EQ(run_suite(c).episodes.size(), 18u);
}

TEST(RunSuite, OutputsAreByteIdenticalAndRescore) {
  RunConfig c = small_config();
  c.out_dir = fresh_dir("crowdbench_suite_a");
  run_suite(c);
  c.out_dir = fresh_dir("crowdbench_suite_b");
  c.threads = 3;
  run_suite(c);
  const auto a = tree(fs::temp_directory_path() / "crowdbench_suite_a");
  const auto b = tree(c.out_dir);
  EXPECT_EQ(a, b);
  for (const char* f : {"manifest.json", "episodes.json", "episodes.csv", "report.md", "report.csv",
                        "report.json", "logs/passing/visible_0004.jsonl"}) {
    EXPECT_TRUE(a.count(f)) << f;
  }
  EXPECT_TRUE(fs::exists(c.out_dir / "timestamps.json"));

  const RescoreResult r = rescore_run(c.out_dir);
  EXPECT_TRUE(r.ok()) << (r.mismatches.empty() ? "" : r.mismatches.front());
  EXPECT_EQ(r.episodes, 36u);
}

TEST(RunSuite, RescoreDetectsTampering) {
  RunConfig c = small_config();
  c.scenarios = {{ScenarioKind::passing, 3}};
  c.out_dir = fresh_dir("crowdbench_suite_tamper");
  run_suite(c);
  ASSERT_TRUE(rescore_run(c.out_dir).ok());

  const fs::path report = c.out_dir / "report.csv";
  const std::string original = slurp(report);
  std::ofstream(report, std::ios::binary) << original << "\n";
  EXPECT_FALSE(rescore_run(c.out_dir).ok());
  std::ofstream(report, std::ios::binary) << original;
  ASSERT_TRUE(rescore_run(c.out_dir).ok());

  const fs::path log = c.out_dir / "logs/passing/invisible_0001.jsonl";
  std::string text = slurp(log);
  const auto pos = text.find("\"step\":5");
  ASSERT_NE(pos, std::string::npos);
  const auto p = text.find("\"p\":[[", pos);
  text.insert(p + 6, "1");
  std::ofstream(log, std::ios::binary) << text;
  EXPECT_FALSE(rescore_run(c.out_dir).ok());
  EXPECT_THROW(rescore_run(fresh_dir("crowdbench_suite_missing")), IoError);
}

TEST(RunSuite, SingleEpisodeSmoke) {
  RunConfig c;
  c.scenarios = {{ScenarioKind::crossing, 1}};
  c.visible_set = false;
  c.out_dir = fresh_dir("crowdbench_suite_smoke");
  const SuiteResult r = run_suite(c);
  ASSERT_EQ(r.episodes.size(), 1u);
  ASSERT_EQ(r.rows.size(), 1u);
  std::size_t logs = 0;
  for (const auto& e : fs::recursive_directory_iterator(c.out_dir / "logs")) logs += e.is_regular_file();
  EXPECT_EQ(logs, 1u);
  const auto rows = parse_report_csv(slurp(c.out_dir / "report.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].kind, "crossing");
  const Json manifest = Json::parse(slurp(c.out_dir / "manifest.json"));
  EXPECT_EQ(manifest["episode_count"], 1);
  EXPECT_EQ(manifest["version"], kArtifactVersion);
}

TEST(RunSuite, BridgePolicyEndToEnd) {
  RunConfig c;
  c.scenarios = {{ScenarioKind::passing, 3}, {ScenarioKind::crossing, 2}};
  c.policy = std::string("stdio:") + BRIDGE_CLIENT_PATH + " greedy";
  RunConfig builtin = c;
  builtin.policy = "goal_greedy";
  const SuiteResult a = run_suite(c);
  const SuiteResult b = run_suite(builtin);
  ASSERT_EQ(a.episodes.size(), b.episodes.size());
  EXPECT_EQ(a.aborted, 0u);
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    EXPECT_EQ(a.episodes[i].metrics.outcome, b.episodes[i].metrics.outcome);
  }
  EXPECT_EQ(a.rows[0].policy, "bridge:" + c.policy);

  RunConfig dying = c;
  dying.policy = std::string("stdio:") + BRIDGE_CLIENT_PATH + " die 3";
  const SuiteResult d = run_suite(dying);
  EXPECT_EQ(d.aborted, d.episodes.size());
  EXPECT_EQ(d.rows[0].agg.episodes, 0u);
  EXPECT_EQ(d.rows[0].agg.aborted, 3u);
}
