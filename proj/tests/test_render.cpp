#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>

#include "crowdbench/errors.hpp"
#include "crowdbench/render.hpp"
#include "fixtures.hpp"

using namespace crowdbench;

namespace {

std::string attribute_of(const std::string& svg, const std::string& element_id, const std::string& attr) {
  const std::regex re("<[^>]*id=\"" + element_id + "\"[^>]*>");
  std::smatch m;
  if (!std::regex_search(svg, m, re)) return {};
  const std::string tag = m.str();
  const std::regex a(attr + "=\"([^\"]*)\"");
  std::smatch v;
  return std::regex_search(tag, v, a) ? v[1].str() : std::string{};
}

std::vector<std::pair<double, double>> points(const std::string& list) {
  std::vector<std::pair<double, double>> out;
  std::istringstream in(list);
  std::string pair;
  while (in >> pair) {
    const auto comma = pair.find(',');
    out.emplace_back(std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1)));
  }
  return out;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Render, EmptySceneIsOneStraightSegment) {
  ScenarioSpec s;
  s.kind = ScenarioKind::random;
  s.robot_start = {0, -4};
  s.robot_goal = {0, 4};
  auto policy = make_builtin_policy(BuiltinPolicy::goal_greedy, OrcaParams{});
  const EpisodeLog log = run_episode(s, *policy, SimConfig{});
  const std::string svg = render_trajectory_svg(log);

  const auto pts = points(attribute_of(svg, "agent-0", "points"));
  ASSERT_EQ(pts.size(), log.frames.size());
  for (const auto& [x, y] : pts) EXPECT_EQ(x, pts.front().first);
  // y axis points up: start is below the goal on screen, 50 px per meter.
  EXPECT_DOUBLE_EQ(pts.front().second - pts.back().second, 8.0 * 50.0);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_LT(pts[i].second, pts[i - 1].second);

  EXPECT_EQ(count(svg, "class=\"start robot-start\""), 1u);
  EXPECT_EQ(count(svg, "class=\"goal robot-goal\""), 1u);
  EXPECT_EQ(count(svg, "class=\"violation\""), 0u);
  EXPECT_EQ(count(svg, "class=\"collision\""), 0u);
  EXPECT_NE(svg.find("Blue dot: robot start"), std::string::npos);
  EXPECT_NE(svg.find("Black star: robot destination"), std::string::npos);
}

TEST(Render, PassingEpisodeHasHumanMarkers) {
  const ScenarioSpec s = sample_scenario(ScenarioKind::passing, 1, -4.0, 3);
  auto policy = make_builtin_policy(BuiltinPolicy::orca, OrcaParams{});
  const EpisodeLog log = run_episode(s, *policy, SimConfig{});
  const std::string svg = render_trajectory_svg(log);
  EXPECT_EQ(count(svg, "class=\"start human-start\""), 1u);
  EXPECT_EQ(count(svg, "class=\"goal human-goal\""), 1u);
  EXPECT_EQ(points(attribute_of(svg, "agent-1", "points")).size(), log.frames.size());
}

TEST(Render, ViolationFramesMatchPersonalSpaceFlags) {
  const EpisodeLog log = fixture::approach_log(0.3, 0.25, 40, ScenarioKind::passing);
  MetricConfig cfg;
  cfg.epsilon = 0.5;
  const auto flags = personal_space_flags(log, cfg);
  std::set<std::size_t> expected;
  for (std::size_t f = 0; f < flags.size(); ++f) {
    if (flags[f]) expected.insert(f);
  }
  ASSERT_FALSE(expected.empty());

  const std::string svg = render_trajectory_svg(log, cfg);
  std::set<std::size_t> drawn;
  const std::regex re("class=\"violation-frame\"[^>]*data-frame=\"(\\d+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
    drawn.insert(std::stoul((*it)[1].str()));
  }
  EXPECT_EQ(drawn, expected);
  EXPECT_GE(count(svg, "class=\"violation\""), 1u);
}

TEST(Render, CollisionIsMarked) {
  ScenarioSpec s;
  s.kind = ScenarioKind::passing;
  s.robot_start = {0, -4};
  s.robot_goal = {0, 4};
  s.humans.push_back({{0, 0}, {0, 0}, 1.0, 0.2});
  auto policy = make_builtin_policy(BuiltinPolicy::goal_greedy, OrcaParams{});
  const EpisodeLog log = run_episode(s, *policy, SimConfig{});
  ASSERT_EQ(log.outcome, Outcome::collision);
  EXPECT_GE(count(render_trajectory_svg(log), "class=\"collision\""), 1u);
}

TEST(Render, WritesFileAndReportsFailures) {
  const EpisodeLog log = fixture::approach_log(1.0, 0.25, 10, ScenarioKind::passing);
  const auto path = std::filesystem::temp_directory_path() / "crowdbench_render_test.svg";
  render_trajectory(log, path);
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  EXPECT_NE(first.find("<svg"), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_THROW(render_trajectory(log, "/proc/crowdbench/none.svg"), IoError);
}
