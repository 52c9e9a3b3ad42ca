#include <gtest/gtest.h>

#include <random>

#include "crowdbench/errors.hpp"
#include "crowdbench/geometry.hpp"
#include "oracles.hpp"

using namespace crowdbench;

namespace {

OrientedRect unit_square_at(Vec2 center) { return {{center.x - 0.5, center.y}, {1.0, 0.0}, 1.0, 1.0}; }

OrientedRect random_rect(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  std::uniform_real_distribution<double> len(0.05, 3.0);
  std::uniform_real_distribution<double> wid(0.1, 1.0);
  const double a = ang(rng);
  return {{pos(rng), pos(rng)}, {std::cos(a), std::sin(a)}, len(rng), wid(rng)};
}

}  // namespace

TEST(RectFromAgent, MovingAgent) {
  const auto r = rect_from_agent({0, 0}, {1, 0}, 0.4, 1.0);
  EXPECT_EQ(r.direction, (Vec2{1, 0}));
  EXPECT_EQ(r.length, 1.0);
  EXPECT_EQ(r.width, 0.4);
  EXPECT_EQ(r.anchor, (Vec2{0, 0}));
}

TEST(RectFromAgent, StationaryAgentIsDegenerate) {
  const auto r = rect_from_agent({0, 0}, {0, 0}, 0.4, 1.0);
  EXPECT_EQ(r.length, 0.0);
  EXPECT_TRUE(r.degenerate());
  EXPECT_TRUE(rect_from_agent({0, 0}, {5e-7, 0}, 0.4, 1.0).degenerate());
}

TEST(RectFromAgent, LengthIsHorizonTimesSpeed) {
  const auto r = rect_from_agent({1, 1}, {0, 2}, 0.6, 1.0);
  EXPECT_EQ(r.direction, (Vec2{0, 1}));
  EXPECT_EQ(r.length, 2.0);
}

TEST(RectFromAgent, DoublingSpeedDoublesLength) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    const Vec2 v{u(rng), u(rng)};
    const double h = 0.5 + std::abs(u(rng));
    const auto a = rect_from_agent({0, 0}, v, 0.4, h);
    const auto b = rect_from_agent({0, 0}, v * 2.0, 0.4, h);
    EXPECT_EQ(b.length, 2.0 * a.length);
  }
}

TEST(RectFromAgent, RejectsBadInput) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(rect_from_agent({nan, 0}, {1, 0}, 0.4, 1.0), InvalidInput);
  EXPECT_THROW(rect_from_agent({0, 0}, {inf, 0}, 0.4, 1.0), InvalidInput);
  EXPECT_THROW(rect_from_agent({0, 0}, {1, 0}, 0.0, 1.0), InvalidInput);
  EXPECT_THROW(rect_from_agent({0, 0}, {1, 0}, 0.4, -1.0), InvalidInput);
}

TEST(RectFromAgent, CornersMatchDefinition) {
  const auto r = rect_from_agent({1, 2}, {0, 3}, 0.4, 1.0);
  const auto c = r.corners();
  EXPECT_EQ(c[0], (Vec2{1.2, 2}));
  EXPECT_EQ(c[1], (Vec2{1.2, 5}));
  EXPECT_EQ(c[2], (Vec2{0.8, 5}));
  EXPECT_EQ(c[3], (Vec2{0.8, 2}));
}

TEST(RectsIntersect, IdenticalSquares) {
  EXPECT_TRUE(rects_intersect(unit_square_at({0, 0}), unit_square_at({0, 0})));
}

TEST(RectsIntersect, DistantSquares) {
  EXPECT_FALSE(rects_intersect(unit_square_at({0, 0}), unit_square_at({10, 0})));
}

TEST(RectsIntersect, TouchingEdgesCount) {
  EXPECT_TRUE(rects_intersect(unit_square_at({0, 0}), unit_square_at({1, 0})));
}

TEST(RectsIntersect, CrossedBarsAgreeWithMonteCarlo) {
  const OrientedRect a{{0, 0}, {1, 0}, 2.0, 0.4};
  const OrientedRect b{{1, -1}, {0, 1}, 2.0, 0.4};
  EXPECT_TRUE(rects_intersect(a, b));
  std::mt19937_64 rng(3);
  EXPECT_TRUE(oracle::monte_carlo_overlap(oracle::from_rect(a), oracle::from_rect(b), 100000, rng));
}

TEST(RectsIntersect, DegenerateNeverIntersects) {
  const OrientedRect point{{0, 0}, {0, 0}, 0.0, 0.4};
  EXPECT_FALSE(rects_intersect(point, unit_square_at({0, 0})));
  EXPECT_FALSE(rects_intersect(unit_square_at({0, 0}), point));
  EXPECT_FALSE(rects_intersect(point, point));
}

TEST(RectsIntersect, RejectsNonUnitDirection) {
  const OrientedRect bad{{0, 0}, {2, 0}, 1.0, 0.4};
  EXPECT_THROW(rects_intersect(bad, unit_square_at({0, 0})), InvalidInput);
}

TEST(RectsIntersect, ProjectedPathExamples) {
  const auto robot = rect_from_agent({0, -2}, {0, 1}, 0.4, 1.0);
  const auto human = rect_from_agent({0, 2}, {0, -1}, 0.4, 1.0);
  EXPECT_FALSE(rects_intersect(robot, human));
  const auto robot_near = rect_from_agent({0, -0.6}, {0, 1}, 0.4, 1.0);
  const auto human_near = rect_from_agent({0, 0.6}, {0, -1}, 0.4, 1.0);
  EXPECT_TRUE(rects_intersect(robot_near, human_near));
}

TEST(RectsIntersect, SymmetricAndMatchesPolygonOracle) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const auto a = random_rect(rng);
    const auto b = random_rect(rng);
    const bool ab = rects_intersect(a, b);
    ASSERT_EQ(ab, rects_intersect(b, a));
    const auto qa = oracle::from_rect(a);
    const auto qb = oracle::from_rect(b);
    if (oracle::gap(qa, qb) == 0.0 || oracle::gap(qa, qb) > 1e-6) {
      ASSERT_EQ(ab, oracle::quads_overlap(qa, qb)) << "pair " << i;
      ++checked;
    }
  }
  EXPECT_GT(checked, 4900);
}

TEST(RectsIntersect, MonteCarloAgreementAwayFromContact) {
  std::mt19937_64 rng(99);
  std::mt19937_64 mc(100);
  int disagreements = 0;
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_rect(rng);
    const auto b = random_rect(rng);
    const auto qa = oracle::from_rect(a);
    const auto qb = oracle::from_rect(b);
    const double g = oracle::gap(qa, qb);
    const bool analytic = rects_intersect(a, b);
    if (g > 1e-6) {
      ++compared;
      disagreements += analytic != oracle::monte_carlo_overlap(qa, qb, 2000, mc);
    } else if (analytic) {
      // A witness must exist unless the overlap is a sliver below sampling resolution.
      ++compared;
      if (!oracle::monte_carlo_overlap(qa, qb, 20000, mc)) {
        disagreements += !oracle::quads_overlap(qa, qb);
      }
    }
  }
  EXPECT_EQ(disagreements, 0);
  EXPECT_GT(compared, 900);
}

TEST(MinCenterDistance, Basics) {
  const std::vector<Vec2> one{{3, 4}};
  EXPECT_EQ(min_center_distance({0, 0}, one), 5.0);
  const std::vector<Vec2> two{{1, 0}, {0, 2}};
  EXPECT_EQ(min_center_distance({0, 0}, two), 1.0);
  EXPECT_THROW(min_center_distance({0, 0}, std::span<const Vec2>{}), DomainError);
}

TEST(MinCenterDistance, MatchesExhaustiveScanAndIsInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> pts(50);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const Vec2 p{1, 1};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : pts) best = std::min(best, std::sqrt((q.x - 1) * (q.x - 1) + (q.y - 1) * (q.y - 1)));
    const double d = min_center_distance(p, pts);
    EXPECT_EQ(d, best);

    std::shuffle(pts.begin(), pts.end(), rng);
    EXPECT_EQ(min_center_distance(p, pts), d);

    const Vec2 shift{u(rng), u(rng)};
    std::vector<Vec2> moved;
    for (const auto& q : pts) moved.push_back(q + shift);
    EXPECT_NEAR(min_center_distance(p + shift, moved), d, 1e-12);
  }
}
