#include <gtest/gtest.h>

#include <cmath>

#include "torus_minmax/curve.hpp"
#include "torus_minmax/rng.hpp"

using namespace torus_minmax;

namespace {

DiscreteCurve graph(std::size_t N, double (*y)(double)) {
  DiscreteCurve c = straight_curve({1, 0}, N);
  for (auto& v : c.vertices) v.y = y(v.x);
  return c;
}

DiscreteCurve random_curve(const CounterRng& rng, std::uint64_t base, Vec2i rot) {
  DiscreteCurve c = straight_curve(rot, 24, {rng.uniform(base), rng.uniform(base + 1)});
  for (std::size_t j = 0; j < c.size(); ++j) {
    c.vertices[j].x += rng.uniform(base + 2 + 2 * j, -0.05, 0.05);
    c.vertices[j].y += rng.uniform(base + 3 + 2 * j, -0.05, 0.05);
  }
  return c;
}

}  // namespace

TEST(DiscreteCurve, PeriodicVertexAccess) {
  const DiscreteCurve c = straight_curve({2, 1}, 8);
  EXPECT_EQ(c.vertex(8), c.vertices[0] + (Vec2{2, 1}));
  EXPECT_EQ(c.vertex(-1), c.vertices[7] - (Vec2{2, 1}));
  EXPECT_EQ(c.vertex(-9), c.vertices[7] - (Vec2{4, 2}));
}

TEST(DiscreteCurve, ValidationRejectsShortAndNonFinite) {
  DiscreteCurve c = straight_curve({1, 0}, 7);
  EXPECT_THROW(c.validate(), UsageError);
  c = straight_curve({1, 0}, 8);
  c.vertices[3].y = std::nan("");
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(CurveLength, FlatStraightAndSignedArea) {
  const auto g = make_metric(MetricConfig::flat());
  EXPECT_NEAR(curve_length(g, straight_curve({3, 4}, 40)), 5.0, 1e-14);
  // Area under y = 0.25 + 0.1 sin(2 pi x) over one period is 0.25.
  const auto c = graph(64, [](double x) { return 0.25 + 0.1 * std::sin(2 * kPi * x); });
  EXPECT_NEAR(signed_area(c), 0.25, 1e-12);
  EXPECT_TRUE(is_graph(c));
}

TEST(Translate, ZeroIsIdentity) {
  const CounterRng rng(3, "translate");
  const DiscreteCurve c = random_curve(rng, 0, {1, 2});
  const DiscreteCurve t = translate(c, Vec2i{0, 0});
  EXPECT_EQ(t.vertices, c.vertices);
  EXPECT_EQ(t.rotation, c.rotation);
}

TEST(Translate, ShiftsLine) {
  const DiscreteCurve c = straight_curve({1, 0}, 16, {0.0, 0.5});
  const DiscreteCurve t = translate(c, Vec2i{0, 1});
  for (const auto& v : t.vertices) EXPECT_EQ(v.y, 1.5);
  EXPECT_EQ(t.rotation, c.rotation);
}

TEST(Translate, LengthInvariantUnderPeriodicMetrics) {
  const CounterRng rng(5, "translate-length");
  const auto g = make_metric(MetricConfig::conformal("2+cos(2*pi*y)+0.3*sin(2*pi*x)"));
  const Vec2i rots[] = {{1, 0}, {0, 1}, {1, 1}, {2, -1}};
  for (int i = 0; i < 50; ++i) {
    const DiscreteCurve c = random_curve(rng, 100 * static_cast<std::uint64_t>(i), rots[i % 4]);
    const Vec2i k{static_cast<std::int64_t>(std::floor(rng.uniform(100 * i + 98, -4, 5))),
                  static_cast<std::int64_t>(std::floor(rng.uniform(100 * i + 99, -4, 5)))};
    const double L = curve_length(g, c), Lt = curve_length(g, translate(c, k));
    EXPECT_NEAR(Lt, L, 1e-12 * L);
  }
}

TEST(Birkhoff, ParallelLines) {
  const DiscreteCurve a = straight_curve({1, 0}, 16, {0, 0.2});
  const DiscreteCurve b = straight_curve({1, 0}, 16, {0, 0.7});
  EXPECT_EQ(birkhoff_compare(a, b), BirkhoffOrder::Below);
  EXPECT_EQ(birkhoff_compare(b, a), BirkhoffOrder::Above);
  EXPECT_EQ(birkhoff_compare(a, a), BirkhoffOrder::Equal);
}

TEST(Birkhoff, TranslateIsBelow) {
  const auto c = graph(32, [](double x) { return 0.3 + 0.45 * std::sin(2 * kPi * x) * std::cos(6 * kPi * x); });
  for (int j = 1; j <= 3; ++j) {
    EXPECT_EQ(birkhoff_compare(c, translate(c, Vec2i{0, j})), BirkhoffOrder::Below);
    EXPECT_EQ(birkhoff_compare(c, translate(c, Vec2i{0, -j})), BirkhoffOrder::Above);
  }
}

TEST(Birkhoff, CrossingPair) {
  const auto a = graph(32, [](double x) { return 0.5 + 0.1 * std::sin(2 * kPi * x); });
  const auto b = graph(32, [](double x) { return 0.5 - 0.1 * std::sin(2 * kPi * x); });
  EXPECT_EQ(birkhoff_compare(a, b), BirkhoffOrder::Crossing);
}

TEST(Birkhoff, DifferentGridsCompareAtMergedBreakpoints) {
  // The tent dips below the line only between grid points of the coarse curve.
  DiscreteCurve coarse = straight_curve({1, 0}, 8, {0, 0.5});
  DiscreteCurve fine = straight_curve({1, 0}, 48, {0, 0.6});
  fine.vertices[3].y = 0.45;
  EXPECT_EQ(birkhoff_compare(coarse, fine), BirkhoffOrder::Crossing);
}

TEST(Birkhoff, RejectsNonGraphAndMismatchedRotation) {
  DiscreteCurve c = straight_curve({1, 0}, 16);
  c.vertices[5].x = c.vertices[3].x - 0.01;
  EXPECT_FALSE(is_graph(c));
  EXPECT_THROW(birkhoff_compare(c, straight_curve({1, 0}, 16)), UsageError);
  EXPECT_THROW(birkhoff_compare(straight_curve({1, 0}, 16), straight_curve({1, 1}, 16)), UsageError);
}

TEST(GraphArea, BetweenTranslatesIsOnePeriod) {
  const auto c = graph(40, [](double x) { return 0.2 * std::cos(2 * kPi * x); });
  EXPECT_NEAR(graph_area_between(c, translate(c, Vec2i{0, 1})), 1.0, 1e-12);
  EXPECT_NEAR(graph_sup_distance(c, translate(c, Vec2i{0, 1})), 1.0, 1e-12);
}

TEST(Resample, RestoresSpacing) {
  DiscreteCurve c = straight_curve({1, 1}, 32);
  for (std::size_t i = 0; i < 16; ++i) c.vertices[i] = 0.1 * c.vertices[i];
  EXPECT_GT(max_edge_length(c), 4 * mean_edge_length(c));
  const DiscreteCurve r = resample_arclength(c, 32);
  EXPECT_LE(max_edge_length(r), 4 * mean_edge_length(r));
  EXPECT_EQ(r.rotation, c.rotation);
  EXPECT_EQ(r.vertices[0], c.vertices[0]);
  const auto g = make_metric(MetricConfig::flat());
  EXPECT_NEAR(curve_length(g, r), std::sqrt(2.0), 1e-12);
}

TEST(MapCurve, MapsRotationAndVertices) {
  const DiscreteCurve c = straight_curve({1, 0}, 8, {0.25, 0.5});
  const DiscreteCurve m = map_curve(c, Mat2i{1, 0, 1, 1});
  EXPECT_EQ(m.rotation, (Vec2i{1, 1}));
  EXPECT_EQ(m.vertices[0], (Vec2{0.25, 0.75}));
}
