#include <gtest/gtest.h>

#include <cmath>

#include "torus_minmax/sweepout.hpp"
#include "torus_minmax/geodesic.hpp"

using namespace torus_minmax;

namespace {

const MetricConfig kLiouville = MetricConfig::liouville("2+cos(2*pi*y)");

DiscreteCurve wavy(std::size_t N, double base, double amp) {
  DiscreteCurve c = straight_curve({1, 0}, N, {0, base});
  for (auto& v : c.vertices) v.y += amp * std::sin(2 * kPi * v.x) + 0.5 * amp * std::cos(6 * kPi * v.x);
  return c;
}

}  // namespace

TEST(InitSweepout, FlatParallelLines) {
  const auto g = make_metric(MetricConfig::flat());
  const std::size_t M = 17;
  const SweepOut s = init_sweepout(g, straight_curve({1, 0}, 32, {0, 0.3}), M);
  ASSERT_EQ(s.size(), M);
  EXPECT_NEAR(s.max_length(), 1.0, 1e-14);
  EXPECT_NEAR(fineness(s), 1.0 / (M - 1), 1e-12);
  EXPECT_NEAR(degree_certificate(s), 1.0, 1e-12);
  EXPECT_TRUE(slices_ordered(s));
  EXPECT_EQ(s.slices.back().vertices, translate(s.slices.front(), Vec2i{0, 1}).vertices);
}

TEST(InitSweepout, LiouvilleMaxAtFactorMaximum) {
  const auto g = make_metric(kLiouville);
  const SweepOut s = init_sweepout(g, straight_curve({1, 0}, 32, {0, 0.5}), 33);
  EXPECT_NEAR(s.max_length(), std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(s.slices[s.argmax()].vertices[0].y, 1.0, 1e-12);
}

TEST(InitSweepout, CertificateIsOne) {
  const auto g = make_metric(kLiouville);
  for (double amp : {0.0, 0.05, 0.2})
    for (std::size_t M : {8u, 9u, 33u}) EXPECT_NEAR(degree_certificate(init_sweepout(g, wavy(40, 0.1, amp), M)), 1.0, 1e-12);
}

TEST(InitSweepout, RejectsBadInput) {
  const auto g = make_metric(MetricConfig::flat());
  EXPECT_THROW(init_sweepout(g, straight_curve({1, 0}, 16), 7), UsageError);
  EXPECT_THROW(init_sweepout(g, straight_curve({1, 1}, 16), 9), UsageError);
  DiscreteCurve c = straight_curve({1, 0}, 16);
  c.vertices[4].x = c.vertices[2].x;
  EXPECT_THROW(init_sweepout(g, c, 9), UsageError);
}

TEST(RelaxSweepout, FlatUnchanged) {
  const auto g = make_metric(MetricConfig::flat());
  SweepRelaxOptions o;
  o.max_iters = 300;
  const auto [s, rep] = relax_sweepout(g, init_sweepout(g, straight_curve({1, 0}, 32), 17), o);
  EXPECT_NEAR(rep.final_max, 1.0, 1e-6);
  EXPECT_NEAR(degree_certificate(s), 1.0, 1e-6);
}

TEST(RelaxSweepout, MaxNeverIncreasesAndCertificateHolds) {
  for (const auto& cfg : {kLiouville, MetricConfig::bangert_bump({0.5, 0.5}, 0.1, 10.0)}) {
    const auto g = make_metric(cfg);
    const auto m = relax_graph_curve(g, straight_curve({1, 0}, 48, {0, 0.1}), {}).first;
    const SweepOut s0 = init_sweepout(g, m, 17);
    double prev = s0.max_length();
    for (int iters : {5, 20, 80, 300}) {
      SweepRelaxOptions o;
      o.max_iters = iters;
      const auto [s, rep] = relax_sweepout(g, s0, o);
      EXPECT_LE(rep.final_max, rep.initial_max + 1e-12);
      EXPECT_LE(rep.final_max, prev + 1e-12);
      EXPECT_NEAR(degree_certificate(s), 1.0, 1e-6);
      EXPECT_EQ(s.slices.front().vertices, s0.slices.front().vertices);
      EXPECT_EQ(s.slices.back().vertices, s0.slices.back().vertices);
      prev = rep.final_max;
    }
  }
}

TEST(Interpolate, IdenticalCurvesGiveSingleMember) {
  const auto g = make_metric(kLiouville);
  const auto c = wavy(32, 0.4, 0.1);
  EXPECT_EQ(interpolate(g, c, c, 0.01).family.size(), 1u);
}

TEST(Interpolate, FlatParallelLines) {
  const auto g = make_metric(MetricConfig::flat());
  const auto r = interpolate(g, straight_curve({1, 0}, 32, {0, 0.2}), straight_curve({1, 0}, 32, {0, 0.3}), 0.02);
  EXPECT_GE(r.family.size(), 6u);
  EXPECT_LE(r.max_step_distance, 0.02 + 1e-12);
  for (double L : r.lengths) EXPECT_LE(L, 1 + 4 * 0.02);
}

TEST(Interpolate, LiouvilleNearMinimizer) {
  const auto g = make_metric(kLiouville);
  const double delta = 0.01;
  const auto c0 = straight_curve({1, 0}, 32, {0, 0.5}), c1 = wavy(32, 0.53, 0.02);
  const auto r = interpolate(g, c0, c1, delta);
  EXPECT_LE(r.max_step_distance, delta + 1e-12);
  const double top = std::max(curve_length(g, c0), curve_length(g, c1));
  EXPECT_LE(r.C0, 4.0);
  for (double L : r.lengths) EXPECT_LE(L, top + r.C0 * delta + 1e-12);
}

TEST(Interpolate, RejectsFarOrMismatchedCurves) {
  const auto g = make_metric(MetricConfig::flat());
  EXPECT_THROW(interpolate(g, straight_curve({1, 0}, 32), straight_curve({1, 0}, 32, {0, 0.5}), 1e-6, 100),
               UsageError);
  EXPECT_THROW(interpolate(g, straight_curve({1, 0}, 32), straight_curve({1, 0}, 16), 0.1), UsageError);
}
