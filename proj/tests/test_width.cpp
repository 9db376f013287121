#include <gtest/gtest.h>

#include <cmath>

#include "torus_minmax/width.hpp"

using namespace torus_minmax;

namespace {

const MetricConfig kLiouville = MetricConfig::liouville("2+cos(2*pi*y)");
const MetricConfig kBump = MetricConfig::bangert_bump({0.5, 0.5}, 0.1, 10.0);

BarrierOptions lean(std::size_t N = 64) {
  BarrierOptions o;
  o.width.stable.N = N;
  o.width.stable.n_starts = 8;
  o.width.M = 17;
  o.width.n_sweep_starts = 2;
  o.width.grid = {8, 8, 2, 2, std::uint64_t{1} << 26, true};
  return o;
}

}  // namespace

TEST(Barrier, FlatHasNoBarrier) {
  const auto g = make_metric(MetricConfig::flat());
  for (const auto& r : {HomologyClass::curve(1, 0), HomologyClass::curve(2, 1)}) {
    const auto rec = barrier(g, r, lean(resolution_for(r)));
    EXPECT_NEAR(rec.S, r.euclidean_norm(), 1e-6);
    EXPECT_NEAR(rec.deltaW, 0.0, 1e-3) << r.str();
    EXPECT_NEAR(rec.certificate, 1.0, 1e-6);
  }
}

TEST(Barrier, LiouvilleFoliatedClass) {
  const auto r = HomologyClass::curve(1, 3);
  const auto rec = barrier(make_metric(kLiouville), r, lean(resolution_for(r)));
  EXPECT_NEAR(rec.deltaW, 0.0, 5e-3);
}

TEST(Barrier, LiouvilleHorizontalGap) {
  const auto g = make_metric(kLiouville);
  double prev = 0.0;
  for (std::size_t N : {48u, 96u}) {
    const auto rec = barrier(g, HomologyClass::curve(1, 0), lean(N));
    EXPECT_GE(rec.deltaW, 0.1) << N;
    if (prev > 0.0) {
      EXPECT_NEAR(rec.deltaW, prev, 0.05);
    }
    prev = rec.deltaW;
  }
}

TEST(Barrier, BumpHasBarrier) {
  const auto rec = barrier(make_metric(kBump), HomologyClass::curve(1, 0), lean());
  EXPECT_GE(rec.deltaW, 0.05);
}

TEST(Barrier, MultiplicityMonotone) {
  const auto g = make_metric(kBump);
  const auto r1 = barrier(g, HomologyClass::curve(1, 0), lean());
  const auto r2 = barrier(g, HomologyClass::curve(2, 0), lean());
  EXPECT_NEAR(r2.S, 2 * r1.S, 1e-12);
  EXPECT_LE(r2.deltaW, r1.deltaW + 5e-3);
}

TEST(Barrier, BoundedByTrivialClassWidth) {
  for (const auto& cfg : {kLiouville, kBump}) {
    const auto g = make_metric(cfg);
    WidthResult w;
    const auto rec = barrier(g, HomologyClass::curve(1, 0), lean(), &w);
    EXPECT_GE(rec.deltaW, -1e-4);
    EXPECT_LE(rec.deltaW, trivial_class_width(w.sweep) * 1.05);
  }
}

TEST(Barrier, OracleConsistentAtFineGrid) {
  for (const auto& cfg : {MetricConfig::flat(), kLiouville, kBump}) {
    auto o = lean();
    o.width.grid = {12, 12, 2, 2, std::uint64_t{1} << 26, true};
    const auto rec = barrier(make_metric(cfg), HomologyClass::curve(1, 0), o);
    ASSERT_TRUE(rec.omega_lower.has_value());
    EXPECT_LE(*rec.omega_lower, rec.omega_upper * 1.10);
  }
}

TEST(Barrier, RejectsNegativeBarrier) {
  EXPECT_DOUBLE_EQ(checked_barrier(0.99995, 1.0, "(1,0)"), 0.0);
  EXPECT_THROW(checked_barrier(0.9, 1.0, "(1,0)"), InvariantViolation);
}

TEST(Width, UpperBoundsStableNorm) {
  WidthOptions o = lean().width;
  o.bottleneck = false;
  for (const auto& cfg : {kLiouville, kBump}) {
    const auto w = width(make_metric(cfg), HomologyClass::curve(1, 1), o);
    EXPECT_GE(w.omega_upper, w.S - 1e-4);
    EXPECT_NEAR(degree_certificate(w.sweep), 1.0, 1e-6);
  }
}

TEST(BarrierSequence, FlatGolden) {
  auto o = lean();
  o.width.bottleneck = false;
  const auto seq = barrier_sequence(make_metric(MetricConfig::flat()), DirectionTarget::golden(), 5, o, 32);
  ASSERT_EQ(seq.records.size(), 5u);
  for (const auto& r : seq.records) {
    EXPECT_TRUE(r.ok) << r.error;
    EXPECT_LE(r.deltaW, 2e-3);
    EXPECT_EQ(r.N, resolution_for(r.r, 32));
  }
  EXPECT_LE(seq.liminf_estimate, 2e-3);
  ASSERT_EQ(seq.normalized.size(), 5u);
  const double phi = DirectionTarget::golden().value();
  const Vec2 last = seq.normalized.back();
  EXPECT_NEAR(last.y / last.x, phi, 0.05);
  EXPECT_NEAR(norm(last), 1.0, 1e-6);
}

TEST(BarrierContinuity, ConstantIsFiniteAndStable) {
  auto o = lean(48);
  o.width.bottleneck = false;
  const auto pts = barrier_continuity(kLiouville, HomologyClass::curve(1, 0), {0.02, 0.01, 0.005}, o);
  ASSERT_EQ(pts.size(), 3u);
  for (const auto& p : pts) {
    EXPECT_TRUE(std::isfinite(p.K));
    EXPECT_LT(p.K, 50.0);
  }
}
