#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "torus_minmax/classes.hpp"
#include "torus_minmax/curve.hpp"
#include "torus_minmax/rng.hpp"

using namespace torus_minmax;

namespace {

const MetricConfig kLiouville = MetricConfig::liouville("2+cos(2*pi*y)");

Vec2i apply_inverse(const Mat2i& U, Vec2i v) { return U.inverse_unimodular() * v; }

// Composite Simpson on [0, 1] with n panels.
template <class F>
double simpson(F f, int n = 2000) {
  const double h = 1.0 / n;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(HomologyClass, ConventionsAndInvariants) {
  const auto r = HomologyClass::curve(2, 3);
  EXPECT_EQ(r.normal_direction(), (Vec2i{-3, 2}));
  const Vec2i n = r.normal_direction(), c = r.curve_class();
  EXPECT_EQ(n.a * c.a + n.b * c.b, 0);
  EXPECT_EQ(HomologyClass::from_normal(0, 1), HomologyClass::curve(1, 0));
  EXPECT_TRUE(r.primitive());
  EXPECT_FALSE(HomologyClass::curve(4, 6).primitive());
  EXPECT_THROW(HomologyClass::curve(0, 0), UsageError);
}

TEST(ReduceClass, NonPrimitive) {
  const auto red = reduce_class(HomologyClass::curve(4, 6));
  EXPECT_EQ(red.primitive, HomologyClass::curve(2, 3));
  EXPECT_EQ(red.multiplicity, 2);
  EXPECT_EQ(red.U.det(), 1);
  EXPECT_EQ(red.U * (Vec2i{2, 3}), (Vec2i{1, 0}));
}

TEST(ReduceClass, IdentityForUnitClass) {
  const auto red = reduce_class(HomologyClass::curve(1, 0));
  EXPECT_EQ(red.primitive, HomologyClass::curve(1, 0));
  EXPECT_EQ(red.multiplicity, 1);
  EXPECT_TRUE(red.U.is_identity());
}

TEST(ReduceClass, VerticalIsRotation) {
  const auto red = reduce_class(HomologyClass::curve(0, 1));
  EXPECT_EQ(red.multiplicity, 1);
  EXPECT_EQ(red.U, (Mat2i{0, 1, -1, 0}));
}

TEST(ReduceClass, RoundTripOnRandomClasses) {
  const CounterRng rng(21, "classes");
  for (int i = 0; i < 200; ++i) {
    const auto a = static_cast<std::int64_t>(std::floor(rng.uniform(2 * i, -500.0, 501.0)));
    const auto b = static_cast<std::int64_t>(std::floor(rng.uniform(2 * i + 1, -500.0, 501.0)));
    if (a == 0 && b == 0) continue;
    const auto r = HomologyClass::curve(a, b);
    const auto red = reduce_class(r);
    ASSERT_EQ(red.U.det(), 1);
    EXPECT_EQ(red.multiplicity, std::gcd(std::llabs(a), std::llabs(b)));
    EXPECT_EQ(red.multiplicity * apply_inverse(red.U, {1, 0}), (Vec2i{a, b})) << r.str();
    EXPECT_TRUE(red.primitive.primitive());
  }
}

TEST(ReduceClass, EntriesAreMinimalInFamily) {
  // Every U with U p = (1, 0) is (s + k q, t - k p; -q, p); compare against a brute-force scan.
  for (const auto& [p, q] : {std::pair{3, 5}, {5, 8}, {7, -2}, {-4, 9}, {13, 1}}) {
    const auto red = reduce_class(HomologyClass::curve(p, q));
    const auto cost = [](std::int64_t s, std::int64_t t) -> std::int64_t { return std::llabs(s) + std::llabs(t); };
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t s = -50; s <= 50; ++s)
      for (std::int64_t t = -50; t <= 50; ++t)
        if (s * p + t * q == 1) best = std::min(best, cost(s, t));
    EXPECT_EQ(cost(red.U.m00, red.U.m01), best);
  }
}

TEST(Convergents, Golden) {
  const auto seq = convergents(DirectionTarget::golden(), 5);
  EXPECT_FALSE(seq.exhausted);
  const std::vector<std::pair<int, int>> expect{{1, 1}, {2, 1}, {3, 2}, {5, 3}, {8, 5}};
  ASSERT_EQ(seq.classes.size(), expect.size());
  for (std::size_t k = 0; k < expect.size(); ++k) {
    EXPECT_EQ(seq.classes[k].b(), expect[k].first);
    EXPECT_EQ(seq.classes[k].a(), expect[k].second);
  }
}

TEST(Convergents, Sqrt2) {
  const auto seq = convergents(DirectionTarget::sqrt2(), 3);
  ASSERT_EQ(seq.classes.size(), 3u);
  EXPECT_EQ(seq.classes[0], HomologyClass::curve(1, 1));
  EXPECT_EQ(seq.classes[1], HomologyClass::curve(2, 3));
  EXPECT_EQ(seq.classes[2], HomologyClass::curve(5, 7));
}

TEST(Convergents, RationalExhausts) {
  const auto seq = convergents(DirectionTarget::rational(0, 1), 3);
  EXPECT_TRUE(seq.exhausted);
  ASSERT_EQ(seq.classes.size(), 1u);
  EXPECT_EQ(seq.classes[0], HomologyClass::curve(1, 0));
}

TEST(Convergents, RejectsInvalidTargets) {
  EXPECT_THROW(convergents(DirectionTarget{{1, 0}, {}}, 2), UsageError);
  EXPECT_THROW(convergents(DirectionTarget::golden(), 0), UsageError);
}

TEST(Convergents, AlternateAndApproximate) {
  for (const auto& t : {DirectionTarget::golden(), DirectionTarget::sqrt2(), DirectionTarget{{0, 3}, {1, 2, 5}}}) {
    const double alpha = t.value();
    const auto seq = convergents(t, 20);
    for (std::size_t k = 0; k < seq.classes.size(); ++k) {
      const auto& c = seq.classes[k];
      EXPECT_TRUE(c.primitive());
      const double q = static_cast<double>(c.a()), err = alpha - static_cast<double>(c.b()) / q;
      // Even convergents lie below, odd above.
      if (std::abs(err) > 1e-14) {
        EXPECT_EQ(err > 0, k % 2 == 0) << k;
      }
      EXPECT_LT(std::abs(err), 1.0 / (q * q));
    }
  }
}

TEST(DirectionTarget, ValueMatchesClosedForms) {
  EXPECT_NEAR(DirectionTarget::golden().value(), (1 + std::sqrt(5.0)) / 2, 1e-15);
  EXPECT_NEAR(DirectionTarget::sqrt2().value(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(DirectionTarget::rational(7, 5).value(), 1.4, 1e-15);
}

TEST(PullBack, FlatGivesConstantGram) {
  const auto g = make_metric(MetricConfig::flat());
  const Mat2i U{2, 1, 1, 1};
  const auto h = pull_back_metric(g, U);
  EXPECT_EQ(h.kind(), MetricKind::FullTensor);
  for (const Vec2 p : {Vec2{0.1, 0.2}, Vec2{0.7, 0.9}, Vec2{-3.3, 5.1}}) {
    const Mat2 m = metric_at(h, p);
    EXPECT_DOUBLE_EQ(m.m00, 5.0);
    EXPECT_DOUBLE_EQ(m.m01, 3.0);
    EXPECT_DOUBLE_EQ(m.m11, 2.0);
  }
  EXPECT_THROW(pull_back_metric(g, Mat2i{2, 0, 0, 1}), UsageError);
}

TEST(PullBack, IdentityPreservesLengths) {
  const auto g = make_metric(kLiouville);
  const auto h = pull_back_metric(g, Mat2i::identity());
  const CounterRng rng(4, "curves");
  for (int i = 0; i < 10; ++i) {
    DiscreteCurve c = straight_curve({1, 0}, 32);
    for (std::size_t j = 0; j < c.size(); ++j) c.vertices[j].y += rng.uniform(64 * i + j, -0.3, 0.3);
    EXPECT_NEAR(curve_length(h, c), curve_length(g, c), 1e-12);
  }
}

TEST(PullBack, ShearMapsClasses) {
  const auto g = make_metric(kLiouville);
  const Mat2i U{1, 1, 0, 1};
  const auto h = pull_back_metric(g, U);
  // U (0, 1) = (1, 1): the straight vertical curve under U*g is the diagonal under g.
  const DiscreteCurve c = straight_curve({0, 1}, 256);
  const DiscreteCurve d = straight_curve({1, 1}, 256);
  EXPECT_NEAR(curve_length(h, c, 4), curve_length(g, d, 4), 1e-9);
  const double oracle = std::sqrt(2.0) * simpson([](double t) { return std::sqrt(2 + std::cos(2 * kPi * t)); });
  EXPECT_NEAR(curve_length(g, d, 4), oracle, 1e-9);
  // The general identity on a wiggly curve.
  DiscreteCurve w = straight_curve({1, 0}, 64);
  for (std::size_t j = 0; j < w.size(); ++j) w.vertices[j].y = 0.2 * std::sin(2 * kPi * w.vertices[j].x);
  EXPECT_NEAR(curve_length(h, w), curve_length(g, map_curve(w, U)), 1e-12);
}

TEST(PullBack, PositiveAndPeriodic) {
  const auto g = make_metric(MetricConfig::bangert_bump({0.5, 0.5}, 0.1, 10.0));
  const auto h = pull_back_metric(g, Mat2i{2, 3, 1, 2});
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const Vec2 p{std::ldexp(i, -5), std::ldexp(j, -5)};
      const Mat2 a = metric_at(h, p), b = metric_at(h, p + Vec2{3, -2});
      EXPECT_GT(sym_eigenvalues(a).first, 0.0);
      EXPECT_EQ(a.m00, b.m00);
      EXPECT_EQ(a.m01, b.m01);
      EXPECT_EQ(a.m11, b.m11);
    }
}
