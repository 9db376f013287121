#include <gtest/gtest.h>

#include <cmath>

#include "torus_minmax/stable_norm.hpp"
#include "torus_minmax/rng.hpp"

using namespace torus_minmax;

namespace {

const MetricConfig kLiouville = MetricConfig::liouville("2+cos(2*pi*y)");

StableNormOptions lean() {
  StableNormOptions o;
  o.N = 96;
  o.n_starts = 8;
  return o;
}

template <class F>
double simpson(F f, int n = 4000) {
  const double h = 1.0 / n;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

MetricConfig random_fourier(std::uint64_t seed) {
  const CounterRng rng(seed, "fourier");
  FourierSeries s;
  s.mean = 1.5;
  int c = 0;
  for (int j = 0; j <= 2; ++j)
    for (int k = -2; k <= 2; ++k) {
      if (j == 0 && k <= 0) continue;
      s.terms.push_back({j, k, rng.uniform(c++, -0.08, 0.08), rng.uniform(c++, -0.08, 0.08)});
    }
  return MetricConfig::fourier_factor(s);
}

}  // namespace

TEST(StableNorm, FlatIsEuclidean) {
  const auto g = make_metric(MetricConfig::flat());
  EXPECT_NEAR(stable_norm(g, HomologyClass::curve(3, 4), lean()).S, 5.0, 1e-6);
  EXPECT_NEAR(stable_norm(g, HomologyClass::curve(1, 0), lean()).S, 1.0, 1e-9);
}

TEST(StableNorm, LiouvilleHorizontalHasUniqueMinimizer) {
  const auto res = stable_norm(make_metric(kLiouville), HomologyClass::curve(1, 0), lean());
  EXPECT_NEAR(res.S, 1.0, 1e-4);
  ASSERT_EQ(res.minimizers.size(), 1u);
  for (const auto& v : res.minimizers.front().vertices) {
    const double y = v.y - std::floor(v.y);
    EXPECT_NEAR(y, 0.5, 1e-3);
  }
}

TEST(StableNorm, LiouvilleVerticalMatchesQuadrature) {
  const double oracle = simpson([](double y) { return std::sqrt(2 + std::cos(2 * kPi * y)); });
  const auto res = stable_norm(make_metric(kLiouville), HomologyClass::curve(0, 1), lean());
  EXPECT_NEAR(res.S, oracle, 1e-4);
  for (const auto& m : res.minimizers) EXPECT_EQ(m.rotation, (Vec2i{0, 1}));
}

TEST(StableNorm, MultiplicityScales) {
  const auto g = make_metric(random_fourier(2));
  const double s1 = stable_norm(g, HomologyClass::curve(1, 1), lean()).S;
  EXPECT_NEAR(stable_norm(g, HomologyClass::curve(3, 3), lean()).S, 3 * s1, 1e-12);
}

TEST(StableNorm, ComparisonAndOracleSandwich) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto g = make_metric(random_fourier(40 + s));
    for (const auto& r : {HomologyClass::curve(1, 0), HomologyClass::curve(1, 1), HomologyClass::curve(2, -1)}) {
      const auto res = stable_norm(g, r, lean());
      EXPECT_GE(res.S, std::sqrt(metric_bounds(g).lambda) * r.euclidean_norm() * (1 - 1e-9));
      EXPECT_LE(res.S, std::sqrt(metric_bounds(g).Lambda) * r.euclidean_norm());
      EXPECT_LE(res.S, res.dp_length * (1 + 1e-9)) << r.str();
      EXPECT_GT(res.converged_starts, 0);
    }
  }
}

TEST(StableNorm, DeterministicGivenSeed) {
  const auto g = make_metric(random_fourier(7));
  auto o = lean();
  o.seed = 11;
  const auto a = stable_norm(g, HomologyClass::curve(2, 1), o);
  const auto b = stable_norm(g, HomologyClass::curve(2, 1), o);
  EXPECT_EQ(a.S, b.S);
  ASSERT_EQ(a.minimizers.size(), b.minimizers.size());
  for (std::size_t i = 0; i < a.minimizers.size(); ++i) EXPECT_EQ(a.minimizers[i].vertices, b.minimizers[i].vertices);
}

TEST(ConvexityGap, FlatExamples) {
  const auto g = make_metric(MetricConfig::flat());
  EXPECT_NEAR(convexity_gap(g, HomologyClass::curve(1, 0), HomologyClass::curve(0, 1), lean()), 2 - std::sqrt(2.0),
              2e-3);
  EXPECT_NEAR(convexity_gap(g, HomologyClass::curve(2, 1), HomologyClass::curve(1, 2), lean()),
              2 * std::sqrt(5.0) - 3 * std::sqrt(2.0), 2e-3);
}

TEST(ConvexityGap, LiouvillePositive) {
  EXPECT_GT(convexity_gap(make_metric(kLiouville), HomologyClass::curve(1, 0), HomologyClass::curve(0, 1), lean()),
            0.0);
}

TEST(ConvexityGap, RejectsDependentClasses) {
  EXPECT_THROW(convexity_gap(make_metric(MetricConfig::flat()), HomologyClass::curve(1, 2), HomologyClass::curve(2, 4)),
               UsageError);
}
