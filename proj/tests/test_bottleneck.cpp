#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "torus_minmax/bottleneck.hpp"

using namespace torus_minmax;

namespace {

const MetricConfig kLiouville = MetricConfig::liouville("2+cos(2*pi*y)");

double state_length(const PeriodicMetric& g, const std::vector<int>& h, int nx, int ny) {
  return curve_length(g, grid_state_curve(h, nx, ny));
}

// Raise the columns one at a time, ny times over: a valid single-column path
// from a flat-ish lattice minimizer to its translate.
double column_sweep_max(const PeriodicMetric& g, std::vector<int> h, int nx, int ny) {
  double m = state_length(g, h, nx, ny);
  for (int k = 0; k < ny; ++k)
    for (int i = 0; i < nx; ++i) {
      ++h[static_cast<std::size_t>(i)];
      m = std::max(m, state_length(g, h, nx, ny));
    }
  return m;
}

}  // namespace

TEST(Bottleneck, FlatGridWidth) {
  const auto r = bottleneck_oracle(make_metric(MetricConfig::flat()), {8, 8, 2, 2, std::uint64_t{1} << 26, true});
  EXPECT_NEAR(r.S_grid, 1.0, 1e-12);
  // Mid-sweep a raised run of columns has one diagonal up and one down.
  EXPECT_NEAR(r.omega_grid, 0.75 + 2 * std::sqrt(2.0) / 8, 1e-12);
}

TEST(Bottleneck, PathIsValidSingleColumnMoves) {
  const auto g = make_metric(kLiouville);
  const auto r = bottleneck_oracle(g);
  ASSERT_GE(r.path.size(), 2u);
  EXPECT_EQ(r.path.size(), r.path_lengths.size());
  for (std::size_t k = 0; k + 1 < r.path.size(); ++k) {
    int changed = 0;
    for (std::size_t i = 0; i < r.path[k].size(); ++i) {
      const int d = r.path[k + 1][i] - r.path[k][i];
      EXPECT_LE(std::abs(d), 1);
      changed += d != 0;
    }
    EXPECT_EQ(changed, 1);
  }
  for (std::size_t i = 0; i < r.path.front().size(); ++i) EXPECT_EQ(r.path.back()[i], r.path.front()[i] + r.ny);
  EXPECT_DOUBLE_EQ(*std::max_element(r.path_lengths.begin(), r.path_lengths.end()), r.omega_grid);
  for (std::size_t k = 0; k < r.path.size(); k += 7)
    EXPECT_NEAR(r.path_lengths[k], state_length(g, r.path[k], r.nx, r.ny), 1e-12);
}

TEST(Bottleneck, LiouvilleSandwich) {
  const auto g = make_metric(kLiouville);
  const auto r = bottleneck_oracle(g);
  EXPECT_LE(r.S_grid, r.omega_grid);
  EXPECT_LE(r.omega_grid, column_sweep_max(g, r.path.front(), r.nx, r.ny) + 1e-12);
  EXPECT_NEAR(r.S_grid, 1.0, 1e-2);
}

TEST(Bottleneck, RefinementIsStable) {
  const auto g = make_metric(kLiouville);
  const auto coarse = bottleneck_oracle(g);
  const auto fine = bottleneck_oracle(g, {12, 12, 2, 2, std::uint64_t{1} << 26, true});
  EXPECT_LT(std::abs(fine.omega_grid - coarse.omega_grid) / coarse.omega_grid, 0.10);
}

TEST(Bottleneck, RejectsOversizedStateSpace) {
  BottleneckOptions o{12, 12, 2, 2, 1000, false};
  EXPECT_THROW(bottleneck_oracle(make_metric(MetricConfig::flat()), o), UsageError);
  o = {4, 8, 2, 2, std::uint64_t{1} << 26, true};
  EXPECT_THROW(bottleneck_oracle(make_metric(MetricConfig::flat()), o), UsageError);
}
