#pragma once

// Brute-force shortest cycle in a primitive class: Dijkstra on a lattice over
// the covering strip [0, 1] x R in reduced coordinates.

#include <array>
#include <cstdint>
#include <limits>
#include <queue>
#include <tuple>
#include <vector>

#include "classes.hpp"
#include "curve.hpp"
#include "metric.hpp"

namespace torus_minmax {

struct DpOptions {
  int nx = 64;
  int ny = 64;
  bool sixteen_neighbors = true;
};

struct DpRow {
  int row = 0;  ///< start height index j (start point (0, j / ny))
  double length = 0.0;
  DiscreteCurve reduced;  ///< lattice path in reduced coordinates, closes with rotation (1, 0)
};

struct DpResult {
  double length = 0.0;
  DiscreteCurve polyline;  ///< optimal lattice cycle in original coordinates
  DiscreteCurve reduced;
  std::vector<DpRow> rows;  ///< per start row, ascending by row
  ClassReduction reduction{HomologyClass::curve(1, 0), 1, {}};
};

namespace detail {

struct LatticeMove {
  int dx, dy;
};

inline std::vector<LatticeMove> lattice_moves(bool sixteen) {
  std::vector<LatticeMove> m{{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  if (sixteen) {
    for (int sx : {1, -1})
      for (int sy : {1, -1}) {
        m.push_back({sx * 1, sy * 2});
        m.push_back({sx * 2, sy * 1});
      }
  }
  return m;
}

}  // namespace detail

/// Lattice-optimal cycle of class r at resolution (nx, ny).
inline DpResult dp_min_cycle(const PeriodicMetric& g, const HomologyClass& r, const DpOptions& opt = {}) {
  if (!r.primitive()) throw UsageError("dp_min_cycle: class must be primitive");
  if (opt.nx < 8 || opt.ny < 8) throw UsageError("dp_min_cycle: grid must be at least 8x8");
  DpResult out;
  out.reduction = reduce_class(r);
  const PeriodicMetric rg = reduced_metric(g, out.reduction);
  const int nx = opt.nx, ny = opt.ny;
  const auto moves = detail::lattice_moves(opt.sixteen_neighbors);
  const std::size_t nm = moves.size();

  // Periodic edge-weight table.
  std::vector<double> w(static_cast<std::size_t>(nx * ny) * nm);
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < ny; ++k)
      for (std::size_t m = 0; m < nm; ++m) {
        const Vec2 a{static_cast<double>(i) / nx, static_cast<double>(k) / ny};
        const Vec2 b{static_cast<double>(i + moves[m].dx) / nx, static_cast<double>(k + moves[m].dy) / ny};
        w[(static_cast<std::size_t>(i * ny + k)) * nm + m] = segment_length(rg, a, b);
      }

  const int rows = 2 * ny + 1;  // heights j - ny .. j + ny
  const int cols = nx + 1;
  const std::size_t nodes = static_cast<std::size_t>(rows * cols);
  std::vector<double> dist(nodes);
  std::vector<std::int32_t> parent(nodes);
  using Item = std::pair<double, std::int32_t>;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < ny; ++j) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::fill(parent.begin(), parent.end(), -1);
    auto id = [&](int i, int dk) { return static_cast<std::int32_t>(dk * cols + i); };
    const std::int32_t src = id(0, ny), dst = id(nx, ny);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(src)] = 0.0;
    pq.push({0.0, src});
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[static_cast<std::size_t>(u)]) continue;
      if (u == dst) break;
      const int ui = u % cols, udk = u / cols;
      const int k = j + udk - ny;
      const int kmod = ((k % ny) + ny) % ny;
      const int imod = ui % nx;
      for (std::size_t m = 0; m < nm; ++m) {
        const int vi = ui + moves[m].dx, vdk = udk + moves[m].dy;
        if (vi < 0 || vi > nx || vdk < 0 || vdk >= rows) continue;
        const std::int32_t v = id(vi, vdk);
        const double nd = d + w[static_cast<std::size_t>(imod * ny + kmod) * nm + m];
        if (nd < dist[static_cast<std::size_t>(v)]) {
          dist[static_cast<std::size_t>(v)] = nd;
          parent[static_cast<std::size_t>(v)] = u;
          pq.push({nd, v});
        }
      }
    }
    DpRow row;
    row.row = j;
    row.length = dist[static_cast<std::size_t>(dst)];
    std::vector<Vec2> path;
    for (std::int32_t u = parent[static_cast<std::size_t>(dst)]; u >= 0; u = parent[static_cast<std::size_t>(u)]) {
      const int ui = u % cols, udk = u / cols;
      path.push_back({static_cast<double>(ui) / nx, static_cast<double>(j + udk - ny) / ny});
    }
    std::reverse(path.begin(), path.end());
    row.reduced.rotation = {1, 0};
    row.reduced.vertices = std::move(path);
    if (row.length < best) {
      best = row.length;
      out.reduced = row.reduced;
    }
    out.rows.push_back(std::move(row));
  }
  out.length = best;
  out.polyline = map_curve(out.reduced, out.reduction.U.inverse_unimodular());
  return out;
}

}  // namespace torus_minmax
