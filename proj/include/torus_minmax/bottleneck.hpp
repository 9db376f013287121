#pragma once

// Exhaustive min-max on a grid: (1, 0)-graphs are height vectors over nx
// columns, sweep-outs are paths moving one column by one step, and the
// grid width is the bottleneck value of the best path from a lattice
// minimizer to its (0, 1)-translate.

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "classes.hpp"
#include "curve.hpp"
#include "metric.hpp"
#include "rng.hpp"

namespace torus_minmax {

struct BottleneckOptions {
  int nx = 8;
  int ny = 8;
  int bands = 2;             ///< heights range over bands * ny levels
  int s_max = 2;             ///< max height change between adjacent columns
  std::uint64_t state_cap = std::uint64_t{1} << 26;
  bool auto_reduce = true;   ///< lower s_max until the state count fits the cap
};

struct BottleneckResult {
  double omega_grid = 0.0;   ///< bottleneck value
  double S_grid = 0.0;       ///< lattice minimum over graph states
  int s_max_used = 0;
  std::uint64_t state_count = 0;
  std::uint64_t explored = 0;
  int offset = 0;            ///< absolute height of level 0
  int nx = 0, ny = 0;
  std::vector<std::vector<int>> path;  ///< absolute heights, start to target
  std::vector<double> path_lengths;
};

/// Number of cyclic height vectors with adjacent differences at most s.
inline std::uint64_t bottleneck_state_count(int nx, int levels, int s) {
  // trace(T^nx) with T the band adjacency matrix, saturating.
  const auto L = static_cast<std::size_t>(levels);
  const double cap = 1e19;
  double total = 0.0;
  std::vector<double> cur(L), nxt(L);
  for (std::size_t h0 = 0; h0 < L; ++h0) {
    std::fill(cur.begin(), cur.end(), 0.0);
    cur[h0] = 1.0;
    for (int c = 0; c < nx; ++c) {
      std::fill(nxt.begin(), nxt.end(), 0.0);
      for (std::size_t h = 0; h < L; ++h) {
        if (cur[h] == 0.0) continue;
        const auto lo = static_cast<std::size_t>(std::max<long>(0, static_cast<long>(h) - s));
        const auto hi = std::min(L - 1, h + static_cast<std::size_t>(s));
        for (std::size_t k = lo; k <= hi; ++k) nxt[k] = std::min(cap, nxt[k] + cur[h]);
      }
      cur.swap(nxt);
    }
    total = std::min(cap, total + cur[h0]);
  }
  return total >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(total);
}

namespace detail {

/// Open-addressing map from packed states to node indices.
class StateTable {
 public:
  explicit StateTable(std::size_t expected) {
    std::size_t cap = 1024;
    while (cap < 2 * expected) cap <<= 1;
    keys_.assign(cap, kEmpty);
    vals_.assign(cap, 0);
    mask_ = cap - 1;
  }
  /// Returns the slot index for key, inserting the key if absent.
  std::size_t find_or_insert(std::uint64_t key, bool& inserted) {
    if (2 * (size_ + 1) > keys_.size()) grow();
    std::size_t i = splitmix64(key) & mask_;
    while (keys_[i] != kEmpty && keys_[i] != key) i = (i + 1) & mask_;
    inserted = keys_[i] == kEmpty;
    if (inserted) {
      keys_[i] = key;
      ++size_;
    }
    return i;
  }
  std::uint32_t& value(std::size_t slot) { return vals_[slot]; }

 private:
  static constexpr std::uint64_t kEmpty = ~std::uint64_t{0};
  void grow() {
    std::vector<std::uint64_t> k(keys_.size() * 2, kEmpty);
    std::vector<std::uint32_t> v(keys_.size() * 2, 0);
    const std::size_t m = k.size() - 1;
    for (std::size_t s = 0; s < keys_.size(); ++s) {
      if (keys_[s] == kEmpty) continue;
      std::size_t i = splitmix64(keys_[s]) & m;
      while (k[i] != kEmpty) i = (i + 1) & m;
      k[i] = keys_[s];
      v[i] = vals_[s];
    }
    keys_.swap(k);
    vals_.swap(v);
    mask_ = m;
  }
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> vals_;
  std::size_t mask_ = 0, size_ = 0;
};

}  // namespace detail

/// Grid width of a reduced metric for the class (1, 0).
inline BottleneckResult bottleneck_oracle(const PeriodicMetric& rg, const BottleneckOptions& opt = {}) {
  if (opt.nx < 8 || opt.ny < 8) throw UsageError("bottleneck: grid must be at least 8x8");
  if (opt.bands < 2) throw UsageError("bottleneck: need at least 2 bands");
  if (opt.s_max < 1) throw UsageError("bottleneck: s_max must be >= 1");
  const int nx = opt.nx, ny = opt.ny, levels = opt.bands * ny;
  int bits = 1;
  while ((1 << bits) < levels) ++bits;
  if (bits * nx > 64) throw UsageError("bottleneck: grid too large to pack a state into 64 bits");

  BottleneckResult out;
  out.nx = nx;
  out.ny = ny;
  int s = opt.s_max;
  std::uint64_t count = bottleneck_state_count(nx, levels, s);
  while (count > opt.state_cap && opt.auto_reduce && s > 1) count = bottleneck_state_count(nx, levels, --s);
  if (count > opt.state_cap)
    throw UsageError("bottleneck: " + std::to_string(count) + " states exceed the cap " +
                     std::to_string(opt.state_cap));
  out.s_max_used = s;
  out.state_count = count;
  const int D = 2 * s + 1;

  // Edge lengths for absolute heights: the metric has period 1 = ny levels.
  std::vector<double> edge(static_cast<std::size_t>(nx * ny * D));
  for (int i = 0; i < nx; ++i)
    for (int h = 0; h < ny; ++h)
      for (int d = -s; d <= s; ++d) {
        const Vec2 a{static_cast<double>(i) / nx, static_cast<double>(h) / ny};
        const Vec2 b{static_cast<double>(i + 1) / nx, static_cast<double>(h + d) / ny};
        edge[static_cast<std::size_t>((i * ny + h) * D + d + s)] = segment_length(rg, a, b);
      }
  auto E = [&](int i, int habs, int d) {
    const int hm = ((habs % ny) + ny) % ny;
    return edge[static_cast<std::size_t>((i * ny + hm) * D + d + s)];
  };

  // Cyclic DP for the lattice minimizer among states starting in [0, ny).
  std::vector<int> best_state;
  {
    double best = std::numeric_limits<double>::infinity();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(static_cast<std::size_t>(levels)), nc(static_cast<std::size_t>(levels));
    std::vector<std::vector<int>> arg(static_cast<std::size_t>(nx), std::vector<int>(static_cast<std::size_t>(levels)));
    for (int h0 = 0; h0 < ny; ++h0) {
      std::fill(cost.begin(), cost.end(), inf);
      cost[static_cast<std::size_t>(h0)] = 0.0;
      for (int i = 0; i + 1 < nx; ++i) {
        std::fill(nc.begin(), nc.end(), inf);
        for (int h = 0; h < levels; ++h) {
          if (cost[static_cast<std::size_t>(h)] == inf) continue;
          for (int d = -s; d <= s; ++d) {
            const int k = h + d;
            if (k < 0 || k >= levels) continue;
            const double c = cost[static_cast<std::size_t>(h)] + E(i, h, d);
            if (c < nc[static_cast<std::size_t>(k)]) {
              nc[static_cast<std::size_t>(k)] = c;
              arg[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(k)] = h;
            }
          }
        }
        cost.swap(nc);
      }
      for (int h = std::max(0, h0 - s); h <= std::min(levels - 1, h0 + s); ++h) {
        const double c = cost[static_cast<std::size_t>(h)];
        if (c == inf) continue;
        const double total = c + E(nx - 1, h, h0 - h);
        if (total < best) {
          best = total;
          best_state.assign(static_cast<std::size_t>(nx), 0);
          best_state[static_cast<std::size_t>(nx - 1)] = h;
          for (int i = nx - 1; i > 0; --i)
            best_state[static_cast<std::size_t>(i - 1)] =
                arg[static_cast<std::size_t>(i)][static_cast<std::size_t>(best_state[static_cast<std::size_t>(i)])];
        }
      }
    }
    out.S_grid = best;
  }
  int lo = best_state[0], hi = best_state[0];
  for (int h : best_state) {
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  if (hi - lo + ny >= levels) throw SolverFailure("bottleneck: lattice minimizer too tall for the height bands");
  out.offset = lo;

  auto pack = [&](const std::vector<int>& hs) {
    std::uint64_t k = 0;
    for (int i = 0; i < nx; ++i) k |= static_cast<std::uint64_t>(hs[static_cast<std::size_t>(i)]) << (bits * i);
    return k;
  };
  const std::uint64_t fieldmask = (std::uint64_t{1} << bits) - 1;
  auto unpack = [&](std::uint64_t k, std::vector<int>& hs) {
    hs.resize(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) hs[static_cast<std::size_t>(i)] = static_cast<int>((k >> (bits * i)) & fieldmask);
  };
  auto length = [&](const std::vector<int>& hs) {
    double L = 0.0;
    for (int i = 0; i < nx; ++i) {
      const int a = hs[static_cast<std::size_t>(i)] + out.offset;
      const int b = hs[static_cast<std::size_t>((i + 1) % nx)] + out.offset;
      L += E(i, a, b - a);
    }
    return L;
  };

  std::vector<int> start(static_cast<std::size_t>(nx)), target(static_cast<std::size_t>(nx));
  for (int i = 0; i < nx; ++i) {
    start[static_cast<std::size_t>(i)] = best_state[static_cast<std::size_t>(i)] - lo;
    target[static_cast<std::size_t>(i)] = start[static_cast<std::size_t>(i)] + ny;
  }
  const std::uint64_t skey = pack(start), tkey = pack(target);

  struct Node {
    std::uint64_t key;
    double value;
    std::int64_t parent;
    bool closed;
  };
  std::vector<Node> nodes;
  detail::StateTable table(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  {
    bool ins = false;
    const std::size_t slot = table.find_or_insert(skey, ins);
    table.value(slot) = 0;
    nodes.push_back({skey, length(start), -1, false});
    pq.push({nodes[0].value, 0});
  }
  std::vector<int> hs, nb;
  std::int64_t found = -1;
  while (!pq.empty()) {
    const auto [val, id] = pq.top();
    pq.pop();
    if (nodes[id].closed || val > nodes[id].value) continue;
    nodes[id].closed = true;
    ++out.explored;
    if (nodes[id].key == tkey) {
      found = id;
      break;
    }
    unpack(nodes[id].key, hs);
    for (int i = 0; i < nx; ++i) {
      for (int d : {-1, 1}) {
        const int h = hs[static_cast<std::size_t>(i)] + d;
        if (h < 0 || h >= levels) continue;
        const int left = hs[static_cast<std::size_t>((i + nx - 1) % nx)];
        const int right = hs[static_cast<std::size_t>((i + 1) % nx)];
        if (std::abs(h - left) > s || std::abs(right - h) > s) continue;
        nb = hs;
        nb[static_cast<std::size_t>(i)] = h;
        const std::uint64_t key = pack(nb);
        bool ins = false;
        const std::size_t slot = table.find_or_insert(key, ins);
        if (ins) {
          table.value(slot) = static_cast<std::uint32_t>(nodes.size());
          nodes.push_back({key, std::numeric_limits<double>::infinity(), -1, false});
        }
        const std::uint32_t nid = table.value(slot);
        if (nodes[nid].closed) continue;
        const double v = std::max(val, length(nb));
        if (v < nodes[nid].value) {
          nodes[nid].value = v;
          nodes[nid].parent = id;
          pq.push({v, nid});
        }
      }
    }
  }
  if (found < 0) throw SolverFailure("bottleneck: translate state unreachable");
  out.omega_grid = nodes[static_cast<std::size_t>(found)].value;
  for (std::int64_t id = found; id >= 0; id = nodes[static_cast<std::size_t>(id)].parent) {
    unpack(nodes[static_cast<std::size_t>(id)].key, hs);
    out.path_lengths.push_back(length(hs));
    for (int& h : hs) h += out.offset;
    out.path.push_back(hs);
  }
  std::reverse(out.path.begin(), out.path.end());
  std::reverse(out.path_lengths.begin(), out.path_lengths.end());
  return out;
}

/// Graph curve (reduced coordinates) of absolute grid heights.
inline DiscreteCurve grid_state_curve(const std::vector<int>& heights, int nx, int ny) {
  DiscreteCurve c;
  c.rotation = {1, 0};
  for (int i = 0; i < nx; ++i)
    c.vertices.push_back({static_cast<double>(i) / nx, static_cast<double>(heights[static_cast<std::size_t>(i)]) / ny});
  return c;
}

}  // namespace torus_minmax
