#pragma once

// Discrete closed curves: lifted polylines with a rotation (closure) vector.
// The closing edge runs from v[N-1] to v[0] + rotation; the endpoint is never
// stored twice.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "metric.hpp"

namespace torus_minmax {

struct DiscreteCurve {
  static constexpr std::size_t kMinVertices = 8;

  std::vector<Vec2> vertices;
  Vec2i rotation{1, 0};

  std::size_t size() const { return vertices.size(); }
  /// Vertex i of the periodic extension, any integer i.
  Vec2 vertex(std::ptrdiff_t i) const {
    const auto n = static_cast<std::ptrdiff_t>(vertices.size());
    std::ptrdiff_t q = i / n, r = i % n;
    if (r < 0) { r += n; --q; }
    return vertices[static_cast<std::size_t>(r)] + static_cast<double>(q) * rotation.as_real();
  }
  void validate() const {
    if (vertices.size() < kMinVertices) throw UsageError("curve needs at least 8 vertices");
    for (const auto& v : vertices)
      if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw UsageError("curve has non-finite vertex");
  }
};

/// Straight curve offset + t * rotation, sampled at N equal steps.
inline DiscreteCurve straight_curve(Vec2i rotation, std::size_t N, Vec2 offset = {}) {
  DiscreteCurve c;
  c.rotation = rotation;
  c.vertices.resize(N);
  for (std::size_t i = 0; i < N; ++i)
    c.vertices[i] = offset + (static_cast<double>(i) / static_cast<double>(N)) * rotation.as_real();
  return c;
}

inline bool has_degenerate_edge(const DiscreteCurve& c) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c.vertex(static_cast<std::ptrdiff_t>(i)) == c.vertex(static_cast<std::ptrdiff_t>(i) + 1)) return true;
  return false;
}

inline double curve_length(const PeriodicMetric& g, const DiscreteCurve& c, int order = 2) {
  double L = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    L += segment_length(g, c.vertex(k), c.vertex(k + 1), order);
  }
  return L;
}

/// Length and its gradient with respect to every vertex.
inline double curve_length_grad(const PeriodicMetric& g, const DiscreteCurve& c, std::vector<Vec2>& grad,
                                const Quadrature& q) {
  const std::size_t n = c.size();
  grad.assign(n, Vec2{});
  double L = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    Vec2 da, db;
    L += segment_length_grad(g, c.vertex(k), c.vertex(k + 1), q, da, db);
    grad[i] += da;
    grad[(i + 1) % n] += db;
  }
  return L;
}

inline double mean_edge_length(const DiscreteCurve& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    s += norm(c.vertex(static_cast<std::ptrdiff_t>(i) + 1) - c.vertex(static_cast<std::ptrdiff_t>(i)));
  return s / static_cast<double>(c.size());
}

inline double max_edge_length(const DiscreteCurve& c) {
  double m = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    m = std::max(m, norm(c.vertex(static_cast<std::ptrdiff_t>(i) + 1) - c.vertex(static_cast<std::ptrdiff_t>(i))));
  return m;
}

/// Deck transformation x -> x + k.
inline DiscreteCurve translate(const DiscreteCurve& c, Vec2i k) {
  DiscreteCurve out = c;
  const Vec2 s = k.as_real();
  for (auto& v : out.vertices) v += s;
  return out;
}

inline DiscreteCurve translate(const DiscreteCurve& c, Vec2 s) {
  DiscreteCurve out = c;
  for (auto& v : out.vertices) v += s;
  return out;
}

/// Image under a linear lattice map A (vertices and rotation).
inline DiscreteCurve map_curve(const DiscreteCurve& c, const Mat2i& A) {
  DiscreteCurve out;
  out.rotation = A * c.rotation;
  out.vertices.reserve(c.size());
  for (const auto& v : c.vertices) out.vertices.push_back(A * v);
  return out;
}

/// Resamples to N vertices equally spaced in Euclidean arc length, keeping v[0].
inline DiscreteCurve resample_arclength(const DiscreteCurve& c, std::size_t N) {
  const std::size_t n = c.size();
  std::vector<double> s(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    s[i + 1] = s[i] + norm(c.vertex(k + 1) - c.vertex(k));
  }
  DiscreteCurve out;
  out.rotation = c.rotation;
  out.vertices.resize(N);
  const double total = s[n];
  std::size_t seg = 0;
  for (std::size_t j = 0; j < N; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(N);
    while (seg + 1 < n && s[seg + 1] <= target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double t = len > 0.0 ? (target - s[seg]) / len : 0.0;
    const auto k = static_cast<std::ptrdiff_t>(seg);
    out.vertices[j] = c.vertex(k) + t * (c.vertex(k + 1) - c.vertex(k));
  }
  return out;
}

/// Signed area between the curve and the x-axis over one period (trapezoid
/// rule on the polyline, exact for polylines). Differences of this quantity
/// are the signed areas swept between curves of the same rotation.
inline double signed_area(const DiscreteCurve& c) {
  double a = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const Vec2 p = c.vertex(k), q = c.vertex(k + 1);
    a += 0.5 * (p.y + q.y) * (q.x - p.x);
  }
  return a;
}

/// True when the lift is a graph over the x-axis: rotation.a > 0 and x strictly
/// increasing along every edge including the closing one.
inline bool is_graph(const DiscreteCurve& c) {
  if (c.rotation.a <= 0) return false;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    if (!(c.vertex(k + 1).x > c.vertex(k).x)) return false;
  }
  return true;
}

/// Piecewise-linear function x -> y of a graph curve, with y(x + a) = y(x) + b.
class GraphView {
 public:
  explicit GraphView(const DiscreteCurve& c) : c_(&c) {
    if (!is_graph(c)) throw UsageError("curve is not a graph over the x-axis; reduce coordinates first");
    period_ = static_cast<double>(c.rotation.a);
    shift_ = static_cast<double>(c.rotation.b);
    x0_ = c.vertices.front().x;
    xs_.reserve(c.size() + 1);
    ys_.reserve(c.size() + 1);
    for (std::size_t i = 0; i <= c.size(); ++i) {
      const Vec2 v = c.vertex(static_cast<std::ptrdiff_t>(i));
      xs_.push_back(v.x);
      ys_.push_back(v.y);
    }
  }

  double operator()(double x) const {
    const double m = std::floor((x - x0_) / period_);
    double u = x - m * period_;
    if (u < x0_) u = x0_;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), u);
    std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
    if (hi >= xs_.size()) hi = xs_.size() - 1;
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    const double t = (u - xs_[lo]) / (xs_[hi] - xs_[lo]);
    return ys_[lo] + t * (ys_[hi] - ys_[lo]) + m * shift_;
  }

  /// Breakpoints reduced into [x0, x0 + period).
  std::vector<double> breakpoints() const { return {xs_.begin(), xs_.end() - 1}; }
  double period() const { return period_; }
  double x0() const { return x0_; }

 private:
  const DiscreteCurve* c_;
  double period_ = 1.0, shift_ = 0.0, x0_ = 0.0;
  std::vector<double> xs_, ys_;
};

/// Sorted union of both curves' breakpoints over one period starting at c1's first vertex.
inline std::vector<double> merged_breakpoints(const GraphView& g1, const GraphView& g2) {
  std::vector<double> xs = g1.breakpoints();
  const double x0 = g1.x0(), P = g1.period();
  for (double x : g2.breakpoints()) xs.push_back(x0 + (x - x0 - P * std::floor((x - x0) / P)));
  std::sort(xs.begin(), xs.end());
  return xs;
}

enum class BirkhoffOrder { Below, Above, Equal, Crossing };

inline const char* to_string(BirkhoffOrder o) {
  switch (o) {
    case BirkhoffOrder::Below: return "below";
    case BirkhoffOrder::Above: return "above";
    case BirkhoffOrder::Equal: return "equal";
    case BirkhoffOrder::Crossing: return "crossing";
  }
  return "?";
}

/// Compares two graph curves with the same rotation. Below means c1 <= c2 everywhere.
inline BirkhoffOrder birkhoff_compare(const DiscreteCurve& c1, const DiscreteCurve& c2, double tol = 1e-9) {
  if (c1.rotation != c2.rotation) throw UsageError("birkhoff_compare: rotation vectors differ");
  const GraphView g1(c1), g2(c2);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : merged_breakpoints(g1, g2)) {
    const double d = g1(x) - g2(x);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (std::max(std::abs(lo), std::abs(hi)) < tol) return BirkhoffOrder::Equal;
  if (hi <= tol) return BirkhoffOrder::Below;
  if (lo >= -tol) return BirkhoffOrder::Above;
  return BirkhoffOrder::Crossing;
}

/// sup |y1 - y2| over one period.
inline double graph_sup_distance(const DiscreteCurve& c1, const DiscreteCurve& c2) {
  const GraphView g1(c1), g2(c2);
  double m = 0.0;
  for (double x : merged_breakpoints(g1, g2)) m = std::max(m, std::abs(g1(x) - g2(x)));
  return m;
}

/// Integral of |y2 - y1| over one period (exact for piecewise-linear graphs).
inline double graph_area_between(const DiscreteCurve& c1, const DiscreteCurve& c2) {
  const GraphView g1(c1), g2(c2);
  auto xs = merged_breakpoints(g1, g2);
  xs.push_back(g1.x0() + g1.period());
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double w = xs[i + 1] - xs[i];
    if (w <= 0.0) continue;
    const double d0 = g2(xs[i]) - g1(xs[i]);
    const double d1 = g2(xs[i + 1]) - g1(xs[i + 1]);
    if (d0 * d1 >= 0.0) {
      a += 0.5 * w * (std::abs(d0) + std::abs(d1));
    } else {
      const double t = d0 / (d0 - d1);
      a += 0.5 * w * (t * std::abs(d0) + (1.0 - t) * std::abs(d1));
    }
  }
  return a;
}

/// Graph curve sampled on the uniform grid x_j = j * a / N (common to all
/// curves of the same rotation, so vertexwise operations are meaningful).
inline DiscreteCurve to_uniform_graph(const DiscreteCurve& c, std::size_t N) {
  const GraphView g(c);
  DiscreteCurve out;
  out.rotation = c.rotation;
  out.vertices.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double x = static_cast<double>(c.rotation.a) * static_cast<double>(j) / static_cast<double>(N);
    out.vertices[j] = {x, g(x)};
  }
  return out;
}

/// Vertexwise blend (1 - t) c0 + t c1 (same vertex count and rotation).
inline DiscreteCurve blend(const DiscreteCurve& c0, const DiscreteCurve& c1, double t) {
  DiscreteCurve out = c0;
  for (std::size_t i = 0; i < out.size(); ++i) out.vertices[i] = (1.0 - t) * c0.vertices[i] + t * c1.vertices[i];
  return out;
}

/// Distance between curves modulo vertical integer translation: graph sup
/// distance when both are graphs, otherwise the symmetric max vertex distance
/// after arc-length resampling.
inline double curve_distance_mod_translation(const DiscreteCurve& c1, const DiscreteCurve& c2) {
  if (is_graph(c1) && is_graph(c2)) {
    const GraphView g1(c1), g2(c2);
    double shift = std::round(g2(g1.x0()) - g1(g1.x0()));
    const DiscreteCurve c2s = translate(c2, Vec2i{0, -static_cast<std::int64_t>(shift)});
    return graph_sup_distance(c1, c2s);
  }
  const std::size_t n = std::max(c1.size(), c2.size());
  const DiscreteCurve a = resample_arclength(c1, n), b = resample_arclength(c2, n);
  const double shift = std::round(b.vertices[0].y - a.vertices[0].y);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t off = 0; off < n; ++off) {
    double m = 0.0;
    for (std::size_t i = 0; i < n && m < best; ++i) {
      Vec2 pb = b.vertex(static_cast<std::ptrdiff_t>(i + off));
      pb.y -= shift;
      m = std::max(m, norm(a.vertices[i] - pb));
    }
    best = std::min(best, m);
  }
  return best;
}

}  // namespace torus_minmax
