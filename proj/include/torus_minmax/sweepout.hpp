#pragma once

// One-parameter families of graph curves sweeping from a minimizer to its
// (0, 1)-translate, in reduced coordinates. All slices share the uniform
// x-grid x_j = j / N, so vertexwise operations (ordering, area, blending)
// are exact.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "curve.hpp"
#include "geodesic.hpp"
#include "parallel.hpp"

namespace torus_minmax {

struct SweepOut {
  std::vector<DiscreteCurve> slices;
  std::vector<double> lengths;  ///< metric length of each slice
  Vec2i w{0, 1};                ///< endpoint translate vector

  std::size_t size() const { return slices.size(); }
  double max_length() const { return lengths.empty() ? 0.0 : *std::max_element(lengths.begin(), lengths.end()); }
  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(lengths.begin(), lengths.end()) - lengths.begin());
  }
};

/// Signed area between two graph slices on the same grid, one period.
inline double slice_area(const DiscreteCurve& lo, const DiscreteCurve& hi) {
  // Periodic trapezoid rule on a uniform grid; exact for the polylines.
  const double h = static_cast<double>(lo.rotation.a) / static_cast<double>(lo.size());
  double a = 0.0;
  for (std::size_t j = 0; j < lo.size(); ++j) a += hi.vertices[j].y - lo.vertices[j].y;
  return a * h;
}

/// Sum of consecutive signed areas, per period.
inline double swept_area(const SweepOut& s) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) total += slice_area(s.slices[i], s.slices[i + 1]);
  return total;
}

/// Swept area divided by the area of one fundamental domain swept by w;
/// equals 1 for a family sweeping the torus once. Families between two
/// different leaves (w = 0) have no certificate and return 0.
inline double degree_certificate(const SweepOut& s) {
  if (s.w == Vec2i{0, 0}) return 0.0;
  const double total = swept_area(s);
  const Vec2i rot = s.slices.front().rotation;
  const double cell = std::abs(static_cast<double>(rot.a * s.w.b - rot.b * s.w.a));
  return total / cell;
}

/// True when consecutive slices are pointwise ordered (each at or above the previous).
inline bool slices_ordered(const SweepOut& s, double tol = 1e-12) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    for (std::size_t j = 0; j < s.slices[i].size(); ++j)
      if (s.slices[i + 1].vertices[j].y < s.slices[i].vertices[j].y - tol) return false;
  return true;
}

/// Max over consecutive slices of (area between) + |length difference|.
inline double fineness(const SweepOut& s) {
  double f = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    f = std::max(f, std::abs(slice_area(s.slices[i], s.slices[i + 1])) + std::abs(s.lengths[i + 1] - s.lengths[i]));
  return f;
}

inline void update_lengths(const PeriodicMetric& g, SweepOut& s, int quad_order = 2) {
  const Quadrature q(quad_order);
  s.lengths.resize(s.size());
  parallel_for(s.size(), [&](std::size_t i) { s.lengths[i] = curve_length_q(g, s.slices[i], q); });
}

/// Linear family m + t w, t = i / (M - 1), from a reduced graph minimizer.
inline SweepOut init_sweepout(const PeriodicMetric& reduced_g, const DiscreteCurve& minimizer, std::size_t M,
                              std::size_t N = 0) {
  if (M < 8) throw UsageError("init_sweepout: M must be >= 8");
  if (minimizer.rotation != Vec2i{1, 0}) throw UsageError("init_sweepout: minimizer must be a reduced (1,0) curve");
  if (!is_graph(minimizer)) throw UsageError("init_sweepout: minimizer is not a graph over the x-axis");
  const DiscreteCurve m = to_uniform_graph(minimizer, N ? N : minimizer.size());
  SweepOut s;
  s.slices.reserve(M);
  for (std::size_t i = 0; i < M; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(M - 1);
    DiscreteCurve c = m;
    for (auto& v : c.vertices) v.y += t;
    s.slices.push_back(std::move(c));
  }
  s.slices.back() = translate(m, s.w);
  update_lengths(reduced_g, s);
  return s;
}

/// Re-spaces interior slices so consecutive areas are equal, by vertexwise
/// interpolation between the bracketing old slices.
inline void respace_by_area(SweepOut& s) {
  const std::size_t M = s.size();
  std::vector<double> cum(M, 0.0);
  for (std::size_t i = 0; i + 1 < M; ++i) cum[i + 1] = cum[i] + std::max(0.0, slice_area(s.slices[i], s.slices[i + 1]));
  const double total = cum.back();
  if (!(total > 0.0)) return;
  std::vector<DiscreteCurve> out(M);
  out.front() = s.slices.front();
  out.back() = s.slices.back();
  std::size_t seg = 0;
  for (std::size_t k = 1; k + 1 < M; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(M - 1);
    while (seg + 2 < M && cum[seg + 1] < target) ++seg;
    const double a = cum[seg + 1] - cum[seg];
    const double th = a > 0.0 ? std::clamp((target - cum[seg]) / a, 0.0, 1.0) : 0.0;
    out[k] = blend(s.slices[seg], s.slices[seg + 1], th);
  }
  s.slices = std::move(out);
}

namespace detail {

/// Length, vertical gradient and a cheap positive semidefinite preconditioner
/// for a closed graph: the Hessian of each edge length with the metric frozen
/// at the edge midpoint.
inline double graph_grad_precond(const PeriodicMetric& g, const DiscreteCurve& c, const Quadrature& q,
                                 std::vector<double>& gy, BandMatrix& P) {
  std::vector<Vec2> grad;
  const double L = curve_length_grad(g, c, grad, q);
  const std::size_t n = c.size();
  gy.resize(n);
  for (std::size_t i = 0; i < n; ++i) gy[i] = grad[i].y;
  P.diag.assign(n, 0.0);
  P.off.assign(n, 0.0);
  P.cyclic = true;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const Vec2 a = c.vertex(k), d = c.vertex(k + 1) - a;
    const Vec2 m = a + 0.5 * d;
    const Tensor2<double> G = g.tensor<double>(m.x, m.y);
    const double Q = G.g11 * d.x * d.x + 2.0 * G.g12 * d.x * d.y + G.g22 * d.y * d.y;
    if (!(Q > 0.0)) continue;
    const double w = (G.g11 * G.g22 - G.g12 * G.g12) * d.x * d.x / (Q * std::sqrt(Q));
    P.diag[i] += w;
    P.diag[(i + 1) % n] += w;
    P.off[i] -= w;
  }
  return L;
}

}  // namespace detail

struct SweepRelaxOptions {
  int max_iters = 3000;
  int respace_every = 10;
  double tau_start = 10.0;
  double tau_end = 0.01;
  int stall_window = 200;
  double stall_tol = 1e-8;
  /// Largest vertical move per iteration, as a fraction of the mean slice spacing.
  double step_fraction = 0.1;
  int quad_order = 2;
};

struct SweepRelaxReport {
  int iterations = 0;
  double initial_max = 0.0;
  double final_max = 0.0;
  double certificate = 0.0;
  int rejected_steps = 0;
  long backtracks = 0;
};

/// Lowers the maximal slice length of a sweep-out while keeping its
/// endpoints, ordering, and degree. Returns the best family seen at a
/// re-spacing point, never worse than the input.
inline std::pair<SweepOut, SweepRelaxReport> relax_sweepout(const PeriodicMetric& g, SweepOut s,
                                                            const SweepRelaxOptions& opt = {}) {
  const std::size_t M = s.size();
  if (M < 3) throw UsageError("relax_sweepout: need at least 3 slices");
  const Quadrature q(opt.quad_order);
  update_lengths(g, s, opt.quad_order);
  SweepRelaxReport rep;
  rep.initial_max = s.max_length();
  const bool translate_family = !(s.w == Vec2i{0, 0});
  if (translate_family && std::abs(degree_certificate(s) - 1.0) > 1e-6)
    throw InvariantViolation("relax_sweepout: input degree certificate is not 1");
  if (!slices_ordered(s)) throw UsageError("relax_sweepout: slices are not ordered");
  const double area0 = swept_area(s);

  SweepOut best = s;
  double best_max = rep.initial_max;
  std::vector<double> best_hist;
  const double spacing = (area0 > 0.0 ? area0 : 1.0) / static_cast<double>(M - 1);
  const double cap = opt.step_fraction * spacing;
  const std::size_t N = s.slices.front().size();

  std::vector<char> settled(M, 0), changed(M, 1);
  std::vector<double> tstart(M, 1.0);  // per-slice initial step, adapted from the last accepted one
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    const double frac = opt.max_iters > 1 ? static_cast<double>(it) / (opt.max_iters - 1) : 1.0;
    const double tau = opt.tau_start * std::pow(opt.tau_end / opt.tau_start, frac);
    const double Lmax = s.max_length();
    const SweepOut prev = s;
    std::vector<int> rejected(M, 0), tries(M, 0);
    std::vector<char> moved(M, 0);
    parallel_for(M - 2, [&](std::size_t k) {
      const std::size_t i = k + 1;
      // A slice whose last step failed and whose neighbours have not moved
      // since would fail again.
      if (settled[i] && !changed[i - 1] && !changed[i] && !changed[i + 1]) return;
      // Slices within tau of the maximum follow the soft-max gradient; its
      // weight relative to the top slice scales their step.
      double scale = 1.0;
      if (prev.lengths[i] >= Lmax - tau) scale = std::exp((prev.lengths[i] - Lmax) / tau);
      const double step_cap = cap * std::max(scale, 1e-3);
      std::vector<double> gy;
      BandMatrix H;
      const auto& v = prev.slices[i].vertices;
      const double L = detail::graph_grad_precond(g, prev.slices[i], q, gy, H);
      double gsup = 0.0;
      for (double x : gy) gsup = std::max(gsup, std::abs(x));
      if (gsup < 1e-10) {
        rejected[i] = 1;
        return;
      }
      const std::vector<char> none(N, 0);
      const std::vector<double> d = detail::damped_newton(H, gy, none, step_cap);
      std::vector<Vec2> trial = v;
      double t = tstart[i];
      for (int bt = 0; bt < 30; ++bt, t *= 0.5) {
        ++tries[i];
        double slope = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
          const double lo = 0.5 * (prev.slices[i - 1].vertices[j].y + v[j].y);
          const double hi = 0.5 * (prev.slices[i + 1].vertices[j].y + v[j].y);
          trial[j].y = std::clamp(v[j].y + t * d[j], lo, hi);
          slope += gy[j] * (trial[j].y - v[j].y);
        }
        DiscreteCurve c;
        c.rotation = prev.slices[i].rotation;
        c.vertices = trial;
        const double Lt = curve_length_q(g, c, q);
        if (Lt <= L + 1e-4 * std::min(slope, 0.0)) {
          s.slices[i].vertices = trial;
          s.lengths[i] = Lt;
          moved[i] = 1;
          tstart[i] = std::min(1.0, 2.0 * t);
          return;
        }
      }
      rejected[i] = 1;
    });
    for (std::size_t i = 1; i + 1 < M; ++i) {
      rep.rejected_steps += rejected[i];
      rep.backtracks += std::max(0, tries[i] - 1);
      if (rejected[i]) settled[i] = 1;
      if (moved[i]) settled[i] = 0;
    }
    changed = moved;

    const bool respace = opt.respace_every > 0 && (it + 1) % opt.respace_every == 0;
    if (respace) {
      const SweepOut before = s;
      respace_by_area(s);
      for (std::size_t i = 1; i + 1 < M; ++i)
        if (s.slices[i].vertices != before.slices[i].vertices) {
          changed[i] = 1;
          settled[i] = 0;
        }
      update_lengths(g, s, opt.quad_order);
      if (std::abs(swept_area(s) - area0) > 1e-6 * std::max(1.0, std::abs(area0)) || !slices_ordered(s)) {
        // Should not happen: ordering is preserved by the clamps. Fall back.
        s = best;
        ++rep.rejected_steps;
      } else if (s.max_length() < best_max) {
        best_max = s.max_length();
        best = s;
      }
    }
    best_hist.push_back(best_max);
    const auto W = static_cast<std::size_t>(opt.stall_window);
    if (best_hist.size() > W && best_hist[best_hist.size() - 1 - W] - best_max < opt.stall_tol) break;
  }
  rep.iterations = it;
  rep.final_max = best_max;
  rep.certificate = degree_certificate(best);
  return {std::move(best), rep};
}

/// Family of curves from c0 to c1 (same rotation, graphs on the same grid)
/// whose consecutive members are within flat distance delta.
struct InterpolationResult {
  std::vector<DiscreteCurve> family;
  std::vector<double> lengths;
  double area = 0.0;            ///< area between c0 and c1
  double flat_distance = 0.0;   ///< area + |length difference|
  double C0 = 0.0;              ///< measured (max length - max endpoint length) / delta, clipped at 0
  double max_step_distance = 0.0;
};

inline InterpolationResult interpolate(const PeriodicMetric& g, const DiscreteCurve& c0, const DiscreteCurve& c1,
                                       double delta, std::size_t max_members = 10000) {
  if (!(delta > 0.0)) throw UsageError("interpolate: delta must be positive");
  if (c0.rotation != c1.rotation) throw UsageError("interpolate: rotation vectors differ");
  if (c0.size() != c1.size()) throw UsageError("interpolate: curves must share the vertex grid");
  for (std::size_t j = 0; j < c0.size(); ++j)
    if (c0.vertices[j].x != c1.vertices[j].x) throw UsageError("interpolate: curves must share the x-grid");
  const Quadrature q(2);
  InterpolationResult out;
  const double L0 = curve_length_q(g, c0, q), L1 = curve_length_q(g, c1, q);
  out.area = graph_area_between(c0, c1);
  out.flat_distance = out.area + std::abs(L1 - L0);
  if (out.flat_distance > delta * static_cast<double>(max_members))
    throw UsageError("interpolate: inputs too far apart (flat distance " + std::to_string(out.flat_distance) + ")");
  if (out.area == 0.0 && L0 == L1) {
    out.family = {c0};
    out.lengths = {L0};
    return out;
  }
  std::size_t K = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(out.area / delta)));
  for (;;) {
    out.family.clear();
    out.lengths.clear();
    for (std::size_t k = 0; k <= K; ++k) {
      out.family.push_back(blend(c0, c1, static_cast<double>(k) / static_cast<double>(K)));
      out.lengths.push_back(curve_length_q(g, out.family.back(), q));
    }
    out.max_step_distance = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      out.max_step_distance =
          std::max(out.max_step_distance, graph_area_between(out.family[k], out.family[k + 1]) +
                                              std::abs(out.lengths[k + 1] - out.lengths[k]));
    if (out.max_step_distance <= delta || K >= max_members) break;
    K = std::min(max_members, K * 2);
  }
  const double top = *std::max_element(out.lengths.begin(), out.lengths.end());
  out.C0 = std::max(0.0, top - std::max(L0, L1)) / delta;
  return out;
}

}  // namespace torus_minmax
