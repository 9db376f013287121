#pragma once

// Local length minimization of discrete curves.
//
// Free-vertex curves move along per-vertex normals (the tangential gauge is
// fixed by periodic arc-length resampling). Graph curves keep their x-grid
// and move vertically only. Both use a damped Newton step on the banded
// normal Hessian, with Armijo backtracking.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "common.hpp"
#include "curve.hpp"
#include "metric.hpp"

namespace torus_minmax {

/// Solves a tridiagonal system in place. Row i reads
/// lo[i] x[i-1] + di[i] x[i] + up[i] x[i+1] = rhs[i]; with `cyclic` the
/// indices wrap (lo[0] couples to x[n-1], up[n-1] to x[0]).
/// Returns false on a vanishing pivot.
inline bool solve_tridiagonal(const std::vector<double>& lo, const std::vector<double>& di,
                              const std::vector<double>& up, std::vector<double>& x, bool cyclic) {
  const std::size_t n = di.size();
  if (n == 0) return true;
  auto thomas = [&](const std::vector<double>& d, std::vector<double>& r) {
    std::vector<double> c(n);
    double piv = d[0];
    if (!(std::abs(piv) > 0.0)) return false;
    c[0] = n > 1 ? up[0] / piv : 0.0;
    r[0] /= piv;
    for (std::size_t i = 1; i < n; ++i) {
      piv = d[i] - lo[i] * c[i - 1];
      if (!(std::abs(piv) > 0.0)) return false;
      c[i] = i + 1 < n ? up[i] / piv : 0.0;
      r[i] = (r[i] - lo[i] * r[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) r[i] -= c[i] * r[i + 1];
    return true;
  };
  if (!cyclic || n < 3) {
    if (cyclic && n == 2) {
      // Dense 2x2.
      const double a = di[0], b = lo[0] + up[0], c = lo[1] + up[1], d = di[1];
      const double det = a * d - b * c;
      if (!(std::abs(det) > 0.0)) return false;
      const double x0 = (d * x[0] - b * x[1]) / det, x1 = (a * x[1] - c * x[0]) / det;
      x[0] = x0;
      x[1] = x1;
      return true;
    }
    return thomas(di, x);
  }
  const double beta = lo[0], alpha = up[n - 1];
  const double gamma = -di[0];
  std::vector<double> d = di;
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;
  if (!thomas(d, x)) return false;
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = alpha;
  if (!thomas(d, z)) return false;
  const double denom = 1.0 + z[0] + beta * z[n - 1] / gamma;
  if (!(std::abs(denom) > 0.0)) return false;
  const double fact = (x[0] + beta * x[n - 1] / gamma) / denom;
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return true;
}

/// Symmetric banded (tridiagonal, possibly cyclic) matrix: off[i] couples i and i+1.
struct BandMatrix {
  std::vector<double> diag, off;
  bool cyclic = true;

  std::size_t size() const { return diag.size(); }
  /// Solves (A + shift I) x = rhs.
  bool solve(std::vector<double>& x, double shift) const {
    const std::size_t n = diag.size();
    std::vector<double> lo(n, 0.0), di(n), up(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      di[i] = diag[i] + shift;
      if (i + 1 < n) up[i] = off[i];
      if (i > 0) lo[i] = off[i - 1];
    }
    if (cyclic) {
      lo[0] = off[n - 1];
      up[n - 1] = off[n - 1];
    }
    return solve_tridiagonal(lo, di, up, x, cyclic);
  }
};

/// Unit normals (tangent rotated by +90 degrees) from central differences.
inline std::vector<Vec2> vertex_normals(const DiscreteCurve& c) {
  std::vector<Vec2> n(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const Vec2 t = c.vertex(k + 1) - c.vertex(k - 1);
    const double len = norm(t);
    n[i] = len > 0.0 ? Vec2{-t.y / len, t.x / len} : Vec2{0.0, 1.0};
  }
  return n;
}

/// Length, gradient, and the Hessian restricted to the given per-vertex
/// directions (one scalar coordinate per vertex) of a closed curve.
inline double normal_system(const PeriodicMetric& g, const DiscreteCurve& c, const std::vector<Vec2>& dirs,
                            const Quadrature& q, std::vector<Vec2>& grad, BandMatrix& H) {
  const std::size_t n = c.size();
  grad.assign(n, Vec2{});
  H.diag.assign(n, 0.0);
  H.off.assign(n, 0.0);
  H.cyclic = true;
  double L = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const std::size_t j = (i + 1) % n;
    const Jet<4> e = segment_length_jet(g, c.vertex(k), c.vertex(k + 1), q);
    L += e.v;
    grad[i] += Vec2{e.g[0], e.g[1]};
    grad[j] += Vec2{e.g[2], e.g[3]};
    const Vec2 a = dirs[i], b = dirs[j];
    auto h = [&](int r, int s) { return e.h[static_cast<std::size_t>(r * 4 + s)]; };
    H.diag[i] += a.x * a.x * h(0, 0) + 2.0 * a.x * a.y * h(0, 1) + a.y * a.y * h(1, 1);
    H.diag[j] += b.x * b.x * h(2, 2) + 2.0 * b.x * b.y * h(2, 3) + b.y * b.y * h(3, 3);
    H.off[i] += a.x * (h(0, 2) * b.x + h(0, 3) * b.y) + a.y * (h(1, 2) * b.x + h(1, 3) * b.y);
  }
  return L;
}

inline double curve_length_q(const PeriodicMetric& g, const DiscreteCurve& c, const Quadrature& q) {
  double L = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const Vec2 a = c.vertex(k), b = c.vertex(k + 1);
    const Vec2 v = b - a;
    if (g.kind() == MetricKind::Flat) {
      L += norm(v);
      continue;
    }
    for (int s = 0; s < q.n; ++s) {
      const Vec2 p = a + q.t[s] * v;
      const Tensor2<double> G = g.tensor<double>(p.x, p.y);
      L += q.w[s] * std::sqrt(G.g11 * v.x * v.x + 2.0 * G.g12 * v.x * v.y + G.g22 * v.y * v.y);
    }
  }
  return L;
}

struct RelaxOptions {
  int max_iters = 50000;
  double grad_tol = 1e-7;
  double stall_rel = 1e-10;  ///< relative length decrease over the stall window
  int stall_window = 50;
  int reparam_every = 10;
  int quad_order = 2;
  double max_step = 0.05;  ///< cap on any single vertex displacement per iteration
  std::uint64_t seed = 0;
};

struct RelaxationReport {
  int iterations = 0;
  double grad_sup = 0.0;  ///< sup over vertices of the normal gradient component
  double length = 0.0;
  double initial_length = 0.0;
  bool converged = false;
  bool degenerate = false;
  std::uint64_t seed = 0;
};

namespace detail {

/// Levenberg-damped Newton direction: solves (H + shift) s = -gn with the
/// smallest shift on a geometric ladder that gives a descent direction whose
/// largest component is at most max_step.
inline std::vector<double> damped_newton(const BandMatrix& H, const std::vector<double>& gn,
                                         const std::vector<char>& frozen, double max_step) {
  const std::size_t n = gn.size();
  BandMatrix A = H;
  for (std::size_t i = 0; i < n; ++i) {
    if (!frozen[i]) continue;
    A.diag[i] = 1.0;
    A.off[i] = 0.0;
    A.off[(i + n - 1) % n] = 0.0;
  }
  double scale = 0.0;
  for (double d : A.diag) scale += std::abs(d);
  scale = std::max(scale / static_cast<double>(n), 1e-300);
  double gg = 0.0;
  for (std::size_t i = 0; i < n; ++i) gg += frozen[i] ? 0.0 : gn[i] * gn[i];
  std::vector<double> s(n);
  for (int k = 0; k < 40; ++k) {
    const double shift = k == 0 ? 1e-9 * scale : scale * std::pow(10.0, 0.5 * (k - 13));
    for (std::size_t i = 0; i < n; ++i) s[i] = frozen[i] ? 0.0 : -gn[i];
    if (!A.solve(s, shift)) continue;
    double gs = 0.0, ss = 0.0, smax = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (frozen[i]) s[i] = 0.0;
      if (!std::isfinite(s[i])) finite = false;
      gs += gn[i] * s[i];
      ss += s[i] * s[i];
      smax = std::max(smax, std::abs(s[i]));
    }
    if (finite && gs < -1e-6 * std::sqrt(gg * ss) && smax <= max_step) return s;
  }
  double gmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) gmax = std::max(gmax, frozen[i] ? 0.0 : std::abs(gn[i]));
  for (std::size_t i = 0; i < n; ++i) s[i] = frozen[i] || gmax == 0.0 ? 0.0 : -gn[i] * (max_step / gmax);
  return s;
}

/// Spacing invariant: max edge <= 4 x mean edge, and no edge collapsing
/// (below 5% of the mean), which would make the length non-smooth.
inline bool spacing_bad(const DiscreteCurve& c) {
  const double mean = mean_edge_length(c);
  if (!(mean > 0.0)) return true;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const double e = norm(c.vertex(k + 1) - c.vertex(k));
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  return hi > 4.0 * mean || lo < 0.05 * mean;
}

}  // namespace detail

/// Sup over vertices of |grad . normal|.
inline double normal_gradient_sup(const PeriodicMetric& g, const DiscreteCurve& c, int quad_order = 2) {
  std::vector<Vec2> grad;
  curve_length_grad(g, c, grad, Quadrature(quad_order));
  const auto nrm = vertex_normals(c);
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s = std::max(s, std::abs(dot(grad[i], nrm[i])));
  return s;
}

/// Descends the length of a closed curve to a local minimum. The returned
/// curve is never longer than the input.
inline std::pair<DiscreteCurve, RelaxationReport> relax_to_geodesic(const PeriodicMetric& g, DiscreteCurve c,
                                                                   const RelaxOptions& opt = {}) {
  c.validate();
  const Quadrature q(opt.quad_order);
  RelaxationReport rep;
  rep.seed = opt.seed;
  rep.degenerate = has_degenerate_edge(c);
  double L = curve_length_q(g, c, q);
  rep.initial_length = L;
  std::vector<double> hist;
  std::vector<Vec2> grad;
  BandMatrix H;
  const std::vector<char> none(c.size(), 0);
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    const bool spacing_bad = detail::spacing_bad(c);
    if (spacing_bad || (it > 0 && opt.reparam_every > 0 && it % opt.reparam_every == 0)) {
      DiscreteCurve r = resample_arclength(c, c.size());
      const double Lr = curve_length_q(g, r, q);
      if (Lr <= L || spacing_bad) {
        c = std::move(r);
        L = Lr;
      }
    }
    const auto nrm = vertex_normals(c);
    L = normal_system(g, c, nrm, q, grad, H);
    std::vector<double> gn(c.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      gn[i] = dot(grad[i], nrm[i]);
      sup = std::max(sup, std::abs(gn[i]));
    }
    rep.grad_sup = sup;
    hist.push_back(L);
    if (sup < opt.grad_tol) {
      rep.converged = true;
      break;
    }
    if (static_cast<int>(hist.size()) > opt.stall_window &&
        hist[hist.size() - 1 - static_cast<std::size_t>(opt.stall_window)] - L < opt.stall_rel * std::abs(L))
      break;
    std::vector<double> s = detail::damped_newton(H, gn, none, opt.max_step);
    double smax = 0.0, slope = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      smax = std::max(smax, std::abs(s[i]));
      slope += gn[i] * s[i];
    }
    double t = smax > opt.max_step ? opt.max_step / smax : 1.0;
    bool accepted = false;
    DiscreteCurve trial = c;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < c.size(); ++i) trial.vertices[i] = c.vertices[i] + (t * s[i]) * nrm[i];
      const double Lt = curve_length_q(g, trial, q);
      if (Lt <= L + 1e-4 * t * slope) {
        c = trial;
        L = Lt;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  rep.iterations = it;
  rep.length = curve_length_q(g, c, q);
  rep.degenerate = rep.degenerate || has_degenerate_edge(c);
  return {std::move(c), rep};
}

/// Vertical-only relaxation problem for graphs on a fixed x-grid. Closed
/// graphs wrap with the curve's rotation; open graphs have no closing edge.
struct GraphConstraints {
  std::vector<double> lo, hi;  ///< optional per-vertex height bounds
  std::vector<char> pinned;    ///< vertices that never move
};

/// Length of an open polyline (no closing edge).
inline double open_length(const PeriodicMetric& g, const std::vector<Vec2>& v, const Quadrature& q) {
  double L = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const Vec2 a = v[i], d = v[i + 1] - v[i];
    if (g.kind() == MetricKind::Flat) {
      L += norm(d);
      continue;
    }
    for (int s = 0; s < q.n; ++s) {
      const Vec2 p = a + q.t[s] * d;
      const Tensor2<double> G = g.tensor<double>(p.x, p.y);
      L += q.w[s] * std::sqrt(G.g11 * d.x * d.x + 2.0 * G.g12 * d.x * d.y + G.g22 * d.y * d.y);
    }
  }
  return L;
}

/// Length, vertical gradient and vertical Hessian of a graph polyline.
inline double graph_system(const PeriodicMetric& g, const std::vector<Vec2>& v, Vec2 closing_shift, bool closed,
                           const Quadrature& q, std::vector<double>& gy, BandMatrix& H) {
  const std::size_t n = v.size();
  gy.assign(n, 0.0);
  H.diag.assign(n, 0.0);
  H.off.assign(n, 0.0);
  H.cyclic = closed;
  double L = 0.0;
  const std::size_t edges = closed ? n : n - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    const std::size_t j = (i + 1) % n;
    const Vec2 b = j == 0 ? v[0] + closing_shift : v[j];
    const Jet<4> e = segment_length_jet(g, v[i], b, q);
    L += e.v;
    gy[i] += e.g[1];
    gy[j] += e.g[3];
    H.diag[i] += e.h[1 * 4 + 1];
    H.diag[j] += e.h[3 * 4 + 3];
    H.off[i] += e.h[1 * 4 + 3];
  }
  return L;
}

/// Result of a graph relaxation.
struct GraphRelaxResult {
  std::vector<Vec2> vertices;
  RelaxationReport report;
};

/// Minimizes length over the heights of a graph polyline subject to bounds.
/// `closing_shift` is the rotation vector for closed graphs.
inline GraphRelaxResult relax_graph(const PeriodicMetric& g, std::vector<Vec2> v, Vec2 closing_shift, bool closed,
                                    const GraphConstraints& cons, const RelaxOptions& opt = {}) {
  const std::size_t n = v.size();
  const Quadrature q(opt.quad_order);
  auto length = [&](const std::vector<Vec2>& w) {
    if (!closed) return open_length(g, w, q);
    DiscreteCurve c;
    c.vertices = w;
    c.rotation = {static_cast<std::int64_t>(std::llround(closing_shift.x)),
                  static_cast<std::int64_t>(std::llround(closing_shift.y))};
    return curve_length_q(g, c, q);
  };
  auto clamp = [&](std::size_t i, double y) {
    if (!cons.lo.empty()) y = std::max(y, cons.lo[i]);
    if (!cons.hi.empty()) y = std::min(y, cons.hi[i]);
    return y;
  };
  for (std::size_t i = 0; i < n; ++i) v[i].y = clamp(i, v[i].y);
  GraphRelaxResult res;
  res.report.seed = opt.seed;
  double L = length(v);
  res.report.initial_length = L;
  std::vector<double> gy, hist;
  BandMatrix H;
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    L = graph_system(g, v, closing_shift, closed, q, gy, H);
    std::vector<char> frozen(n, 0);
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool pin = !cons.pinned.empty() && cons.pinned[i];
      const bool at_lo = !cons.lo.empty() && v[i].y <= cons.lo[i] && gy[i] > 0.0;
      const bool at_hi = !cons.hi.empty() && v[i].y >= cons.hi[i] && gy[i] < 0.0;
      frozen[i] = pin || at_lo || at_hi;
      if (!frozen[i]) sup = std::max(sup, std::abs(gy[i]));
    }
    res.report.grad_sup = sup;
    hist.push_back(L);
    if (sup < opt.grad_tol) {
      res.report.converged = true;
      break;
    }
    if (static_cast<int>(hist.size()) > opt.stall_window &&
        hist[hist.size() - 1 - static_cast<std::size_t>(opt.stall_window)] - L < opt.stall_rel * std::abs(L))
      break;
    const std::vector<double> s = detail::damped_newton(H, gy, frozen, opt.max_step);
    double smax = 0.0;
    for (double x : s) smax = std::max(smax, std::abs(x));
    double t = smax > opt.max_step ? opt.max_step / smax : 1.0;
    bool accepted = false;
    std::vector<Vec2> trial = v;
    for (int bt = 0; bt < 60; ++bt) {
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        trial[i].y = clamp(i, v[i].y + t * s[i]);
        slope += gy[i] * (trial[i].y - v[i].y);
      }
      const double Lt = length(trial);
      if (Lt <= L + 1e-4 * std::min(slope, 0.0)) {
        v = trial;
        L = Lt;
        accepted = slope < 0.0 || Lt < hist.back();
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  res.report.iterations = it;
  res.report.length = length(v);
  res.vertices = std::move(v);
  return res;
}

/// Closed-graph convenience wrapper.
inline std::pair<DiscreteCurve, RelaxationReport> relax_graph_curve(const PeriodicMetric& g, const DiscreteCurve& c,
                                                                   const GraphConstraints& cons,
                                                                   const RelaxOptions& opt = {}) {
  auto r = relax_graph(g, c.vertices, c.rotation.as_real(), true, cons, opt);
  DiscreteCurve out;
  out.rotation = c.rotation;
  out.vertices = std::move(r.vertices);
  return {std::move(out), r.report};
}

}  // namespace torus_minmax
