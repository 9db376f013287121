#pragma once

// Min-max widths, energy barriers and barrier sequences.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <locale>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "bottleneck.hpp"
#include "index.hpp"
#include "stable_norm.hpp"
#include "sweepout.hpp"

namespace torus_minmax {

/// Newton on the vertical gradient of a closed graph without a descent
/// requirement; converges to nearby saddles. Returns the final gradient sup.
inline double graph_newton_polish(const PeriodicMetric& g, DiscreteCurve& c, int max_iters = 30, int quad_order = 2,
                                  double max_step = 0.02) {
  const Quadrature q(quad_order);
  const Vec2 closing = c.rotation.as_real();
  std::vector<double> gy;
  BandMatrix H;
  auto sup_at = [&](const std::vector<Vec2>& v) {
    graph_system(g, v, closing, true, q, gy, H);
    double s = 0.0;
    for (double x : gy) s = std::max(s, std::abs(x));
    return s;
  };
  double sup = sup_at(c.vertices);
  for (int it = 0; it < max_iters && sup > 1e-13; ++it) {
    double scale = 0.0;
    for (double d : H.diag) scale += std::abs(d);
    scale /= static_cast<double>(H.size());
    std::vector<double> s(gy.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = -gy[i];
    if (!H.solve(s, 1e-10 * scale)) break;
    double smax = 0.0;
    for (double x : s) smax = std::max(smax, std::abs(x));
    double t = smax > max_step ? max_step / smax : 1.0;
    const std::vector<Vec2> base = c.vertices;
    bool improved = false;
    for (int bt = 0; bt < 20; ++bt, t *= 0.5) {
      std::vector<Vec2> trial = base;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i].y += t * s[i];
      const double sup2 = sup_at(trial);
      if (sup2 < sup) {
        c.vertices = std::move(trial);
        sup = sup2;
        improved = true;
        break;
      }
    }
    if (!improved) {
      sup_at(c.vertices);
      break;
    }
  }
  return sup;
}

struct WidthOptions {
  StableNormOptions stable{};
  std::size_t M = 33;
  int n_sweep_starts = 4;
  SweepRelaxOptions sweep{};
  bool refine_saddle = true;
  bool bottleneck = true;
  BottleneckOptions grid{12, 12, 2, 2, std::uint64_t{1} << 26, true};
};

struct WidthResult {
  HomologyClass r = HomologyClass::curve(1, 0);
  ClassReduction reduction{HomologyClass::curve(1, 0), 1, {}};
  double S = 0.0;
  double omega_upper = 0.0;
  std::optional<double> omega_lower;  ///< grid-scale width from the bottleneck oracle
  SweepOut sweep;                     ///< best family, reduced coordinates
  std::vector<double> start_maxima;   ///< relaxed max per sweep start
  std::vector<SweepRelaxReport> reports;
  std::optional<DiscreteCurve> saddle;  ///< refined max slice (reduced) when it was accepted
  double saddle_grad_sup = 0.0;
  std::optional<BottleneckResult> grid;
  StableNormResult stable;
};

namespace detail {

/// Smooth ordered perturbation of the interior slices of a linear family.
inline void perturb_sweepout(SweepOut& s, const CounterRng& rng) {
  const double a1 = rng.uniform(0, -1.0, 1.0), a2 = rng.uniform(1, -1.0, 1.0);
  const double M = static_cast<double>(s.size() - 1);
  // Amplitude keeps |change between neighbours| below half the spacing.
  const double amp = 0.1;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double t = static_cast<double>(i) / M;
    for (auto& v : s.slices[i].vertices)
      v.y += amp * std::sin(kPi * t) * (a1 * std::sin(2 * kPi * v.x) + a2 * std::cos(2 * kPi * v.x)) / std::sqrt(2.0);
  }
}

/// Inserts `c` into the family between the slices bracketing it, if it fits
/// the ordering. Returns false when it does not.
inline bool insert_slice(const PeriodicMetric& g, SweepOut& s, const DiscreteCurve& c, std::size_t near) {
  for (std::size_t i = (near > 0 ? near - 1 : 0); i + 1 < s.size() && i <= near + 1; ++i) {
    bool above = true, below = true;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c.vertices[j].y < s.slices[i].vertices[j].y - 1e-12) above = false;
      if (c.vertices[j].y > s.slices[i + 1].vertices[j].y + 1e-12) below = false;
    }
    if (above && below) {
      s.slices.insert(s.slices.begin() + static_cast<std::ptrdiff_t>(i + 1), c);
      s.lengths.insert(s.lengths.begin() + static_cast<std::ptrdiff_t>(i + 1), curve_length(g, c));
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Width of a primitive class: relaxed sweep-outs from the minimizers, the
/// best max slice refined toward the saddle, and the grid bottleneck value.
inline WidthResult width(const PeriodicMetric& g, const HomologyClass& r, const WidthOptions& opt = {}) {
  if (!r.primitive()) throw UsageError("width: class " + r.str() + " is not primitive; use barrier");
  if (opt.n_sweep_starts < 1) throw UsageError("width: n_sweep_starts must be >= 1");
  WidthResult out;
  out.r = r;
  out.stable = stable_norm(g, r, opt.stable);
  out.reduction = out.stable.reduction;
  out.S = out.stable.S;
  const PeriodicMetric rg = reduced_metric(g, out.reduction);
  const auto& mins = out.stable.reduced;
  const CounterRng rng(opt.stable.seed, "width");

  std::vector<SweepOut> fams(static_cast<std::size_t>(opt.n_sweep_starts));
  out.reports.resize(fams.size());
  out.start_maxima.resize(fams.size());
  for (std::size_t k = 0; k < fams.size(); ++k) {
    const DiscreteCurve& m = mins[k % mins.size()];
    if (!is_graph(m)) throw SolverFailure("width: minimizer of " + r.str() + " is not a graph in reduced coordinates");
    SweepOut s = init_sweepout(rg, m, opt.M, opt.stable.N);
    if (k >= mins.size()) {
      detail::perturb_sweepout(s, rng.child(k));
      update_lengths(rg, s, opt.sweep.quad_order);
    }
    auto [best, rep] = relax_sweepout(rg, std::move(s), opt.sweep);
    out.start_maxima[k] = best.max_length();
    out.reports[k] = rep;
    fams[k] = std::move(best);
  }
  const auto pick = static_cast<std::size_t>(std::min_element(out.start_maxima.begin(), out.start_maxima.end()) -
                                             out.start_maxima.begin());
  out.sweep = std::move(fams[pick]);

  if (opt.refine_saddle) {
    const std::size_t i = out.sweep.argmax();
    if (i > 0 && i + 1 < out.sweep.size()) {
      DiscreteCurve c = out.sweep.slices[i];
      out.saddle_grad_sup = graph_newton_polish(rg, c, 30, opt.sweep.quad_order);
      const double Lc = curve_length(rg, c, opt.sweep.quad_order);
      if (out.saddle_grad_sup < 1e-8 && Lc >= out.sweep.max_length() - 1e-9 &&
          detail::insert_slice(rg, out.sweep, c, i))
        out.saddle = c;
    }
  }
  out.omega_upper = out.sweep.max_length();
  if (opt.bottleneck) {
    try {
      out.grid = bottleneck_oracle(rg, opt.grid);
      out.omega_lower = out.grid->omega_grid;
    } catch (const UsageError&) {
      // State space over the cap: the grid value is optional.
    }
  }
  if (out.omega_upper < out.S - 1e-4)
    throw InvariantViolation("width: omega_upper below S for " + r.str());
  return out;
}

struct BarrierOptions {
  WidthOptions width{};
  std::uint64_t seed = 0;
};

struct BarrierRecord {
  HomologyClass r = HomologyClass::curve(1, 0);
  double S = 0.0;
  std::string S_method = "relax";
  double omega_upper = 0.0;
  std::optional<double> omega_lower;
  double deltaW = 0.0;
  std::size_t N = 0;
  std::size_t M = 0;
  int grid_nx = 0, grid_ny = 0;
  double wall_time_ms = 0.0;
  std::uint64_t seed = 0;
  double certificate = 0.0;
  bool ok = true;
  std::string error;  ///< set when the class failed inside a sequence
};

/// Clips deltaW within the numerical slack to 0 and rejects anything below.
inline double checked_barrier(double omega_upper, double S, const std::string& what) {
  double d = omega_upper - S;
  if (d < 0.0) {
    if (d < -1e-4) throw InvariantViolation("barrier: negative deltaW " + std::to_string(d) + " for " + what);
    d = 0.0;
  }
  return d;
}

/// Energy barrier for any class r = m r0: omega(m r0) is bounded by
/// omega(r0) + (m - 1) S(r0), sweeping one sheet at a time.
inline BarrierRecord barrier(const PeriodicMetric& g, const HomologyClass& r, const BarrierOptions& opt = {},
                             WidthResult* detail_out = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  const ClassReduction red = reduce_class(r);
  WidthOptions wo = opt.width;
  wo.stable.seed = opt.seed;
  WidthResult w = width(g, red.primitive, wo);
  BarrierRecord rec;
  rec.r = r;
  const double m = static_cast<double>(red.multiplicity);
  rec.S = m * w.S;
  rec.omega_upper = w.omega_upper + (m - 1.0) * w.S;
  if (red.multiplicity == 1) rec.omega_lower = w.omega_lower;
  rec.deltaW = checked_barrier(rec.omega_upper, rec.S, r.str());
  const double lower_bound = g.bounds().lambda > 0.0 ? std::sqrt(g.bounds().lambda) * r.euclidean_norm() : 0.0;
  if (rec.S < lower_bound * (1.0 - 1e-6))
    throw InvariantViolation("barrier: S below the comparison bound for " + r.str());
  rec.N = wo.stable.N;
  rec.M = w.sweep.size();
  if (w.grid) {
    rec.grid_nx = w.grid->nx;
    rec.grid_ny = w.grid->ny;
  }
  rec.seed = opt.seed;
  rec.certificate = degree_certificate(w.sweep);
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (detail_out) *detail_out = std::move(w);
  return rec;
}

/// Curve resolution for a class: 64 vertices per unit of |r|, capped.
inline std::size_t resolution_for(const HomologyClass& r, std::size_t per_unit = 64, std::size_t cap = 4096) {
  const auto n = static_cast<std::size_t>(std::floor(static_cast<double>(per_unit) * r.euclidean_norm()));
  return std::clamp<std::size_t>(n, DiscreteCurve::kMinVertices, cap);
}

struct BarrierSequence {
  std::vector<BarrierRecord> records;
  std::vector<Vec2> normalized;  ///< r_k / S(r_k)
  double liminf_estimate = 0.0;
  bool exhausted = false;        ///< finite expansion ended before K classes
};

inline BarrierSequence barrier_sequence_of(const PeriodicMetric& g, const std::vector<HomologyClass>& classes,
                                           const BarrierOptions& opt = {}, std::size_t per_unit = 64) {
  BarrierSequence out;
  for (const auto& r : classes) {
    BarrierOptions o = opt;
    o.width.stable.N = resolution_for(r, per_unit);
    BarrierRecord rec;
    try {
      rec = barrier(g, r, o);
    } catch (const Error& e) {
      rec.r = r;
      rec.ok = false;
      rec.error = e.what();
      rec.N = o.width.stable.N;
      rec.seed = opt.seed;
    }
    out.records.push_back(rec);
    out.normalized.push_back(rec.ok && rec.S > 0.0 ? Vec2{static_cast<double>(r.a()) / rec.S,
                                                          static_cast<double>(r.b()) / rec.S}
                                                    : Vec2{0.0, 0.0});
  }
  std::vector<double> ok;
  for (const auto& rec : out.records)
    if (rec.ok) ok.push_back(rec.deltaW);
  if (ok.empty()) throw SolverFailure("barrier_sequence: every class failed");
  const std::size_t tail = (ok.size() + 1) / 2;
  out.liminf_estimate = *std::min_element(ok.end() - static_cast<std::ptrdiff_t>(tail), ok.end());
  return out;
}

/// Barrier records along the convergents of the target slope.
inline BarrierSequence barrier_sequence(const PeriodicMetric& g, const DirectionTarget& target, std::size_t K,
                                        const BarrierOptions& opt = {}, std::size_t per_unit = 64) {
  if (K < 2) throw UsageError("barrier_sequence: K must be >= 2");
  const ConvergentSequence cs = convergents(target, K);
  BarrierSequence out = barrier_sequence_of(g, cs.classes, opt, per_unit);
  out.exhausted = cs.exhausted;
  return out;
}

/// Width of the trivial class measured from a sweep-out of r: regions
/// bounded by one slice above and one (0, 1)-translated slice below grow
/// from empty to the whole torus. The best schedule of the two boundaries is
/// a bottleneck path over index pairs.
inline double trivial_class_width(const SweepOut& s) {
  const std::size_t M = s.size();
  // State (i, j): upper boundary slice i, lower boundary slice j translated
  // down by one period; start (0, M-1), done when i == j.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> best(M * M, inf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const std::size_t start = 0 * M + (M - 1);
  best[start] = s.lengths[0] + s.lengths[M - 1];
  pq.push({best[start], start});
  while (!pq.empty()) {
    const auto [v, id] = pq.top();
    pq.pop();
    if (v > best[id]) continue;
    const std::size_t i = id / M, j = id % M;
    if (i == j) return v;
    auto relax = [&](std::size_t ni, std::size_t nj) {
      const double cost = ni == nj ? 0.0 : s.lengths[ni] + s.lengths[nj];
      const double nv = std::max(v, cost);
      const std::size_t nid = ni * M + nj;
      if (nv < best[nid]) {
        best[nid] = nv;
        pq.push({nv, nid});
      }
    };
    if (i + 1 <= j) relax(i + 1, j);
    if (j >= i + 1) relax(i, j - 1);
  }
  return inf;
}

/// Conformal metric (1 + eps (cos 2pi x + cos 2pi y) / 2) times the conformal factor of g.
/// A product of cosines would average out along axis-parallel curves and move
/// the barrier only at second order.
inline PeriodicMetric perturbed_conformal(const MetricConfig& cfg, double eps) {
  std::string f;
  switch (cfg.recipe) {
    case MetricConfig::Recipe::Flat: f = "1"; break;
    case MetricConfig::Recipe::Liouville:
    case MetricConfig::Recipe::Conformal: f = cfg.f; break;
    case MetricConfig::Recipe::BangertBump: f = cfg.bump_expression(); break;
    default: throw UsageError("perturbed_conformal: metric is not given by a conformal factor expression");
  }
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "(" << f << ")*(1+" << eps << "*(cos(2*pi*x)+cos(2*pi*y))/2)";
  return make_metric(MetricConfig::conformal(os.str()));
}

struct ContinuityPoint {
  double eps = 0.0;
  double deltaW = 0.0;
  double K = 0.0;  ///< |deltaW(eps) - deltaW(0)| / (|r| eps)
};

/// Measured Lipschitz ratios of the barrier under conformal perturbations.
inline std::vector<ContinuityPoint> barrier_continuity(const MetricConfig& cfg, const HomologyClass& r,
                                                       const std::vector<double>& eps, const BarrierOptions& opt = {}) {
  const double base = barrier(make_metric(cfg), r, opt).deltaW;
  std::vector<ContinuityPoint> out;
  for (double e : eps) {
    if (!(e > 0.0 && e < 1.0)) throw UsageError("barrier_continuity: eps must lie in (0, 1)");
    const double d = barrier(perturbed_conformal(cfg, e), r, opt).deltaW;
    out.push_back({e, d, std::abs(d - base) / (r.euclidean_norm() * e)});
  }
  return out;
}

}  // namespace torus_minmax
