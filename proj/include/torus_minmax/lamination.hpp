#pragma once

// Laminations of minimizers in a primitive class, their gaps, heteroclinic
// connections and mountain-pass curves inside gaps, recurrence along
// convergents, and the foliation test.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "index.hpp"
#include "stable_norm.hpp"
#include "sweepout.hpp"
#include "width.hpp"

namespace torus_minmax {

struct LaminationOptions {
  StableNormOptions stable{};
  int depth = 3;            ///< translates (0, j), |j| <= depth
  double gap_tol = 1e-3;
  bool fill = true;         ///< search for further minimizers between consecutive leaves
  double min_rel_tol = 1e-4;  ///< relative length slack for a fill curve to count as a minimizer
  RelaxOptions fill_relax{};
};

struct Gap {
  std::size_t lower_index = 0;  ///< index of the lower leaf in Lamination::leaves
  DiscreteCurve lower, upper;   ///< reduced coordinates
  double per_period_area = 0.0;
  double max_thickness = 0.0;
};

struct Lamination {
  HomologyClass r = HomologyClass::curve(1, 0);
  ClassReduction reduction{HomologyClass::curve(1, 0), 1, {}};
  double S = 0.0;
  double gap_tol = 1e-3;
  std::vector<DiscreteCurve> leaves;        ///< reduced coordinates, ascending, common x-grid
  std::vector<std::int64_t> translation;    ///< vertical translate j of each leaf
  std::vector<char> foliated;               ///< per consecutive pair: region between is filled by minimizers
  std::vector<Gap> gaps;

  std::vector<DiscreteCurve> original_leaves() const {
    std::vector<DiscreteCurve> out;
    const Mat2i Uinv = reduction.U.inverse_unimodular();
    for (const auto& c : leaves) out.push_back(map_curve(c, Uinv));
    return out;
  }
};

namespace detail {

inline double sup_above(const DiscreteCurve& lo, const DiscreteCurve& hi) {
  double d = 0.0;
  for (std::size_t j = 0; j < lo.size(); ++j) d = std::max(d, hi.vertices[j].y - lo.vertices[j].y);
  return d;
}

inline double min_above(const DiscreteCurve& lo, const DiscreteCurve& hi) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < lo.size(); ++j) d = std::min(d, hi.vertices[j].y - lo.vertices[j].y);
  return d;
}

}  // namespace detail

/// Consecutive non-foliated leaf pairs thicker than the tolerance.
inline std::vector<Gap> detect_gaps(const Lamination& lam, std::optional<double> gap_tol = std::nullopt) {
  const double tol = gap_tol.value_or(lam.gap_tol);
  std::vector<Gap> out;
  for (std::size_t i = 0; i + 1 < lam.leaves.size(); ++i) {
    if (i < lam.foliated.size() && lam.foliated[i]) continue;
    const double t = graph_sup_distance(lam.leaves[i], lam.leaves[i + 1]);
    if (t <= tol) continue;
    Gap g;
    g.lower_index = i;
    g.lower = lam.leaves[i];
    g.upper = lam.leaves[i + 1];
    g.max_thickness = t;
    g.per_period_area = graph_area_between(g.lower, g.upper);
    out.push_back(std::move(g));
  }
  return out;
}

/// Minimizers of a primitive class with their vertical translates, ordered,
/// with the regions between consecutive leaves classified as foliated or gap.
inline Lamination build_lamination(const PeriodicMetric& g, const HomologyClass& r, const LaminationOptions& opt = {}) {
  if (!r.primitive()) throw UsageError("build_lamination: class " + r.str() + " is not primitive");
  if (opt.depth < 1) throw UsageError("build_lamination: depth must be >= 1");
  Lamination lam;
  lam.r = r;
  lam.gap_tol = opt.gap_tol;
  const StableNormResult sn = stable_norm(g, r, opt.stable);
  lam.reduction = sn.reduction;
  lam.S = sn.S;
  const PeriodicMetric rg = reduced_metric(g, sn.reduction);
  const std::size_t N = opt.stable.N;
  const Quadrature q(opt.stable.relax.quad_order);

  // Leaves on the common grid x_j = j / N, relaxed as graphs there.
  std::vector<DiscreteCurve> base;
  for (const auto& m : sn.reduced) {
    if (!is_graph(m)) throw SolverFailure("build_lamination: minimizer is not a graph in reduced coordinates");
    auto [c, rep] = relax_graph_curve(rg, to_uniform_graph(m, N), {}, opt.stable.relax);
    base.push_back(detail::normalize_reduced(c));
  }
  std::stable_sort(base.begin(), base.end(),
                   [](const DiscreteCurve& a, const DiscreteCurve& b) { return a.vertices[0].y < b.vertices[0].y; });
  {
    std::vector<DiscreteCurve> dedup;
    for (auto& c : base) {
      bool dup = false;
      for (const auto& d : dedup)
        if (curve_distance_mod_translation(c, d) < opt.stable.dedup_tol) dup = true;
      if (!dup) dedup.push_back(std::move(c));
    }
    base = std::move(dedup);
  }
  // No two minimizers may cross, including across one period.
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = 0; j < base.size(); ++j)
      for (std::int64_t k : {-1, 0, 1}) {
        if (i == j && k == 0) continue;
        const DiscreteCurve t = translate(base[j], Vec2i{0, k});
        if (birkhoff_compare(base[i], t) == BirkhoffOrder::Crossing)
          throw SolverFailure("build_lamination: minimizers " + std::to_string(i) + " and " + std::to_string(j) +
                              (k ? " (translated by " + std::to_string(k) + ")" : std::string()) + " cross");
      }

  // One period of leaves with the status of the region above each.
  std::vector<DiscreteCurve> period;
  std::vector<char> status;
  for (std::size_t b = 0; b < base.size(); ++b) {
    const DiscreteCurve& lo0 = base[b];
    const DiscreteCurve hi0 = b + 1 < base.size() ? base[b + 1] : translate(base[0], Vec2i{0, 1});
    // Depth-first subdivision keeps leaves in ascending order.
    std::vector<std::pair<DiscreteCurve, DiscreteCurve>> stack{{lo0, hi0}};
    std::vector<std::pair<DiscreteCurve, char>> found;  // leaf, region above is foliated
    while (!stack.empty()) {
      auto [lo, hi] = std::move(stack.back());
      stack.pop_back();
      const double thick = detail::sup_above(lo, hi);
      if (thick <= opt.gap_tol || !opt.fill) {
        found.push_back({lo, thick <= opt.gap_tol ? char(1) : char(0)});
        continue;
      }
      const double Llo = curve_length_q(rg, lo, q), Lhi = curve_length_q(rg, hi, q);
      const double Lmin = std::min(Llo, Lhi);
      GraphConstraints cons;
      cons.lo.resize(N);
      cons.hi.resize(N);
      for (std::size_t j = 0; j < N; ++j) {
        cons.lo[j] = lo.vertices[j].y;
        cons.hi[j] = hi.vertices[j].y;
      }
      std::optional<DiscreteCurve> inner;
      for (double th : {0.5, 0.25, 0.75}) {
        auto [c, rep] = relax_graph_curve(rg, blend(lo, hi, th), cons, opt.fill_relax);
        if (!rep.converged || rep.length > Lmin * (1.0 + opt.min_rel_tol)) continue;
        if (detail::sup_above(lo, c) > 0.5 * opt.gap_tol && detail::sup_above(c, hi) > 0.5 * opt.gap_tol &&
            detail::min_above(lo, c) >= 0.0 && detail::min_above(c, hi) >= 0.0) {
          inner = std::move(c);
          break;
        }
      }
      if (!inner) {
        found.push_back({lo, char(0)});
        continue;
      }
      stack.push_back({*inner, hi});
      stack.push_back({lo, *inner});
    }
    // Keep the stable-norm leaf, leaves bounding gaps, and merge foliated runs.
    for (std::size_t k = 0; k < found.size(); ++k) {
      const bool gap_below = k > 0 && !found[k - 1].second;
      const bool gap_above = !found[k].second;
      if (k == 0 || gap_below || gap_above) {
        period.push_back(found[k].first);
        status.push_back(found[k].second);
      }
    }
  }

  for (std::int64_t j = -opt.depth; j <= opt.depth; ++j)
    for (std::size_t k = 0; k < period.size(); ++k) {
      lam.leaves.push_back(translate(period[k], Vec2i{0, j}));
      lam.translation.push_back(j);
      lam.foliated.push_back(status[k]);
    }
  lam.foliated.back() = 0;  // nothing above the top leaf
  for (std::size_t i = 0; i + 1 < lam.leaves.size(); ++i) {
    const BirkhoffOrder o = birkhoff_compare(lam.leaves[i], lam.leaves[i + 1]);
    if (o != BirkhoffOrder::Below)
      throw SolverFailure("build_lamination: leaves " + std::to_string(i) + " and " + std::to_string(i + 1) +
                          " are not ordered (" + to_string(o) + ")");
  }
  lam.gaps = detect_gaps(lam);
  return lam;
}

struct HeteroclinicOptions {
  double L = 8.0;                ///< strip half-length in periods
  std::size_t per_period = 128;  ///< vertices per unit of x
  double gap_tol = 1e-3;
  /// Accepted gradient sup once the objective has stalled. The position of the
  /// transition along x is an almost-flat mode, so the strict tolerance is rarely met.
  double stall_grad_tol = 1e-4;
  RelaxOptions relax{};
};

struct HeteroclinicResult {
  std::vector<Vec2> vertices;     ///< reduced coordinates, x in [-L, L]
  std::vector<double> lower, upper;  ///< boundary leaf heights at the vertices
  double objective = 0.0;         ///< length minus the broken reference length
  double initial_objective = 0.0; ///< same for the monotone step initializer
  double defect_left = 0.0;       ///< distance to the lower leaf one period from the left end
  double defect_right = 0.0;      ///< distance to the upper leaf one period from the right end
  std::vector<double> decay;      ///< distance to the nearer boundary leaf, per vertex
  bool decay_monotone = false;    ///< decay non-increasing toward both ends beyond |x| >= L/2
  bool converged = false;
  std::string warning;
  RelaxationReport report;
};

/// Minimizer of renormalized length on the strip [-L, L] attached to the
/// lower leaf on the left and the upper leaf on the right, between them.
inline HeteroclinicResult heteroclinic(const PeriodicMetric& rg, const Gap& gap, const HeteroclinicOptions& opt = {}) {
  if (!(opt.L >= 2.0)) throw UsageError("heteroclinic: L must be >= 2");
  if (opt.per_period < 8) throw UsageError("heteroclinic: per_period must be >= 8");
  if (gap.lower.rotation != Vec2i{1, 0} || gap.upper.rotation != Vec2i{1, 0})
    throw UsageError("heteroclinic: gap leaves must be reduced (1,0) curves");
  const GraphView lo(gap.lower), hi(gap.upper);
  const auto n = static_cast<std::size_t>(std::llround(2.0 * opt.L * static_cast<double>(opt.per_period))) + 1;
  const double h = 2.0 * opt.L / static_cast<double>(n - 1);
  HeteroclinicResult out;
  out.lower.resize(n);
  out.upper.resize(n);
  std::vector<Vec2> v(n), ref_lo, ref_hi;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -opt.L + h * static_cast<double>(i);
    out.lower[i] = lo(x);
    out.upper[i] = hi(x);
    if (out.upper[i] < out.lower[i]) throw UsageError("heteroclinic: gap leaves are not ordered");
    v[i] = {x, x < 0.0 ? out.lower[i] : out.upper[i]};
    if (x <= 0.0) ref_lo.push_back({x, out.lower[i]});
    if (x >= 0.0) ref_hi.push_back({x, out.upper[i]});
  }
  // The reference must span the same x-range, so the leaf pieces meet at x = 0.
  if (ref_lo.back().x < 0.0) ref_lo.push_back({0.0, lo(0.0)});
  if (ref_hi.front().x > 0.0) ref_hi.insert(ref_hi.begin(), Vec2{0.0, hi(0.0)});
  const Quadrature q(opt.relax.quad_order);
  const double ref = open_length(rg, ref_lo, q) + open_length(rg, ref_hi, q);
  out.initial_objective = open_length(rg, v, q) - ref;

  GraphConstraints cons;
  cons.lo = out.lower;
  cons.hi = out.upper;
  cons.pinned.assign(n, 0);
  cons.pinned.front() = cons.pinned.back() = 1;
  auto res = relax_graph(rg, std::move(v), {1.0, 0.0}, false, cons, opt.relax);
  out.vertices = std::move(res.vertices);
  out.report = res.report;
  out.converged = res.report.converged || res.report.grad_sup <= opt.stall_grad_tol;
  out.objective = res.report.length - ref;

  out.decay.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.decay[i] = std::max(0.0, std::min(out.vertices[i].y - out.lower[i], out.upper[i] - out.vertices[i].y));
  const auto one = static_cast<std::size_t>(std::llround(1.0 / h));
  out.defect_left = std::max(0.0, out.vertices[one].y - out.lower[one]);
  out.defect_right = std::max(0.0, out.upper[n - 1 - one] - out.vertices[n - 1 - one].y);
  out.decay_monotone = true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double x = out.vertices[i].x, x1 = out.vertices[i + 1].x;
    if (x >= opt.L / 2.0 && out.decay[i + 1] > out.decay[i] + 1e-9) out.decay_monotone = false;
    if (x1 <= -opt.L / 2.0 && out.decay[i] > out.decay[i + 1] + 1e-9) out.decay_monotone = false;
  }
  if (out.defect_left > 10.0 * opt.gap_tol || out.defect_right > 10.0 * opt.gap_tol) out.warning = "L too small";
  return out;
}

struct TranslateCoverage {
  double max_uncovered = 0.0;  ///< largest vertical gap left by the translates in the window
  bool crossing = false;       ///< some pair of translates crosses
  std::size_t translates = 0;
};

/// Horizontal translates c(x - s) of a heteroclinic, s on a fine grid, as a
/// candidate foliation of the gap over the window |x| <= window.
inline TranslateCoverage heteroclinic_translates(const HeteroclinicResult& het, double window = 1.0,
                                                 int substeps = 8) {
  const std::size_t n = het.vertices.size();
  const double x0 = het.vertices.front().x, h = het.vertices[1].x - x0;
  const double L = -x0;
  auto at = [&](double x) {
    const double u = std::clamp((x - x0) / h, 0.0, static_cast<double>(n - 1));
    const auto i = std::min(static_cast<std::size_t>(u), n - 2);
    const double t = u - static_cast<double>(i);
    return (1.0 - t) * het.vertices[i].y + t * het.vertices[i + 1].y;
  };
  auto leaf = [&](const std::vector<double>& y, double x) {
    const double u = std::clamp((x - x0) / h, 0.0, static_cast<double>(n - 1));
    const auto i = std::min(static_cast<std::size_t>(u), n - 2);
    const double t = u - static_cast<double>(i);
    return (1.0 - t) * y[i] + t * y[i + 1];
  };
  TranslateCoverage out;
  const double smax = L - window - 1.0;
  const double ds = h / substeps;
  const auto ns = static_cast<long>(std::floor(smax / ds));
  out.translates = static_cast<std::size_t>(2 * ns + 1);
  for (double x = -window; x <= window + 1e-12; x += h) {
    double prev = leaf(het.upper, x);  // translates by large negative s sit near the upper leaf
    double worst = 0.0;
    for (long k = -ns; k <= ns; ++k) {
      const double y = at(x - static_cast<double>(k) * ds);
      if (y > prev + 1e-12) out.crossing = true;
      worst = std::max(worst, prev - y);
      prev = y;
    }
    worst = std::max(worst, prev - leaf(het.lower, x));
    out.max_uncovered = std::max(out.max_uncovered, worst);
  }
  return out;
}

struct GapMinmaxOptions {
  std::size_t M = 33;
  SweepRelaxOptions sweep{};
  double gap_tol = 1e-3;
  std::optional<double> barrier;  ///< measured deltaW of the enclosing class, if known
};

struct GapMinmaxResult {
  DiscreteCurve critical;         ///< reduced coordinates
  double length = 0.0;
  double lower_length = 0.0;
  double excess = 0.0;            ///< length(critical) - length(lower leaf), per period
  double sweep_max = 0.0;
  double grad_sup = 0.0;
  IndexEstimate index;
  bool interior_minimal = false;  ///< index 0: a closed minimal curve lies inside the gap
  std::string diagnostic;
  SweepOut sweep;
};

/// Mountain-pass curve of the family of curves joining the two leaves of a gap.
inline GapMinmaxResult gap_minmax(const PeriodicMetric& rg, const Gap& gap, const GapMinmaxOptions& opt = {}) {
  if (gap.max_thickness <= opt.gap_tol) throw UsageError("gap_minmax: no gap above tolerance");
  if (gap.lower.size() != gap.upper.size()) throw UsageError("gap_minmax: leaves must share the vertex grid");
  if (opt.M < 3) throw UsageError("gap_minmax: M must be >= 3");
  GapMinmaxResult out;
  SweepOut s;
  s.w = {0, 0};
  for (std::size_t i = 0; i < opt.M; ++i)
    s.slices.push_back(blend(gap.lower, gap.upper, static_cast<double>(i) / static_cast<double>(opt.M - 1)));
  s.slices.front() = gap.lower;
  s.slices.back() = gap.upper;
  update_lengths(rg, s, opt.sweep.quad_order);
  auto [best, rep] = relax_sweepout(rg, std::move(s), opt.sweep);
  out.sweep_max = best.max_length();
  const std::size_t i = best.argmax();
  if (i == 0 || i + 1 == best.size())
    throw SolverFailure("gap_minmax: gap width not bounded below (family maximum at a boundary leaf)");

  DiscreteCurve c = best.slices[i];
  graph_newton_polish(rg, c, 30, opt.sweep.quad_order);
  auto [polished, sup] = newton_polish(rg, c, 40, opt.sweep.quad_order);
  out.critical = std::move(polished);
  out.grad_sup = sup;
  out.sweep = std::move(best);
  if (!(sup < 1e-6)) throw SolverFailure("gap_minmax: mountain-pass refinement did not converge (gradient sup " +
                                         std::to_string(sup) + ")");
  if (!is_graph(out.critical) || graph_sup_distance(out.critical, gap.lower) < opt.gap_tol ||
      graph_sup_distance(out.critical, gap.upper) < opt.gap_tol)
    throw SolverFailure("gap_minmax: gap width not bounded below (critical curve collapsed onto a leaf)");
  out.length = curve_length(rg, out.critical, opt.sweep.quad_order);
  out.lower_length = curve_length(rg, gap.lower, opt.sweep.quad_order);
  out.excess = out.length - out.lower_length;
  out.index = index_estimate(rg, out.critical, opt.sweep.quad_order);
  if (out.index.negative_count == 0) {
    out.interior_minimal = true;
    out.diagnostic = "closed minimal curve inside gap";
  } else if (out.index.negative_count > 1) {
    out.diagnostic = "index above one";
  }
  if (opt.barrier && out.excess < 0.9 * *opt.barrier - 1e-9)
    throw InvariantViolation("gap_minmax: excess " + std::to_string(out.excess) + " below the measured barrier " +
                             std::to_string(*opt.barrier));
  return out;
}

struct RecurrenceLevel {
  HomologyClass r = HomologyClass::curve(1, 0);
  double max_gap = 0.0;        ///< largest spacing of strands on the vertical sections
  double normalized_gap = 0.0; ///< max_gap times the strand count, 1 for evenly spaced strands
  double defect_above = 0.0;   ///< candidate strand: distance to the next strand above
  double defect_below = 0.0;   ///< candidate strand: distance to the next strand below
  std::size_t strands = 0;
};

struct RecurrenceResult {
  std::vector<RecurrenceLevel> levels;
  std::vector<DiscreteCurve> samples;  ///< minimizers of the last class, original coordinates
  bool recurrent = false;
};

struct RecurrenceOptions {
  StableNormOptions stable{};
  std::size_t per_unit = 32;
  std::vector<double> sections{0.0, 0.25, 0.5, 0.75};
  double spacing_factor = 2.0;  ///< recurrent when normalized_gap <= factor at the last two levels
};

namespace detail {

/// Heights in [0, 1) where the projected curve crosses the vertical line x = x0.
inline std::vector<double> section_heights(const DiscreteCurve& c, double x0) {
  std::vector<double> hs;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    const Vec2 a = c.vertex(k), b = c.vertex(k + 1);
    if (a.x == b.x) continue;
    // Half-open in the direction of travel so shared vertices count once.
    const bool fwd = a.x < b.x;
    const double lo = std::min(a.x, b.x), hi = std::max(a.x, b.x);
    for (double m = std::ceil(lo - x0); m + x0 <= hi; m += 1.0) {
      const double x = m + x0;
      if (fwd ? x >= hi : x <= lo) continue;
      const double t = (x - a.x) / (b.x - a.x);
      hs.push_back(frac(a.y + t * (b.y - a.y)));
    }
  }
  std::sort(hs.begin(), hs.end());
  return hs;
}

}  // namespace detail

/// Strand spacing of one minimizer per convergent on vertical sections of
/// the torus. Without gaps the spacings shrink like 1 / strands; a gap keeps
/// one spacing bounded below, so the normalized gap grows with the class.
inline RecurrenceResult recurrent_closure(const PeriodicMetric& g, const DirectionTarget& target, std::size_t K,
                                          const RecurrenceOptions& opt = {}) {
  if (K < 3) throw UsageError("recurrent_closure: K must be >= 3");
  const ConvergentSequence cs = convergents(target, K);
  RecurrenceResult out;
  for (const auto& r : cs.classes) {
    StableNormOptions so = opt.stable;
    so.N = resolution_for(r, opt.per_unit);
    const StableNormResult sn = stable_norm(g, r, so);
    RecurrenceLevel lvl;
    lvl.r = r;
    bool first = true;
    for (double x0 : opt.sections) {
      const std::vector<double> hs = detail::section_heights(sn.minimizers.front(), x0);
      if (hs.empty()) continue;
      lvl.strands = std::max(lvl.strands, hs.size());
      for (std::size_t i = 0; i < hs.size(); ++i) {
        const double next = i + 1 < hs.size() ? hs[i + 1] : hs[0] + 1.0;
        lvl.max_gap = std::max(lvl.max_gap, next - hs[i]);
      }
      lvl.normalized_gap = std::max(lvl.normalized_gap, lvl.max_gap * static_cast<double>(hs.size()));
      if (first) {
        // Candidate: the lowest strand on the first section.
        lvl.defect_above = hs.size() > 1 ? hs[1] - hs[0] : 1.0;
        lvl.defect_below = hs.size() > 1 ? hs[0] + 1.0 - hs.back() : 1.0;
        first = false;
      }
    }
    out.levels.push_back(lvl);
    if (&r == &cs.classes.back()) out.samples = sn.minimizers;
  }
  const std::size_t L = out.levels.size();
  out.recurrent = L >= 2;
  for (std::size_t i = L >= 2 ? L - 2 : 0; i < L; ++i)
    if (out.levels[i].normalized_gap > opt.spacing_factor) out.recurrent = false;
  return out;
}

enum class Verdict { Foliation, GapsFound, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Foliation: return "Foliation";
    case Verdict::GapsFound: return "GapsFound";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct FoliationOptions {
  BarrierOptions barrier{};
  std::size_t per_unit = 64;
  double foliation_tol = 1e-2;
  LaminationOptions lamination{};
};

struct FoliationReport {
  Verdict verdict = Verdict::Inconclusive;
  BarrierSequence sequence;
  std::vector<Gap> gaps;                   ///< gaps of the class examined for the verdict
  std::optional<HomologyClass> gap_class;
  std::vector<std::string> warnings;
  std::string reason;
};

/// Foliation criterion along an explicit class sequence. `limit` is the
/// class the sequence approaches when it is itself rational.
inline FoliationReport foliation_test(const PeriodicMetric& g, const std::vector<HomologyClass>& classes,
                                      std::optional<HomologyClass> limit, const FoliationOptions& opt = {}) {
  FoliationReport rep;
  try {
    rep.sequence = barrier_sequence_of(g, classes, opt.barrier, opt.per_unit);
  } catch (const Error& e) {
    rep.reason = e.what();
    return rep;
  }
  const double lim = rep.sequence.liminf_estimate;
  auto lamination_gaps = [&](const HomologyClass& r) {
    LaminationOptions lo = opt.lamination;
    lo.stable.N = resolution_for(r, opt.per_unit);
    const Lamination lam = build_lamination(g, reduce_class(r).primitive, lo);
    rep.gap_class = r;
    return lam.gaps;
  };
  try {
    if (lim < opt.foliation_tol) {
      rep.verdict = Verdict::Foliation;
      rep.reason = "barrier liminf below tolerance";
      if (limit) {
        const auto gaps = lamination_gaps(*limit);
        if (!gaps.empty()) {
          rep.gaps = gaps;
          rep.warnings.push_back("WARNING: barriers vanish along the sequence but the lamination of the limit class " +
                                 limit->str() + " has " + std::to_string(gaps.size()) +
                                 " gaps; the limit minimizers do not form a foliation");
        }
      }
    } else if (lim > 5.0 * opt.foliation_tol) {
      const auto gaps = lamination_gaps(classes.back());
      rep.gaps = gaps;
      if (!gaps.empty()) {
        rep.verdict = Verdict::GapsFound;
        rep.reason = "barrier floor and gaps at the last class";
      } else {
        rep.reason = "barrier floor but no gap at the last class";
      }
    } else {
      rep.reason = "barrier liminf between the tolerances";
    }
  } catch (const Error& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.reason = e.what();
  }
  return rep;
}

/// Foliation criterion along the convergents of a slope.
inline FoliationReport foliation_test(const PeriodicMetric& g, const DirectionTarget& target, std::size_t K,
                                      const FoliationOptions& opt = {}) {
  if (K < 2) throw UsageError("foliation_test: K must be >= 2");
  const ConvergentSequence cs = convergents(target, K);
  std::optional<HomologyClass> limit;
  if (!target.infinite() && cs.exhausted) limit = cs.classes.back();
  return foliation_test(g, cs.classes, limit, opt);
}

}  // namespace torus_minmax
