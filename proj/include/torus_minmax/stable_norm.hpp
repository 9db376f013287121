#pragma once

// Stable norm S(r): minimal length in a homology class, by multi-start
// relaxation in reduced coordinates seeded from the lattice oracle and from
// straight lines.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "classes.hpp"
#include "curve.hpp"
#include "dp_oracle.hpp"
#include "geodesic.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace torus_minmax {

struct StableNormOptions {
  std::size_t N = 256;   ///< vertices per curve
  int n_starts = 16;     ///< half lattice-oracle seeds, half straight lines
  DpOptions dp{};        ///< lattice oracle resolution for seeds
  bool dp_seeds = true;
  RelaxOptions relax{};
  double dedup_tol = 1e-5;
  double minimizer_rel_tol = 1e-7;  ///< relative length slack for "is a minimizer"
  std::uint64_t seed = 0;
};

struct StableNormResult {
  HomologyClass r = HomologyClass::curve(1, 0);
  ClassReduction reduction{HomologyClass::curve(1, 0), 1, {}};
  double S = 0.0;                        ///< S(r) including multiplicity
  double S_primitive = 0.0;
  std::vector<DiscreteCurve> reduced;    ///< distinct minimizers in reduced coordinates, ascending
  std::vector<DiscreteCurve> minimizers; ///< the same in original coordinates (primitive class)
  std::vector<RelaxationReport> reports; ///< one per start
  int converged_starts = 0;
  double dp_length = 0.0;                ///< lattice oracle value (primitive class), 0 if not run
};

namespace detail {

/// Shifts a reduced curve vertically by an integer so that its first vertex has y in [0, 1).
inline DiscreteCurve normalize_reduced(const DiscreteCurve& c) {
  const double k = std::floor(c.vertices.front().y);
  return translate(c, Vec2i{0, -static_cast<std::int64_t>(k)});
}

inline bool lex_less(const DiscreteCurve& a, const DiscreteCurve& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.vertices[i].x != b.vertices[i].x) return a.vertices[i].x < b.vertices[i].x;
    if (a.vertices[i].y != b.vertices[i].y) return a.vertices[i].y < b.vertices[i].y;
  }
  return a.size() < b.size();
}

}  // namespace detail

/// Relaxed multi-start minimization in the primitive class of `red`, in reduced coordinates.
inline StableNormResult stable_norm_reduced(const PeriodicMetric& rg, const ClassReduction& red,
                                            const StableNormOptions& opt) {
  if (opt.n_starts < 1) throw UsageError("stable_norm: n_starts must be >= 1");
  if (opt.N < DiscreteCurve::kMinVertices) throw UsageError("stable_norm: N must be >= 8");
  StableNormResult out;
  out.reduction = red;
  const CounterRng rng(opt.seed, "stable_norm");

  std::vector<DiscreteCurve> seeds;
  if (opt.dp_seeds && opt.n_starts >= 2) {
    // The oracle runs on the already-reduced metric, so pass (1, 0).
    const DpResult dp = dp_min_cycle(rg, HomologyClass::curve(1, 0), opt.dp);
    out.dp_length = dp.length;
    std::vector<const DpRow*> rows;
    for (const auto& r : dp.rows)
      if (std::isfinite(r.length) && r.reduced.size() >= 2) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](const DpRow* a, const DpRow* b) { return a->length < b->length; });
    const std::size_t want = static_cast<std::size_t>(opt.n_starts / 2);
    const double sep = 1.5 / static_cast<double>(opt.dp.ny);
    std::vector<DiscreteCurve> picked;
    for (const DpRow* r : rows) {
      if (picked.size() >= want) break;
      DiscreteCurve c = resample_arclength(r->reduced, opt.N);
      bool distinct = true;
      for (const auto& p : picked)
        if (curve_distance_mod_translation(p, c) < sep) {
          distinct = false;
          break;
        }
      if (distinct) picked.push_back(std::move(c));
    }
    seeds = std::move(picked);
  }
  const std::size_t n_lines = static_cast<std::size_t>(opt.n_starts) - seeds.size();
  for (std::size_t k = 0; k < n_lines; ++k) {
    const double jitter = rng.uniform(k, -0.25, 0.25);
    const double y = (static_cast<double>(k) + 0.5 + jitter) / static_cast<double>(n_lines);
    seeds.push_back(straight_curve({1, 0}, opt.N, {0.0, y}));
  }

  std::vector<DiscreteCurve> relaxed(seeds.size());
  out.reports.resize(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    RelaxOptions ro = opt.relax;
    ro.seed = opt.seed;
    auto [c, rep] = relax_to_geodesic(rg, seeds[i], ro);
    relaxed[i] = detail::normalize_reduced(c);
    out.reports[i] = rep;
  });

  double S = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < relaxed.size(); ++i) {
    if (!out.reports[i].converged) continue;
    ++out.converged_starts;
    S = std::min(S, out.reports[i].length);
  }
  if (out.converged_starts == 0) {
    const auto it = std::min_element(out.reports.begin(), out.reports.end(),
                                     [](const auto& a, const auto& b) { return a.grad_sup < b.grad_sup; });
    throw SolverFailure("stable_norm: no start converged; best gradient sup " + std::to_string(it->grad_sup) +
                        " after " + std::to_string(it->iterations) + " iterations, length " +
                        std::to_string(it->length));
  }
  out.S_primitive = S;

  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < relaxed.size(); ++i)
    if (out.reports[i].converged && out.reports[i].length <= S * (1.0 + opt.minimizer_rel_tol)) cand.push_back(i);
  std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
    if (out.reports[a].length != out.reports[b].length) return out.reports[a].length < out.reports[b].length;
    return detail::lex_less(relaxed[a], relaxed[b]);
  });
  for (std::size_t i : cand) {
    bool dup = false;
    for (const auto& m : out.reduced)
      if (curve_distance_mod_translation(m, relaxed[i]) < opt.dedup_tol) {
        dup = true;
        break;
      }
    if (!dup) out.reduced.push_back(relaxed[i]);
  }
  // Ascending by height at the first vertex, the order used by laminations.
  std::stable_sort(out.reduced.begin(), out.reduced.end(),
                   [](const DiscreteCurve& a, const DiscreteCurve& b) { return a.vertices[0].y < b.vertices[0].y; });
  const Mat2i Uinv = red.U.inverse_unimodular();
  for (const auto& m : out.reduced) out.minimizers.push_back(map_curve(m, Uinv));
  return out;
}

/// S(r) with minimizers. Non-primitive classes use S(m r0) = m S(r0).
inline StableNormResult stable_norm(const PeriodicMetric& g, const HomologyClass& r,
                                    const StableNormOptions& opt = {}) {
  const ClassReduction red = reduce_class(r);
  StableNormResult out = stable_norm_reduced(reduced_metric(g, red), red, opt);
  out.r = r;
  out.S = static_cast<double>(red.multiplicity) * out.S_primitive;
  return out;
}

/// S(alpha) + S(beta) - S(alpha + beta); positive for a strictly convex norm.
inline double convexity_gap(const PeriodicMetric& g, const HomologyClass& alpha, const HomologyClass& beta,
                            const StableNormOptions& opt = {}) {
  const Vec2i a = alpha.curve_class(), b = beta.curve_class();
  if (a.a * b.b - a.b * b.a == 0) throw UsageError("convexity_gap: classes are linearly dependent");
  return stable_norm(g, alpha, opt).S + stable_norm(g, beta, opt).S - stable_norm(g, alpha + beta, opt).S;
}

}  // namespace torus_minmax
