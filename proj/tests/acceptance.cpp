// Acceptance run: one PASS/FAIL line per criterion, followed by indented
// measurements. Arguments select criteria by number; default is all nine.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "torus_minmax/dp_oracle.hpp"
#include "torus_minmax/lamination.hpp"
#include "torus_minmax/runner.hpp"
#include "torus_minmax/sweepout.hpp"

using namespace torus_minmax;

namespace {

const MetricConfig kLiouville = MetricConfig::liouville("2+cos(2*pi*y)");
const MetricConfig kBump = MetricConfig::bangert_bump({0.5, 0.5}, 0.1, 10.0);

// Collects sub-checks of one criterion.
struct Check {
  bool ok = true;
  std::ostringstream log;

  void expect(bool cond, const std::string& what) {
    ok = ok && cond;
    log << "    " << (cond ? "ok   " : "FAIL ") << what << "\n";
  }
  void note(const std::string& what) { log << "    " << what << "\n"; }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double simpson(const std::function<double(double)>& f, int n = 4000) {
  const double h = 1.0 / n;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

BarrierOptions barrier_opts(std::size_t N, bool bottleneck = false) {
  BarrierOptions o;
  o.width.stable.N = N;
  o.width.stable.n_starts = 8;
  o.width.M = 17;
  o.width.n_sweep_starts = 2;
  o.width.bottleneck = bottleneck;
  return o;
}

// Conformal factor mean 1.5 with random modes |j|,|k| <= 2, redrawn until Lambda / lambda <= 4.
MetricConfig random_fourier(std::uint64_t seed, double amp) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    const CounterRng rng(seed, attempt);
    FourierSeries s;
    s.mean = 1.5;
    int c = 0;
    for (int j = 0; j <= 2; ++j)
      for (int k = -2; k <= 2; ++k) {
        if (j == 0 && k <= 0) continue;
        s.terms.push_back({j, k, rng.uniform(c++, -amp, amp), rng.uniform(c++, -amp, amp)});
      }
    const auto cfg = MetricConfig::fourier_factor(s);
    const auto b = make_metric(cfg).bounds();
    if (b.Lambda / b.lambda <= 4.0) return cfg;
  }
}

// Distance from p to the segment [a, b].
double point_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double t = std::clamp(dot(p - a, d) / dot(d, d), 0.0, 1.0);
  return norm(p - (a + d * t));
}

// Least distance from the bump center (and its integer translates) to a closed curve.
double distance_to_center(const DiscreteCurve& c, Vec2 center) {
  double m = 1e300;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = c.vertices[i];
    const Vec2 b = i + 1 < n ? c.vertices[i + 1] : c.vertices[0] + c.rotation.as_real();
    for (int dx = -3; dx <= 3; ++dx)
      for (int dy = -3; dy <= 3; ++dy) {
        const Vec2 q{center.x + std::floor(a.x) + dx, center.y + std::floor(a.y) + dy};
        m = std::min(m, point_segment(q, a, b));
      }
  }
  return m;
}

bool criterion1(Check& c) {
  const auto g = make_metric(MetricConfig::flat());
  for (const auto& r : {HomologyClass::curve(1, 0), HomologyClass::curve(1, 1), HomologyClass::curve(2, 1),
                        HomologyClass::curve(3, 4)}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rec = barrier(g, r, barrier_opts(256));
    const double dt = seconds_since(t0), exact = r.euclidean_norm();
    c.expect(std::abs(rec.S - exact) <= 0.005 * exact, r.str() + fmt(": S = %.6f vs %.6f", rec.S, exact));
    c.expect(rec.deltaW <= 2e-3, r.str() + fmt(": deltaW = %.2e <= 2e-3", rec.deltaW));
    c.expect(dt < 30.0, r.str() + fmt(": %.1f s < 30 s", dt));
  }
  return c.ok;
}

bool criterion2(Check& c) {
  const auto g = make_metric(kLiouville);
  StableNormOptions so;
  so.N = 256;
  const auto h = stable_norm(g, HomologyClass::curve(1, 0), so);
  c.expect(std::abs(h.S - 1.0) <= 1e-3, fmt("S(1,0) = %.6f", h.S));
  double worst = 0.0;
  for (const auto& m : h.minimizers)
    for (const auto& v : m.vertices) worst = std::max(worst, std::abs(v.y - std::floor(v.y) - 0.5));
  c.expect(h.minimizers.size() == 1 && worst < 1e-3,
           fmt("%.0f minimizer(s), max |y - 0.5| = %.2e", static_cast<double>(h.minimizers.size()), worst));

  const double quad = simpson([](double y) { return std::sqrt(2.0 + std::cos(2.0 * kPi * y)); });
  const auto v = stable_norm(g, HomologyClass::curve(0, 1), so);
  c.expect(std::abs(v.S - quad) <= 1e-3, fmt("S(0,1) = %.6f vs quadrature %.6f", v.S, quad));

  for (int k = 1; k <= 4; ++k) {
    const auto r = HomologyClass::curve(1, k);
    const auto rec = barrier(g, r, barrier_opts(resolution_for(r, 64)));
    c.expect(rec.deltaW <= 5e-3, r.str() + fmt(": deltaW = %.2e <= 5e-3", rec.deltaW));
  }
  for (std::size_t N : {128u, 256u, 512u}) {
    const auto rec = barrier(g, HomologyClass::curve(1, 0), barrier_opts(N));
    c.expect(rec.deltaW >= 0.1, fmt("(1,0) N = %.0f: deltaW = %.4f >= 0.1", static_cast<double>(N), rec.deltaW));
  }
  const auto rec = barrier(g, HomologyClass::curve(1, 0), barrier_opts(128, true));
  const double lower = rec.omega_lower.value_or(0.0) - rec.S;
  c.expect(rec.omega_lower.has_value() && lower >= 0.1,
           fmt("12x12 bottleneck: omega_grid - S = %.4f >= 0.1 (omega_upper - S = %.4f)", lower, rec.deltaW));
  return c.ok;
}

bool criterion3(Check& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = make_metric(kBump);
  const Vec2 center{0.5, 0.5};
  StableNormOptions so;
  so.N = 128;
  const auto sn = stable_norm(g, HomologyClass::curve(1, 0), so);
  double d = 1e300;
  for (const auto& m : sn.minimizers) d = std::min(d, distance_to_center(m, center));
  LaminationOptions lo;
  lo.stable = so;
  const auto lam = build_lamination(g, HomologyClass::curve(1, 0), lo);
  for (const auto& leaf : lam.original_leaves()) d = std::min(d, distance_to_center(leaf, center));
  c.expect(d > 0.1, fmt("%.0f minimizers and %.0f leaves: min distance to center = %.4f > 0.1",
                        static_cast<double>(sn.minimizers.size()), static_cast<double>(lam.leaves.size()), d));

  auto bo = barrier_opts(64);
  const auto seq = barrier_sequence(g, DirectionTarget::golden(), 4, bo, 64);
  for (const auto& r : seq.records) c.note(r.r.str() + fmt(": deltaW = %.4f", r.deltaW));
  c.expect(seq.liminf_estimate >= 0.05, fmt("golden K = 4: liminf_estimate = %.4f >= 0.05", seq.liminf_estimate));

  FoliationOptions fo;
  fo.per_unit = 64;
  fo.barrier = bo;
  fo.lamination.stable.n_starts = 8;
  const auto rep = foliation_test(g, DirectionTarget::golden(), 4, fo);
  c.expect(rep.verdict == Verdict::GapsFound, std::string("foliation_test verdict: ") + to_string(rep.verdict));
  const double dt = seconds_since(t0);
  c.expect(dt < 600.0, fmt("%.1f s < 600 s", dt));
  return c.ok;
}

bool criterion4(Check& c) {
  const std::size_t n_metrics = 200;
  const std::vector<HomologyClass> classes{HomologyClass::curve(1, 0), HomologyClass::curve(0, 1),
                                           HomologyClass::curve(1, 1)};
  double worst_neg = 1e300, worst_mult = -1e300, worst_convex = 1e300, worst_sandwich = -1e300;
  std::size_t fails = 0, errors = 0;
  for (std::size_t i = 0; i < n_metrics; ++i) {
    try {
      const auto cfg = random_fourier(1000 + i, 0.12);
      const auto g = make_metric(cfg);
      StableNormOptions so;
      so.n_starts = 8;
      for (std::size_t a = 0; a < classes.size(); ++a) {
        const auto& r = classes[a];
        // One sweep start: the 600 width runs dominate the whole acceptance time.
        auto opt = barrier_opts(resolution_for(r, 64));
        opt.width.n_sweep_starts = 1;
        const auto b1 = barrier(g, r, opt);
        const auto b2 = barrier(g, HomologyClass::curve(2 * r.curve_class().a, 2 * r.curve_class().b), opt);
        const double raw = b1.omega_upper - b1.S;
        worst_neg = std::min(worst_neg, raw);
        worst_mult = std::max(worst_mult, b2.deltaW - b1.deltaW);
        const double s_relax = b1.S;
        const double s_dp = dp_min_cycle(g, r, {64, 64, true}).length;
        worst_sandwich = std::max(worst_sandwich, s_relax / s_dp - 1.0);
        const bool ok = raw >= -1e-4 && b2.deltaW <= b1.deltaW + 5e-3 && s_relax <= s_dp * 1.03;
        for (std::size_t b = a + 1; b < classes.size(); ++b) {
          so.N = resolution_for(classes[a] + classes[b], 64);
          const double gap = convexity_gap(g, classes[a], classes[b], so);
          worst_convex = std::min(worst_convex, gap);
          if (!(gap > 0.0)) ++fails;
        }
        if (!ok) ++fails;
      }
    } catch (const std::exception& e) {
      ++errors;
      c.note(fmt("metric %.0f: ", static_cast<double>(i)) + e.what());
    }
  }
  c.expect(worst_neg >= -1e-4, fmt("min over runs of omega - S = %.2e >= -1e-4", worst_neg));
  c.expect(worst_mult <= 5e-3, fmt("max deltaW(2r) - deltaW(r) = %.2e <= 5e-3", worst_mult));
  c.expect(worst_convex > 0.0, fmt("min convexity gap = %.2e > 0", worst_convex));
  c.expect(worst_sandwich <= 0.03, fmt("max S_relax / S_dp - 1 = %.2e <= 0.03", worst_sandwich));
  c.expect(fails == 0 && errors == 0, fmt("%.0f metrics x 3 classes: %.0f failing checks, %.0f errors",
                                          static_cast<double>(n_metrics), static_cast<double>(fails),
                                          static_cast<double>(errors)));
  return c.ok;
}

bool criterion5(Check& c) {
  const double delta = 0.01;
  const std::size_t N = 64;
  double worst = 0.0, worst_excess = -1e300;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto g = make_metric(i % 2 ? kLiouville : random_fourier(5000 + i, 0.12));
    const CounterRng rng(i, "pairs");
    const double base = rng.uniform(0, 0.0, 1.0);
    DiscreteCurve c0 = straight_curve({1, 0}, N, {0, base}), c1 = c0;
    for (int m = 1; m <= 3; ++m) {
      const double a0 = rng.uniform(10 + m, -0.05, 0.05) / m, p0 = rng.uniform(20 + m, 0.0, 2 * kPi);
      const double a1 = rng.uniform(30 + m, -0.03, 0.03) / m, p1 = rng.uniform(40 + m, 0.0, 2 * kPi);
      for (std::size_t j = 0; j < N; ++j) {
        const double x = c0.vertices[j].x;
        c0.vertices[j].y += a0 * std::sin(2 * kPi * m * x + p0);
        c1.vertices[j].y += a0 * std::sin(2 * kPi * m * x + p0) + a1 * std::sin(2 * kPi * m * x + p1);
      }
    }
    const auto r = interpolate(g, c0, c1, delta);
    const double top = std::max(curve_length(g, c0), curve_length(g, c1));
    double peak = 0.0;
    for (double L : r.lengths) peak = std::max(peak, L);
    worst = std::max(worst, r.C0);
    worst_excess = std::max(worst_excess, peak - top - r.C0 * delta);
  }
  c.expect(worst_excess <= 1e-12, fmt("max length excess - C0 delta = %.2e <= 0", worst_excess));
  c.expect(worst <= 4.0, fmt("100 pairs: max C0 = %.4f <= 4", worst));
  return c.ok;
}

bool criterion6(Check& c) {
  const auto g = make_metric(kLiouville);
  LaminationOptions lo;
  lo.stable.N = 128;
  const auto lam = build_lamination(g, HomologyClass::curve(1, 0), lo);
  const auto gaps = detail::base_gaps(lam);
  c.expect(!gaps.empty(), fmt("%.0f gap(s) per period", static_cast<double>(gaps.size())));
  if (gaps.empty()) return false;
  const auto rg = reduced_metric(g, lam.reduction);
  const auto r = gap_minmax(rg, lam.gaps[gaps.front()]);
  double off = 0.0;
  for (const auto& v : r.critical.vertices) off = std::max(off, std::abs(v.y - std::round(v.y)));
  c.expect(off < 1e-3, fmt("critical curve horizontal at integer height: max offset %.2e", off));
  c.expect(r.index.negative_count == 1, fmt("index = %.0f", static_cast<double>(r.index.negative_count)));
  const double target = std::sqrt(3.0) - 1.0;
  c.expect(std::abs(r.excess - target) <= 5e-3, fmt("excess = %.5f vs sqrt(3) - 1 = %.5f", r.excess, target));
  const double dW = barrier(g, HomologyClass::curve(1, 0), barrier_opts(128)).deltaW;
  c.expect(r.excess >= 0.9 * dW, fmt("excess %.5f >= 0.9 x deltaW(1,0) = %.5f", r.excess, 0.9 * dW));
  return c.ok;
}

bool criterion7(Check& c) {
  const auto g = make_metric(kLiouville);
  LaminationOptions lo;
  lo.stable.N = 128;
  const auto lam = build_lamination(g, HomologyClass::curve(1, 0), lo);
  const auto gaps = detail::base_gaps(lam);
  if (gaps.empty()) {
    c.expect(false, "no gap found");
    return false;
  }
  HeteroclinicOptions o;
  o.L = 8;
  const auto het = heteroclinic(reduced_metric(g, lam.reduction), lam.gaps[gaps.front()], o);
  c.expect(het.converged, std::string("converged") + (het.warning.empty() ? "" : " (" + het.warning + ")"));
  c.expect(std::max(het.defect_left, het.defect_right) < 1e-2,
           fmt("end defects %.2e, %.2e < 1e-2", het.defect_left, het.defect_right));
  c.expect(het.decay_monotone, "tail decay monotone");
  const auto cov = heteroclinic_translates(het);
  c.expect(!cov.crossing, "horizontal translates pairwise non-crossing");
  c.expect(cov.max_uncovered < 5e-3, fmt("max uncovered thickness %.2e < 5e-3", cov.max_uncovered));
  return c.ok;
}

bool criterion8(Check& c) {
  const auto pts = barrier_continuity(kLiouville, HomologyClass::curve(1, 0), {0.02, 0.01, 0.005}, barrier_opts(128));
  double lo = 1e300, hi = 0.0;
  for (const auto& p : pts) {
    c.note(fmt("eps = %.3f: deltaW = %.5f, K = %.4f", p.eps, p.deltaW, p.K));
    lo = std::min(lo, p.K);
    hi = std::max(hi, p.K);
  }
  c.expect(std::isfinite(hi) && lo > 0.0 && hi <= 2.0 * lo, fmt("K in [%.4f, %.4f], ratio within 2", lo, hi));
  return c.ok;
}

bool criterion9(Check& c) {
  const std::vector<std::string> docs{
      R"J({"command":"barrier-seq","metric":{"kind":"flat"},"target":"golden","K":4,"N":32,"M":17,"starts":4,"bottleneck":false})J",
      R"J({"command":"width","metric":{"kind":"liouville","f":"2+cos(2*pi*y)"},"class":[1,0],"N":48,"grid":[8,8]})J",
      R"J({"command":"stable-norm","metric":{"kind":"fourier","mean":1.5,"terms":[{"j":1,"k":1,"a":0.1}]},"class":[2,1],"seed":3})J"};
  for (const auto& d : docs) {
    const auto m = manifest_from_json(json::parse(d));
    std::vector<std::string> outs;
    for (const char* threads : {"1", "1", "8", "8"}) {
      setenv("TORUS_MINMAX_THREADS", threads, 1);
      outs.push_back(run(m).results.dump(2) + "\n");
    }
    unsetenv("TORUS_MINMAX_THREADS");
    bool same = true;
    for (const auto& o : outs) same = same && o == outs.front();
    c.expect(same, m.command + fmt(": results.json identical over 2 runs x threads {1, 8} (%.0f bytes)",
                                   static_cast<double>(outs.front().size())));
  }
  return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, bool (*)(Check&)>> criteria{
      {"flat-metric calibration", criterion1},   {"Liouville analytic values", criterion2},
      {"Bangert bump gaps", criterion3},         {"inequality suite", criterion4},
      {"interpolation constant", criterion5},    {"gap mountain pass", criterion6},
      {"heteroclinic diagnostics", criterion7},  {"barrier metric-continuity", criterion8},
      {"determinism", criterion9}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(n)) continue;
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    ok = ok && c.ok;
    failed += !ok;
    std::cout << "criterion " << n << " " << (ok ? "PASS" : "FAIL") << ": " << criteria[i].first
              << fmt(" (%.1f s)", seconds_since(t0)) << "\n"
              << c.log.str() << std::flush;
  }
  return failed == 0 ? 0 : 1;
}
