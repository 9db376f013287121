#pragma once

// Integer homology classes of the 2-torus, unimodular reduction to (1, 0)
// and continued-fraction approximants of a target slope.
//
// Convention: a class stores the rotation vector of a closed curve
// ("curve" convention). Its normal direction is the +90 degree rotation
// (-b, a). APIs that take a normal say so explicitly.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "metric.hpp"

namespace torus_minmax {

class HomologyClass {
 public:
  static HomologyClass curve(std::int64_t a, std::int64_t b) { return HomologyClass({a, b}); }
  /// Class whose normal direction is (nx, ny), i.e. curve class (ny, -nx).
  static HomologyClass from_normal(std::int64_t nx, std::int64_t ny) { return HomologyClass({ny, -nx}); }

  const Vec2i& curve_class() const { return v_; }
  Vec2i normal_direction() const { return {-v_.b, v_.a}; }
  std::int64_t a() const { return v_.a; }
  std::int64_t b() const { return v_.b; }
  std::int64_t gcd() const { return std::gcd(std::llabs(v_.a), std::llabs(v_.b)); }
  bool primitive() const { return gcd() == 1; }
  double euclidean_norm() const { return std::hypot(static_cast<double>(v_.a), static_cast<double>(v_.b)); }
  std::string str() const { return "(" + std::to_string(v_.a) + "," + std::to_string(v_.b) + ")"; }

  friend bool operator==(const HomologyClass&, const HomologyClass&) = default;
  friend HomologyClass operator+(const HomologyClass& x, const HomologyClass& y) {
    return HomologyClass(x.v_ + y.v_);
  }
  friend HomologyClass operator*(std::int64_t k, const HomologyClass& x) { return HomologyClass(k * x.v_); }

 private:
  explicit HomologyClass(Vec2i v) : v_(v) {
    if (v.a == 0 && v.b == 0) throw UsageError("homology class must be nonzero");
  }
  Vec2i v_;
};

struct ClassReduction {
  HomologyClass primitive;
  std::int64_t multiplicity = 1;
  Mat2i U;  ///< unimodular, U * primitive = (1, 0)
};

/// Factors r = multiplicity * primitive and finds U in SL(2, Z) with
/// U * primitive = (1, 0). Among all such U (a one-parameter family) the one
/// with the smallest |entries| is chosen, ties broken lexicographically.
inline ClassReduction reduce_class(const HomologyClass& r) {
  const std::int64_t g = r.gcd();
  const std::int64_t p = r.a() / g, q = r.b() / g;
  // Extended Euclid: s p + t q = 1.
  std::int64_t old_r = p, cur_r = q, old_s = 1, cur_s = 0, old_t = 0, cur_t = 1;
  while (cur_r != 0) {
    const std::int64_t quo = old_r / cur_r;
    std::int64_t tmp = old_r - quo * cur_r; old_r = cur_r; cur_r = tmp;
    tmp = old_s - quo * cur_s; old_s = cur_s; cur_s = tmp;
    tmp = old_t - quo * cur_t; old_t = cur_t; cur_t = tmp;
  }
  if (old_r < 0) { old_r = -old_r; old_s = -old_s; old_t = -old_t; }
  const std::int64_t s0 = old_s, t0 = old_t;
  // Family: (s0 + k q, t0 - k p). The cost |s| + |t| is convex in k.
  auto cost = [&](std::int64_t k) { return std::llabs(s0 + k * q) + std::llabs(t0 - k * p); };
  std::vector<std::int64_t> cand{0};
  auto add_near = [&](double c) {
    if (!std::isfinite(c)) return;
    const auto f = static_cast<std::int64_t>(std::floor(c));
    for (std::int64_t d = -1; d <= 2; ++d) cand.push_back(f + d);
  };
  if (q != 0) add_near(-static_cast<double>(s0) / static_cast<double>(q));
  if (p != 0) add_near(static_cast<double>(t0) / static_cast<double>(p));
  std::int64_t best = cand.front();
  for (auto k : cand) {
    const auto ck = cost(k), cb = cost(best);
    const std::int64_t sk = s0 + k * q, tk = t0 - k * p, sb = s0 + best * q, tb = t0 - best * p;
    if (ck < cb || (ck == cb && (sk < sb || (sk == sb && tk < tb)))) best = k;
  }
  const std::int64_t s = s0 + best * q, t = t0 - best * p;
  return {HomologyClass::curve(p, q), g, Mat2i{s, t, -q, p}};
}

/// Target slope given exactly as a continued fraction [a0; a1, a2, ...]:
/// a finite prefix optionally followed by a repeating period.
struct DirectionTarget {
  std::vector<std::int64_t> terms;
  std::vector<std::int64_t> period;

  static DirectionTarget golden() { return {{1}, {1}}; }
  static DirectionTarget sqrt2() { return {{1}, {2}}; }
  static DirectionTarget rational(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < 0) throw UsageError("rational slope must be p/q with p >= 0, q > 0");
    DirectionTarget t;
    while (den != 0) {
      t.terms.push_back(num / den);
      const std::int64_t r = num % den;
      num = den;
      den = r;
    }
    return t;
  }

  bool infinite() const { return !period.empty(); }
  std::optional<std::int64_t> term(std::size_t i) const {
    if (i < terms.size()) return terms[i];
    if (period.empty()) return std::nullopt;
    return period[(i - terms.size()) % period.size()];
  }
  void validate() const {
    if (terms.empty() && period.empty()) throw UsageError("empty continued fraction");
    for (std::size_t i = 0; i < terms.size() + period.size(); ++i) {
      const std::int64_t v = i < terms.size() ? terms[i] : period[i - terms.size()];
      if (i == 0 ? v < 0 : v <= 0) throw UsageError("continued fraction terms must be positive (a0 >= 0)");
    }
  }
  /// Value of the slope; for periodic tails the expansion is truncated deep enough for double precision.
  double value() const {
    const std::size_t n = infinite() ? terms.size() + 64 : terms.size();
    double x = static_cast<double>(*term(n - 1));
    for (std::size_t i = n - 1; i-- > 0;) x = static_cast<double>(*term(i)) + 1.0 / x;
    return x;
  }
};

struct ConvergentSequence {
  std::vector<HomologyClass> classes;  ///< curve classes (q_k, p_k)
  bool exhausted = false;              ///< a finite expansion ran out before K terms
};

/// First K convergents p_k / q_k of the target slope, as curve classes (q_k, p_k).
inline ConvergentSequence convergents(const DirectionTarget& target, std::size_t K) {
  target.validate();
  if (K == 0) throw UsageError("convergents: K must be >= 1");
  ConvergentSequence out;
  std::int64_t p2 = 0, q2 = 1, p1 = 1, q1 = 0;
  for (std::size_t i = 0; i < K; ++i) {
    const auto a = target.term(i);
    if (!a) {
      out.exhausted = true;
      break;
    }
    const std::int64_t p = *a * p1 + p2, q = *a * q1 + q2;
    if (std::abs(p) > (std::int64_t{1} << 40) || q > (std::int64_t{1} << 40))
      throw UsageError("convergent overflow");
    out.classes.push_back(HomologyClass::curve(q, p));
    p2 = p1; q2 = q1; p1 = p; q1 = q;
  }
  return out;
}

/// q -> U^T g(U q) U. Curves satisfy length_g(U c) = length_{U^* g}(c).
inline PeriodicMetric pull_back_metric(const PeriodicMetric& g, const Mat2i& U) { return g.pulled_back(U); }

/// Metric in reduced coordinates for `red`: a reduced (1, 0)-curve c maps to
/// the original curve U^{-1} c of class `red.primitive`.
inline PeriodicMetric reduced_metric(const PeriodicMetric& g, const ClassReduction& red) {
  return g.pulled_back(red.U.inverse_unimodular());
}

}  // namespace torus_minmax
