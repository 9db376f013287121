#pragma once

// Z^2-periodic Riemannian metrics on the plane.
//
// A metric is a closed-form field (flat, conformal f * g_flat, or a full
// tensor given by three scalar fields) optionally pulled back through a
// unimodular matrix U: (U^* g)(q) = U^T g(U q) U. Every evaluation first
// reduces the point to the unit cell, so periodicity holds bit-for-bit
// whenever p and p + k are both exactly representable.

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "autodiff.hpp"
#include "common.hpp"
#include "expr.hpp"

namespace torus_minmax {

enum class MetricKind { Flat, Conformal, FullTensor };

inline const char* to_string(MetricKind k) {
  switch (k) {
    case MetricKind::Flat: return "flat";
    case MetricKind::Conformal: return "conformal";
    case MetricKind::FullTensor: return "tensor";
  }
  return "?";
}

/// Named metric recipe. Only the fields relevant to `recipe` are read.
struct MetricConfig {
  enum class Recipe { Flat, Liouville, BangertBump, Fourier, Conformal, Tensor };

  Recipe recipe = Recipe::Flat;
  std::string f;                     // Liouville (y only) or Conformal factor
  std::string g11, g12, g22;         // Tensor
  Vec2 center{0.5, 0.5};             // BangertBump
  double radius = 0.1;
  double amplitude = 10.0;           // lambda_b: factor lambda_b^2 inside B(center, radius)
  int cutoff_order = 2;
  FourierSeries fourier;             // Fourier conformal factor

  static MetricConfig flat() { return {}; }
  static MetricConfig liouville(std::string f_of_y) {
    MetricConfig c;
    c.recipe = Recipe::Liouville;
    c.f = std::move(f_of_y);
    return c;
  }
  static MetricConfig conformal(std::string factor) {
    MetricConfig c;
    c.recipe = Recipe::Conformal;
    c.f = std::move(factor);
    return c;
  }
  static MetricConfig tensor(std::string a, std::string b, std::string d) {
    MetricConfig c;
    c.recipe = Recipe::Tensor;
    c.g11 = std::move(a);
    c.g12 = std::move(b);
    c.g22 = std::move(d);
    return c;
  }
  static MetricConfig bangert_bump(Vec2 center, double radius, double amplitude, int order = 2) {
    MetricConfig c;
    c.recipe = Recipe::BangertBump;
    c.center = center;
    c.radius = radius;
    c.amplitude = amplitude;
    c.cutoff_order = order;
    return c;
  }
  static MetricConfig fourier_factor(FourierSeries s) {
    MetricConfig c;
    c.recipe = Recipe::Fourier;
    c.fourier = std::move(s);
    return c;
  }

  /// Conformal factor expression of the bump metric:
  /// (1 - phi) + lambda_b^2 phi with phi = 1 - smoothstep(r, 2r, |p - c|).
  std::string bump_expression() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << "1+(" << amplitude * amplitude << "-1)*(1-smoothstep(" << radius << "," << 2.0 * radius
       << ",sqrt((x-" << center.x << ")^2+(y-" << center.y << ")^2)," << cutoff_order << "))";
    return os.str();
  }
};

/// Certified comparison constants: lambda g_flat <= g <= Lambda g_flat.
struct FlatBounds {
  double lambda = 1.0;
  double Lambda = 1.0;
};

template <class T>
struct Tensor2 {
  T g11, g12, g22;
};

class PeriodicMetric {
 public:
  static constexpr int kBoundsGrid = 256;
  static constexpr double kBoundsWidening = 0.01;

  PeriodicMetric() = default;

  /// Kind as seen by callers: any non-trivial pull-back is a full tensor.
  MetricKind kind() const { return transform_.is_identity() ? base_kind_ : MetricKind::FullTensor; }
  MetricKind base_kind() const { return base_kind_; }
  const MetricConfig& config() const { return config_; }
  const Mat2i& transform() const { return transform_; }
  const FlatBounds& bounds() const { return bounds_; }
  const ScalarField& factor() const { return factor_; }

  /// Metric tensor entries at q (any number type supporting the autodiff ops).
  template <class T>
  Tensor2<T> tensor(const T& qx, const T& qy) const {
    if (transform_.is_identity()) return base_tensor(qx, qy);
    const T rx = qx - T(std::floor(value_of(qx)));
    const T ry = qy - T(std::floor(value_of(qy)));
    const double a = static_cast<double>(transform_.m00), b = static_cast<double>(transform_.m01);
    const double c = static_cast<double>(transform_.m10), d = static_cast<double>(transform_.m11);
    const T px = T(a) * rx + T(b) * ry;
    const T py = T(c) * rx + T(d) * ry;
    const Tensor2<T> g = base_tensor(px, py);
    return {T(a * a) * g.g11 + T(2.0 * a * c) * g.g12 + T(c * c) * g.g22,
            T(a * b) * g.g11 + T(a * d + b * c) * g.g12 + T(c * d) * g.g22,
            T(b * b) * g.g11 + T(2.0 * b * d) * g.g12 + T(d * d) * g.g22};
  }

  Mat2 at(const Vec2& p) const {
    const Tensor2<double> g = tensor<double>(p.x, p.y);
    return {g.g11, g.g12, g.g12, g.g22};
  }

  /// The metric q -> U^T g(U q) U. U must be unimodular.
  PeriodicMetric pulled_back(const Mat2i& U) const {
    if (U.det() != 1) throw UsageError("pull_back_metric: det U must be 1");
    PeriodicMetric m = *this;
    m.transform_ = transform_ * U;
    m.bounds_ = m.sample_bounds();
    return m;
  }

  static PeriodicMetric make(const MetricConfig& cfg);

 private:
  template <class T>
  Tensor2<T> base_tensor(const T& x, const T& y) const {
    switch (base_kind_) {
      case MetricKind::Flat:
        return {T(1.0), T(0.0), T(1.0)};
      case MetricKind::Conformal: {
        const T rx = x - T(std::floor(value_of(x)));
        const T ry = y - T(std::floor(value_of(y)));
        const T f = factor_.eval<T>(rx, ry);
        return {f, T(0.0), f};
      }
      case MetricKind::FullTensor: {
        const T rx = x - T(std::floor(value_of(x)));
        const T ry = y - T(std::floor(value_of(y)));
        return {g11_.eval<T>(rx, ry), g12_.eval<T>(rx, ry), g22_.eval<T>(rx, ry)};
      }
    }
    return {T(1.0), T(0.0), T(1.0)};
  }

  FlatBounds sample_bounds() const {
    if (kind() == MetricKind::Flat) return {1.0, 1.0};
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int i = 0; i < kBoundsGrid; ++i) {
      for (int j = 0; j < kBoundsGrid; ++j) {
        const auto [e0, e1] = sym_eigenvalues(at({static_cast<double>(i) / kBoundsGrid,
                                                  static_cast<double>(j) / kBoundsGrid}));
        lo = std::min(lo, e0);
        hi = std::max(hi, e1);
      }
    }
    return {lo * (1.0 - kBoundsWidening), hi * (1.0 + kBoundsWidening)};
  }

  /// First grid point where the base field is not positive definite.
  std::optional<Vec2> first_non_positive() const {
    for (int i = 0; i < kBoundsGrid; ++i) {
      for (int j = 0; j < kBoundsGrid; ++j) {
        const Vec2 p{static_cast<double>(i) / kBoundsGrid, static_cast<double>(j) / kBoundsGrid};
        const Tensor2<double> g = base_tensor<double>(p.x, p.y);
        if (!(g.g11 > 0.0) || !(g.g11 * g.g22 - g.g12 * g.g12 > 0.0)) return p;
      }
    }
    return std::nullopt;
  }

  MetricConfig config_;
  MetricKind base_kind_ = MetricKind::Flat;
  ScalarField factor_;
  ScalarField g11_, g12_, g22_;
  Mat2i transform_;
  FlatBounds bounds_;
};

inline PeriodicMetric PeriodicMetric::make(const MetricConfig& cfg) {
  using R = MetricConfig::Recipe;
  PeriodicMetric m;
  m.config_ = cfg;
  switch (cfg.recipe) {
    case R::Flat:
      m.base_kind_ = MetricKind::Flat;
      break;
    case R::Liouville:
      m.base_kind_ = MetricKind::Conformal;
      m.factor_ = ScalarField::parse(cfg.f);
      if (m.factor_.uses_x()) throw Error("config", "liouville factor must depend on y only");
      break;
    case R::Conformal:
      m.base_kind_ = MetricKind::Conformal;
      m.factor_ = ScalarField::parse(cfg.f);
      break;
    case R::Fourier:
      m.base_kind_ = MetricKind::Conformal;
      m.factor_ = ScalarField(cfg.fourier);
      break;
    case R::Tensor:
      m.base_kind_ = MetricKind::FullTensor;
      m.g11_ = ScalarField::parse(cfg.g11);
      m.g12_ = ScalarField::parse(cfg.g12);
      m.g22_ = ScalarField::parse(cfg.g22);
      break;
    case R::BangertBump: {
      if (!(cfg.radius > 0.0)) throw Error("config", "bump radius must be positive");
      if (!(cfg.amplitude >= 1.0)) throw Error("config", "bump amplitude must be >= 1");
      if (cfg.cutoff_order < 1 || cfg.cutoff_order > 3) throw Error("config", "cutoff order must be 1, 2 or 3");
      const double r2 = 2.0 * cfg.radius;
      if (cfg.center.x - r2 < 0.0 || cfg.center.x + r2 > 1.0 || cfg.center.y - r2 < 0.0 ||
          cfg.center.y + r2 > 1.0)
        throw Error("config", "bump disk B(center, 2r) does not fit inside the unit cell");
      m.base_kind_ = MetricKind::Conformal;
      m.factor_ = ScalarField::parse(cfg.bump_expression());
      break;
    }
  }
  if (auto bad = m.first_non_positive()) {
    std::ostringstream os;
    os << "metric is not positive definite at (" << bad->x << ", " << bad->y << ")";
    throw Error("config", os.str());
  }
  m.bounds_ = m.sample_bounds();
  return m;
}

inline PeriodicMetric make_metric(const MetricConfig& cfg) { return PeriodicMetric::make(cfg); }
inline Mat2 metric_at(const PeriodicMetric& g, const Vec2& p) { return g.at(p); }
inline FlatBounds metric_bounds(const PeriodicMetric& g) { return g.bounds(); }

/// Gauss-Legendre nodes on [0, 1] for 1, 2 or 4 points.
struct GaussRule {
  std::array<double, 4> t{};
  std::array<double, 4> w{};
  int n = 0;

  static GaussRule of_order(int order) {
    GaussRule r;
    switch (order) {
      case 1:
        r.n = 1;
        r.t[0] = 0.5;
        r.w[0] = 1.0;
        break;
      case 2: {
        const double d = 0.5 / std::sqrt(3.0);
        r.n = 2;
        r.t = {0.5 - d, 0.5 + d, 0, 0};
        r.w = {0.5, 0.5, 0, 0};
        break;
      }
      case 4: {
        const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
        const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
        r.n = 4;
        r.t = {0.5 - 0.5 * b, 0.5 - 0.5 * a, 0.5 + 0.5 * a, 0.5 + 0.5 * b};
        r.w = {0.5 * wb, 0.5 * wa, 0.5 * wa, 0.5 * wb};
        break;
      }
      default:
        throw UsageError("quadrature order must be 1, 2 or 4");
    }
    return r;
  }
};

/// Composite quadrature: `order`-point Gauss-Legendre on each of 4 subintervals.
struct Quadrature {
  static constexpr int kSubintervals = 4;
  std::array<double, 16> t{};
  std::array<double, 16> w{};
  int n = 0;

  explicit Quadrature(int order = 2) {
    const GaussRule r = GaussRule::of_order(order);
    for (int s = 0; s < kSubintervals; ++s)
      for (int i = 0; i < r.n; ++i) {
        t[n] = (s + r.t[i]) / kSubintervals;
        w[n] = r.w[i] / kSubintervals;
        ++n;
      }
  }
};

/// Riemannian length of the straight segment a -> b.
inline double segment_length(const PeriodicMetric& g, const Vec2& a, const Vec2& b, int order = 2) {
  const Vec2 v = b - a;
  if (v.x == 0.0 && v.y == 0.0) return 0.0;
  if (g.kind() == MetricKind::Flat) return norm(v);
  const Quadrature q(order);
  double sum = 0.0;
  for (int i = 0; i < q.n; ++i) {
    const Vec2 p = a + q.t[i] * v;
    const Tensor2<double> G = g.tensor<double>(p.x, p.y);
    sum += q.w[i] * std::sqrt(G.g11 * v.x * v.x + 2.0 * G.g12 * v.x * v.y + G.g22 * v.y * v.y);
  }
  return sum;
}

/// Segment length and its gradient with respect to both endpoints.
inline double segment_length_grad(const PeriodicMetric& g, const Vec2& a, const Vec2& b, const Quadrature& q,
                                  Vec2& da, Vec2& db) {
  const Vec2 v = b - a;
  da = {};
  db = {};
  if (v.x == 0.0 && v.y == 0.0) return 0.0;
  if (g.kind() == MetricKind::Flat) {
    const double L = norm(v);
    db = v * (1.0 / L);
    da = -db;
    return L;
  }
  double sum = 0.0;
  for (int i = 0; i < q.n; ++i) {
    const double t = q.t[i];
    const Vec2 p = a + t * v;
    const Tensor2<Dual> G = g.tensor<Dual>(Dual(p.x, 1.0, 0.0), Dual(p.y, 0.0, 1.0));
    const Vec2 Gv{G.g11.v * v.x + G.g12.v * v.y, G.g12.v * v.x + G.g22.v * v.y};
    const double Q = v.x * Gv.x + v.y * Gv.y;
    if (!(Q > 0.0)) continue;
    const double phi = std::sqrt(Q);
    const double inv = 1.0 / phi;
    // d phi / d p_k = v^T (d_k G) v / (2 phi)
    const double qx = G.g11.dx * v.x * v.x + 2.0 * G.g12.dx * v.x * v.y + G.g22.dx * v.y * v.y;
    const double qy = G.g11.dy * v.x * v.x + 2.0 * G.g12.dy * v.x * v.y + G.g22.dy * v.y * v.y;
    const Vec2 dp{0.5 * qx * inv, 0.5 * qy * inv};
    const Vec2 dv = Gv * inv;
    const double w = q.w[i];
    sum += w * phi;
    da += w * ((1.0 - t) * dp - dv);
    db += w * (t * dp + dv);
  }
  return sum;
}

/// Segment length with exact gradient and Hessian in (a.x, a.y, b.x, b.y).
/// The metric is differentiated in the point only (Jet<2>) and lifted through
/// the linear map (a, b) -> a + t (b - a).
inline Jet<4> segment_length_jet(const PeriodicMetric& g, const Vec2& a, const Vec2& b, const Quadrature& q) {
  using J = Jet<4>;
  using J2 = Jet<2>;
  const J vx = J::variable(b.x, 2) - J::variable(a.x, 0);
  const J vy = J::variable(b.y, 3) - J::variable(a.y, 1);
  const Vec2 v = b - a;
  J sum(0.0);
  for (int i = 0; i < q.n; ++i) {
    const double t = q.t[i];
    const Vec2 p = a + t * v;
    const Tensor2<J2> G2 = g.tensor<J2>(J2::variable(p.x, 0), J2::variable(p.y, 1));
    // d p / d z: x-variables (0, 2) weigh (1 - t, t); y-variables (1, 3) likewise.
    const std::array<double, 4> w{1.0 - t, 1.0 - t, t, t};
    const std::array<int, 4> axis{0, 1, 0, 1};
    auto lift = [&](const J2& f) {
      J r(f.v);
      for (int k = 0; k < 4; ++k) r.g[k] = w[k] * f.g[axis[k]];
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) r.h[k * 4 + l] = w[k] * w[l] * f.h[axis[k] * 2 + axis[l]];
      return r;
    };
    const J g11 = lift(G2.g11), g12 = lift(G2.g12), g22 = lift(G2.g22);
    const J Q = g11 * vx * vx + J(2.0) * g12 * vx * vy + g22 * vy * vy;
    sum = sum + J(q.w[i]) * ad_sqrt(Q);
  }
  return sum;
}

}  // namespace torus_minmax
