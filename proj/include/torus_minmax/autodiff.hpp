#pragma once

// Forward-mode number types used to evaluate metric expressions together
// with their derivatives. Dual carries a gradient in (x, y); Jet<K> carries
// gradient and Hessian in K independent variables.

#include <array>
#include <cmath>

namespace torus_minmax {

struct Dual {
  double v = 0.0, dx = 0.0, dy = 0.0;

  Dual() = default;
  constexpr Dual(double c) : v(c) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(double val, double gx, double gy) : v(val), dx(gx), dy(gy) {}

  friend constexpr Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
  friend constexpr Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
  friend constexpr Dual operator-(const Dual& a) { return {-a.v, -a.dx, -a.dy}; }
  friend constexpr Dual operator*(const Dual& a, const Dual& b) {
    return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy};
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const double inv = 1.0 / b.v;
    const double q = a.v * inv;
    return {q, (a.dx - q * b.dx) * inv, (a.dy - q * b.dy) * inv};
  }
};

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

// Applies a scalar function with known first/second derivative.
inline Dual chain(const Dual& a, double f, double f1, double /*f2*/) { return {f, f1 * a.dx, f1 * a.dy}; }
inline double chain(double /*a*/, double f, double /*f1*/, double /*f2*/) { return f; }

template <int K>
struct Jet {
  double v = 0.0;
  std::array<double, K> g{};
  std::array<double, K * K> h{};

  Jet() = default;
  constexpr Jet(double c) : v(c) {}  // NOLINT(google-explicit-constructor)

  static Jet variable(double val, int i) {
    Jet j(val);
    j.g[i] = 1.0;
    return j;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r(a.v + b.v);
    for (int i = 0; i < K; ++i) r.g[i] = a.g[i] + b.g[i];
    for (int i = 0; i < K * K; ++i) r.h[i] = a.h[i] + b.h[i];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    Jet r(a.v - b.v);
    for (int i = 0; i < K; ++i) r.g[i] = a.g[i] - b.g[i];
    for (int i = 0; i < K * K; ++i) r.h[i] = a.h[i] - b.h[i];
    return r;
  }
  friend Jet operator-(const Jet& a) {
    Jet r(-a.v);
    for (int i = 0; i < K; ++i) r.g[i] = -a.g[i];
    for (int i = 0; i < K * K; ++i) r.h[i] = -a.h[i];
    return r;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.v * b.v);
    for (int i = 0; i < K; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j)
        r.h[i * K + j] = a.h[i * K + j] * b.v + a.v * b.h[i * K + j] + a.g[i] * b.g[j] + a.g[j] * b.g[i];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    const double inv = 1.0 / b.v;
    return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
  }
};

template <int K>
inline double value_of(const Jet<K>& x) { return x.v; }

template <int K>
inline Jet<K> chain(const Jet<K>& a, double f, double f1, double f2) {
  Jet<K> r(f);
  for (int i = 0; i < K; ++i) r.g[i] = f1 * a.g[i];
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) r.h[i * K + j] = f1 * a.h[i * K + j] + f2 * a.g[i] * a.g[j];
  return r;
}

template <class T>
inline T ad_sin(const T& a) {
  const double x = value_of(a);
  const double s = std::sin(x);
  return chain(a, s, std::cos(x), -s);
}
template <class T>
inline T ad_cos(const T& a) {
  const double x = value_of(a);
  const double c = std::cos(x);
  return chain(a, c, -std::sin(x), -c);
}
template <class T>
inline T ad_sqrt(const T& a) {
  const double x = value_of(a);
  const double s = std::sqrt(x);
  if (s == 0.0) return chain(a, 0.0, 0.0, 0.0);
  return chain(a, s, 0.5 / s, -0.25 / (s * x));
}
template <class T>
inline T ad_pow(const T& a, double p) {
  const double x = value_of(a);
  if (p == 2.0) return a * a;
  if (p == 1.0) return a;
  if (p == 0.0) return T(1.0);
  const double f = std::pow(x, p);
  if (x == 0.0) return chain(a, f, p == 1.0 ? 1.0 : 0.0, 0.0);
  return chain(a, f, p * f / x, p * (p - 1.0) * f / (x * x));
}

}  // namespace torus_minmax
