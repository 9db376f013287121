#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace torus_minmax {

inline constexpr double kPi = 3.14159265358979323846;

/// Error carrying a short machine-readable code ("usage", "parse",
/// "invariant_violation", "solver_failure", ...). The CLI maps codes to
/// exit statuses.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& w) : Error("usage", w) {}
};
struct InvariantViolation : Error {
  explicit InvariantViolation(const std::string& w) : Error("invariant_violation", w) {}
};
struct SolverFailure : Error {
  explicit SolverFailure(const std::string& w) : Error("solver_failure", w) {}
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

inline constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

struct Vec2i {
  std::int64_t a = 0;
  std::int64_t b = 0;

  friend constexpr bool operator==(const Vec2i&, const Vec2i&) = default;
  friend constexpr auto operator<=>(const Vec2i&, const Vec2i&) = default;
  friend constexpr Vec2i operator+(const Vec2i& u, const Vec2i& v) { return {u.a + v.a, u.b + v.b}; }
  friend constexpr Vec2i operator-(const Vec2i& u, const Vec2i& v) { return {u.a - v.a, u.b - v.b}; }
  friend constexpr Vec2i operator*(std::int64_t s, const Vec2i& v) { return {s * v.a, s * v.b}; }
  constexpr Vec2 as_real() const { return {static_cast<double>(a), static_cast<double>(b)}; }
};

/// Symmetric or general 2x2 real matrix, row-major.
struct Mat2 {
  double m00 = 1.0, m01 = 0.0, m10 = 0.0, m11 = 1.0;

  static constexpr Mat2 identity() { return {}; }
  static constexpr Mat2 diag(double a, double b) { return {a, 0.0, 0.0, b}; }
  constexpr Vec2 operator*(const Vec2& v) const { return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y}; }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

inline double quad_form(const Mat2& g, const Vec2& v) {
  return g.m00 * v.x * v.x + (g.m01 + g.m10) * v.x * v.y + g.m11 * v.y * v.y;
}

/// Eigenvalues (min, max) of a symmetric 2x2 matrix.
inline std::pair<double, double> sym_eigenvalues(const Mat2& g) {
  const double tr = 0.5 * (g.m00 + g.m11);
  const double d = 0.5 * (g.m00 - g.m11);
  const double r = std::hypot(d, 0.5 * (g.m01 + g.m10));
  return {tr - r, tr + r};
}

/// Integer 2x2 matrix acting on column vectors.
struct Mat2i {
  std::int64_t m00 = 1, m01 = 0, m10 = 0, m11 = 1;

  static constexpr Mat2i identity() { return {}; }
  constexpr std::int64_t det() const { return m00 * m11 - m01 * m10; }
  constexpr Vec2i operator*(const Vec2i& v) const { return {m00 * v.a + m01 * v.b, m10 * v.a + m11 * v.b}; }
  constexpr Vec2 operator*(const Vec2& v) const {
    return {static_cast<double>(m00) * v.x + static_cast<double>(m01) * v.y,
            static_cast<double>(m10) * v.x + static_cast<double>(m11) * v.y};
  }
  constexpr Mat2i operator*(const Mat2i& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }
  /// Inverse of a unimodular matrix.
  constexpr Mat2i inverse_unimodular() const {
    const std::int64_t d = det();
    return {d * m11, -d * m01, -d * m10, d * m00};
  }
  constexpr bool is_identity() const { return m00 == 1 && m01 == 0 && m10 == 0 && m11 == 1; }
  friend constexpr bool operator==(const Mat2i&, const Mat2i&) = default;
};

/// Fractional part in [0, 1). Exact for doubles: x - floor(x) is representable.
inline double frac(double x) {
  const double r = x - std::floor(x);
  return r < 1.0 ? r : 0.0;
}

}  // namespace torus_minmax
