#pragma once

// Deterministic SVG figures of curves, laminations and sweep-outs.
//
// Viewport: the square [0, 2]^2 (2 x 2 unit cells) drawn at 400 x 400 px
// with y pointing up. Coordinates are printed with "%.3f".
//
// Element order, each layer a <g> that is omitted when empty:
//   grid           background rect, cell lines x = 0, 1, 2 then y = 0, 1, 2
//   gaps           one filled polygon per gap (lower leaf forward, upper leaf back)
//   sweep          one path per slice, stroke opacity ramping 0.150 -> 1.000
//   leaves         black paths, in input order
//   heteroclinics  blue paths
//   mountain-pass  red paths
// Closed curves are unrolled along their rotation until they cross the
// viewport; collinear vertices are dropped, so a straight line is one
// path with two points.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"

namespace torus_minmax {

struct SceneGap {
  Polyline lower, upper;
};

struct Scene {
  std::vector<Polyline> leaves;
  std::vector<SceneGap> gaps;
  std::vector<Polyline> heteroclinics;
  std::vector<Polyline> mountain_pass;
  std::vector<Polyline> sweep;
};

inline Polyline to_polyline(const DiscreteCurve& c) { return {c.vertices, c.rotation}; }
inline Polyline to_polyline(const std::vector<Vec2>& v) { return {v, std::nullopt}; }

inline json to_json(const Polyline& p) {
  if (p.rotation) {
    DiscreteCurve c;
    c.vertices = p.vertices;
    c.rotation = *p.rotation;
    return to_json(c);
  }
  return polyline_json(p.vertices);
}

inline json to_json(const Scene& s) {
  json j;
  auto list = [](const std::vector<Polyline>& v) {
    json a = json::array();
    for (const auto& p : v) a.push_back(to_json(p));
    return a;
  };
  j["leaves"] = list(s.leaves);
  json gaps = json::array();
  for (const auto& g : s.gaps) gaps.push_back({{"lower", to_json(g.lower)}, {"upper", to_json(g.upper)}});
  j["gaps"] = std::move(gaps);
  j["heteroclinics"] = list(s.heteroclinics);
  j["mountain_pass"] = list(s.mountain_pass);
  j["sweep"] = list(s.sweep);
  return j;
}

/// Scene from a render document; a results document is accepted through its "geometry" member.
inline Scene scene_from_json(const json& doc) {
  const json& j = doc.is_object() && doc.contains("geometry") ? doc.at("geometry") : doc;
  if (!j.is_object()) throw UsageError("render input must be a JSON object");
  Scene s;
  auto list = [&](const char* key, std::vector<Polyline>& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_array()) throw UsageError(std::string("render input: '") + key + "' must be an array");
    for (const auto& c : j.at(key)) out.push_back(polyline_from_json(c));
  };
  list("leaves", s.leaves);
  list("heteroclinics", s.heteroclinics);
  list("mountain_pass", s.mountain_pass);
  list("sweep", s.sweep);
  if (j.contains("gaps")) {
    if (!j.at("gaps").is_array()) throw UsageError("render input: 'gaps' must be an array");
    for (const auto& g : j.at("gaps")) {
      // Gap summaries without curves (e.g. inside a lamination record) are skipped.
      if (!g.contains("lower") || !g.contains("upper")) continue;
      s.gaps.push_back({polyline_from_json(g.at("lower")), polyline_from_json(g.at("upper"))});
    }
  }
  return s;
}

namespace detail {

inline constexpr double kSvgSize = 400.0;
inline constexpr double kSvgCells = 2.0;

/// Range of periods k such that vertices + k * rotation cover the viewport along the rotation.
inline std::pair<long long, long long> unroll_range(const std::vector<Vec2>& v, const Vec2i& rot) {
  const Vec2 R = rot.as_real();
  const double rr = dot(R, R);
  double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
  for (const auto& p : v) {
    pmin = std::min(pmin, dot(p, R));
    pmax = std::max(pmax, dot(p, R));
  }
  double smin = std::numeric_limits<double>::infinity(), smax = -smin;
  for (double x : {0.0, kSvgCells})
    for (double y : {0.0, kSvgCells}) {
      smin = std::min(smin, dot(Vec2{x, y}, R));
      smax = std::max(smax, dot(Vec2{x, y}, R));
    }
  return {static_cast<long long>(std::floor((smin - pmax) / rr)), static_cast<long long>(std::ceil((smax - pmin) / rr))};
}

inline std::vector<Vec2> unrolled(const Polyline& p, long long k0, long long k1) {
  if (!p.rotation || p.vertices.empty()) return p.vertices;
  const Vec2 R = p.rotation->as_real();
  std::vector<Vec2> out;
  out.reserve(p.vertices.size() * static_cast<std::size_t>(k1 - k0 + 1) + 1);
  for (long long k = k0; k <= k1; ++k)
    for (const auto& v : p.vertices) out.push_back(v + static_cast<double>(k) * R);
  out.push_back(p.vertices.front() + static_cast<double>(k1 + 1) * R);
  return out;
}

inline std::vector<Vec2> unrolled(const Polyline& p) {
  if (!p.rotation || p.vertices.empty()) return p.vertices;
  const auto [k0, k1] = unroll_range(p.vertices, *p.rotation);
  return unrolled(p, k0, k1);
}

inline std::vector<Vec2> drop_collinear(const std::vector<Vec2>& v) {
  if (v.size() <= 2) return v;
  std::vector<Vec2> out{v.front()};
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const Vec2 a = v[i] - out.back(), b = v[i + 1] - v[i];
    const double cr = a.x * b.y - a.y * b.x;
    const double scale = norm(a) * norm(b);
    if (std::abs(cr) <= 1e-12 * scale && dot(a, b) >= 0.0) continue;
    out.push_back(v[i]);
  }
  out.push_back(v.back());
  return out;
}

inline bool touches_viewport(const std::vector<Vec2>& v) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& p : v) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return x1 >= 0.0 && x0 <= kSvgCells && y1 >= 0.0 && y0 <= kSvgCells;
}

inline void put_coord(std::string& s, double v) {
  if (std::abs(v) < 5e-4) v = 0.0;  // no "-0.000"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  s += buf;
}

inline void put_point(std::string& s, const Vec2& p) {
  const double k = kSvgSize / kSvgCells;
  put_coord(s, k * p.x);
  s += ' ';
  put_coord(s, kSvgSize - k * p.y);
}

inline std::string path_data(const std::vector<Vec2>& v, bool close) {
  std::string d;
  for (std::size_t i = 0; i < v.size(); ++i) {
    d += i == 0 ? "M " : " L ";
    put_point(d, v[i]);
  }
  if (close) d += " Z";
  return d;
}

}  // namespace detail

inline std::string render_svg(const Scene& scene) {
  using namespace detail;
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n";
  out += "<defs><clipPath id=\"cells\"><rect x=\"0\" y=\"0\" width=\"400\" height=\"400\"/></clipPath></defs>\n";
  out += "<g id=\"grid\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"400\" height=\"400\" fill=\"#ffffff\"/>\n";
  for (int i = 0; i <= 2; ++i) {
    const std::string c = std::to_string(200 * i);
    out += "<line x1=\"" + c + "\" y1=\"0\" x2=\"" + c + "\" y2=\"400\"/>\n";
  }
  for (int i = 0; i <= 2; ++i) {
    const std::string c = std::to_string(400 - 200 * i);
    out += "<line x1=\"0\" y1=\"" + c + "\" x2=\"400\" y2=\"" + c + "\"/>\n";
  }
  out += "</g>\n";

  auto open_group = [&](const char* id, const char* style) {
    out += "<g id=\"";
    out += id;
    out += "\" clip-path=\"url(#cells)\" ";
    out += style;
    out += ">\n";
  };

  std::vector<std::string> gap_paths;
  for (const auto& g : scene.gaps) {
    std::vector<Vec2> lo, hi;
    if (g.lower.rotation && g.upper.rotation) {
      auto [a0, a1] = unroll_range(g.lower.vertices, *g.lower.rotation);
      auto [b0, b1] = unroll_range(g.upper.vertices, *g.upper.rotation);
      lo = unrolled(g.lower, std::min(a0, b0), std::max(a1, b1));
      hi = unrolled(g.upper, std::min(a0, b0), std::max(a1, b1));
    } else {
      lo = g.lower.vertices;
      hi = g.upper.vertices;
    }
    std::vector<Vec2> poly = drop_collinear(lo);
    const auto top = drop_collinear(hi);
    poly.insert(poly.end(), top.rbegin(), top.rend());
    if (poly.size() < 3 || !touches_viewport(poly)) continue;
    gap_paths.push_back(path_data(poly, true));
  }
  if (!gap_paths.empty()) {
    open_group("gaps", "fill=\"#d9d9d9\" stroke=\"none\"");
    for (const auto& d : gap_paths) out += "<path d=\"" + d + "\"/>\n";
    out += "</g>\n";
  }

  auto curve_layer = [&](const char* id, const char* style, const std::vector<Polyline>& curves, bool ramp) {
    std::vector<std::string> lines;
    const std::size_t n = curves.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = drop_collinear(unrolled(curves[i]));
      if (v.size() < 2 || !touches_viewport(v)) continue;
      std::string line = "<path d=\"" + path_data(v, false) + "\"";
      if (ramp) {
        const double a = n > 1 ? 0.15 + 0.85 * static_cast<double>(i) / static_cast<double>(n - 1) : 1.0;
        char buf[48];
        std::snprintf(buf, sizeof buf, " stroke-opacity=\"%.3f\"", a);
        line += buf;
      }
      lines.push_back(line + "/>\n");
    }
    if (lines.empty()) return;
    open_group(id, style);
    for (const auto& l : lines) out += l;
    out += "</g>\n";
  };
  curve_layer("sweep", "fill=\"none\" stroke=\"#4d4d4d\" stroke-width=\"1\"", scene.sweep, true);
  curve_layer("leaves", "fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"", scene.leaves, false);
  curve_layer("heteroclinics", "fill=\"none\" stroke=\"#1f4fd1\" stroke-width=\"1.5\"", scene.heteroclinics, false);
  curve_layer("mountain-pass", "fill=\"none\" stroke=\"#d11f1f\" stroke-width=\"2\"", scene.mountain_pass, false);
  out += "</svg>\n";
  return out;
}

}  // namespace torus_minmax
