#pragma once

// JSON and CSV persistence: metric configs, classes, curves, barrier
// records, laminations and experiment manifests. Output avoids timestamps
// and timings so identical inputs give byte-identical documents.

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "classes.hpp"
#include "curve.hpp"
#include "lamination.hpp"
#include "rng.hpp"
#include "width.hpp"

namespace torus_minmax {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

#ifdef TORUS_MINMAX_VERSION
inline constexpr const char* kToolVersion = TORUS_MINMAX_VERSION;
#else
inline constexpr const char* kToolVersion = "0.1.0";
#endif

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(where + ": missing field '" + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw UsageError(where + ": " + e.what());
  }
}

inline const char* recipe_name(MetricConfig::Recipe r) {
  switch (r) {
    case MetricConfig::Recipe::Flat: return "flat";
    case MetricConfig::Recipe::Liouville: return "liouville";
    case MetricConfig::Recipe::BangertBump: return "bangert_bump";
    case MetricConfig::Recipe::Fourier: return "fourier";
    case MetricConfig::Recipe::Conformal: return "conformal";
    case MetricConfig::Recipe::Tensor: return "tensor";
  }
  return "?";
}

}  // namespace detail

// ---- metric configs ----

inline json to_json(const MetricConfig& c) {
  json j;
  j["kind"] = detail::recipe_name(c.recipe);
  switch (c.recipe) {
    case MetricConfig::Recipe::Flat: break;
    case MetricConfig::Recipe::Liouville:
    case MetricConfig::Recipe::Conformal: j["f"] = c.f; break;
    case MetricConfig::Recipe::Tensor:
      j["g11"] = c.g11;
      j["g12"] = c.g12;
      j["g22"] = c.g22;
      break;
    case MetricConfig::Recipe::BangertBump:
      j["center"] = {c.center.x, c.center.y};
      j["radius"] = c.radius;
      j["amplitude"] = c.amplitude;
      j["order"] = c.cutoff_order;
      break;
    case MetricConfig::Recipe::Fourier: {
      j["mean"] = c.fourier.mean;
      json terms = json::array();
      for (const auto& t : c.fourier.terms) terms.push_back({{"j", t.j}, {"k", t.k}, {"a", t.a}, {"b", t.b}});
      j["terms"] = std::move(terms);
      break;
    }
  }
  return j;
}

/// {"kind": "liouville", "f": "2+cos(2*pi*y)"}; "recipe" is accepted for "kind".
inline MetricConfig metric_config_from_json(const json& j) {
  const std::string where = "metric";
  const char* key = j.is_object() && !j.contains("kind") && j.contains("recipe") ? "recipe" : "kind";
  const auto name = detail::get_as<std::string>(detail::require(j, key, where), where + "." + key);
  auto str = [&](const char* k) { return detail::get_as<std::string>(detail::require(j, k, where), where + "." + k); };
  if (name == "flat") return MetricConfig::flat();
  if (name == "liouville") return MetricConfig::liouville(str("f"));
  if (name == "conformal") return MetricConfig::conformal(str("f"));
  if (name == "tensor") return MetricConfig::tensor(str("g11"), str("g12"), str("g22"));
  if (name == "bangert_bump") {
    MetricConfig c = MetricConfig::bangert_bump({0.5, 0.5}, 0.1, 10.0);
    if (j.contains("center")) {
      const auto v = detail::get_as<std::vector<double>>(j.at("center"), where + ".center");
      if (v.size() != 2) throw UsageError("metric.center must have two entries");
      c.center = {v[0], v[1]};
    }
    if (j.contains("radius")) c.radius = detail::get_as<double>(j.at("radius"), where + ".radius");
    if (j.contains("amplitude")) c.amplitude = detail::get_as<double>(j.at("amplitude"), where + ".amplitude");
    if (j.contains("order")) c.cutoff_order = detail::get_as<int>(j.at("order"), where + ".order");
    return c;
  }
  if (name == "fourier") {
    FourierSeries s;
    if (j.contains("mean")) s.mean = detail::get_as<double>(j.at("mean"), where + ".mean");
    if (j.contains("terms")) {
      for (const auto& t : j.at("terms")) {
        FourierSeries::Term term;
        term.j = detail::get_as<int>(detail::require(t, "j", where + ".terms"), where + ".terms.j");
        term.k = detail::get_as<int>(detail::require(t, "k", where + ".terms"), where + ".terms.k");
        if (t.contains("a")) term.a = detail::get_as<double>(t.at("a"), where + ".terms.a");
        if (t.contains("b")) term.b = detail::get_as<double>(t.at("b"), where + ".terms.b");
        s.terms.push_back(term);
      }
    }
    return MetricConfig::fourier_factor(std::move(s));
  }
  throw UsageError("unknown metric recipe '" + name + "'");
}

// ---- classes and targets ----

inline json to_json(const HomologyClass& r) { return {{"convention", "curve"}, {"value", {r.a(), r.b()}}}; }

/// {"convention": "curve" | "normal", "value": [a, b]}, or a bare pair in the curve convention.
inline HomologyClass class_from_json(const json& j, const std::string& where = "class") {
  std::string convention = "curve";
  const json* value = &j;
  if (j.is_object()) {
    if (j.contains("convention")) convention = detail::get_as<std::string>(j.at("convention"), where + ".convention");
    value = &detail::require(j, "value", where);
  }
  const auto v = detail::get_as<std::vector<std::int64_t>>(*value, where);
  if (v.size() != 2) throw UsageError(where + " must be [a, b]");
  if (convention == "curve") return HomologyClass::curve(v[0], v[1]);
  if (convention == "normal") return HomologyClass::from_normal(v[0], v[1]);
  throw UsageError(where + ": convention must be 'curve' or 'normal'");
}

inline json to_json(const DirectionTarget& t) { return {{"terms", t.terms}, {"period", t.period}}; }

/// "golden", "sqrt2", {"slope": [p, q]} or {"terms": [...], "period": [...]}.
inline DirectionTarget target_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "golden") return DirectionTarget::golden();
    if (s == "sqrt2") return DirectionTarget::sqrt2();
    throw UsageError("unknown direction target '" + s + "'");
  }
  if (j.is_object() && j.contains("slope")) {
    const auto v = detail::get_as<std::vector<std::int64_t>>(j.at("slope"), "target.slope");
    if (v.size() != 2) throw UsageError("target.slope must be [p, q]");
    return DirectionTarget::rational(v[0], v[1]);
  }
  DirectionTarget t;
  if (j.is_object() && j.contains("terms")) t.terms = detail::get_as<std::vector<std::int64_t>>(j.at("terms"), "target.terms");
  if (j.is_object() && j.contains("period"))
    t.period = detail::get_as<std::vector<std::int64_t>>(j.at("period"), "target.period");
  t.validate();
  return t;
}

// ---- curves ----

/// Closed curves carry their rotation; open polylines have "rotation": null.
inline json to_json(const DiscreteCurve& c) {
  json v = json::array();
  for (const auto& p : c.vertices) v.push_back({p.x, p.y});
  return {{"rotation", {c.rotation.a, c.rotation.b}}, {"vertices", std::move(v)}};
}

inline json polyline_json(const std::vector<Vec2>& pts) {
  json v = json::array();
  for (const auto& p : pts) v.push_back({p.x, p.y});
  return {{"rotation", nullptr}, {"vertices", std::move(v)}};
}

struct Polyline {
  std::vector<Vec2> vertices;
  std::optional<Vec2i> rotation;  ///< set for closed curves
};

inline Polyline polyline_from_json(const json& j) {
  Polyline p;
  for (const auto& v : detail::require(j, "vertices", "curve")) {
    const auto xy = detail::get_as<std::vector<double>>(v, "curve.vertices");
    if (xy.size() != 2) throw UsageError("curve vertex must be [x, y]");
    p.vertices.push_back({xy[0], xy[1]});
  }
  if (j.contains("rotation") && !j.at("rotation").is_null()) {
    const auto r = detail::get_as<std::vector<std::int64_t>>(j.at("rotation"), "curve.rotation");
    if (r.size() != 2) throw UsageError("curve.rotation must be [a, b]");
    p.rotation = Vec2i{r[0], r[1]};
  }
  return p;
}

inline DiscreteCurve curve_from_json(const json& j) {
  const Polyline p = polyline_from_json(j);
  if (!p.rotation) throw UsageError("closed curve needs a rotation");
  DiscreteCurve c;
  c.vertices = p.vertices;
  c.rotation = *p.rotation;
  c.validate();
  return c;
}

// ---- records ----

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

/// Barrier record without its wall time, which goes to the timings sidecar.
inline json to_json(const BarrierRecord& r) {
  return {{"class", to_json(r.r)},
          {"S", r.S},
          {"S_method", r.S_method},
          {"omega_upper", r.omega_upper},
          {"omega_lower", optional_number(r.omega_lower)},
          {"deltaW", r.deltaW},
          {"N", r.N},
          {"M", r.M},
          {"grid", {r.grid_nx, r.grid_ny}},
          {"seed", r.seed},
          {"certificate", r.certificate},
          {"ok", r.ok},
          {"error", r.error}};
}

inline json to_json(const BarrierSequence& s) {
  json recs = json::array(), norm = json::array();
  for (const auto& r : s.records) recs.push_back(to_json(r));
  for (const auto& v : s.normalized) norm.push_back({v.x, v.y});
  return {{"records", std::move(recs)},
          {"normalized", std::move(norm)},
          {"liminf_estimate", s.liminf_estimate},
          {"exhausted", s.exhausted}};
}

inline const char* barrier_csv_header() { return "a,b,S,omega_upper,omega_lower,deltaW,N,M,seed,wall_time_ms\n"; }

inline std::string barrier_csv_row(const BarrierRecord& r) {
  char buf[512];
  char lower[64] = "";
  if (r.omega_lower) std::snprintf(lower, sizeof lower, "%.12g", *r.omega_lower);
  std::snprintf(buf, sizeof buf, "%lld,%lld,%.12g,%.12g,%s,%.12g,%zu,%zu,%llu,%.3f\n", static_cast<long long>(r.r.a()),
                static_cast<long long>(r.r.b()), r.S, r.omega_upper, lower, r.deltaW, r.N, r.M,
                static_cast<unsigned long long>(r.seed), r.wall_time_ms);
  return buf;
}

inline json to_json(const IndexEstimate& e) {
  return {{"negative_count", e.negative_count}, {"smallest", e.smallest}, {"threshold", e.threshold},
          {"lowest", e.lowest}};
}

inline json gap_summary(const Gap& g) {
  return {{"lower_index", g.lower_index}, {"per_period_area", g.per_period_area}, {"max_thickness", g.max_thickness}};
}

/// Lamination summary; leaves and gap curves are in original coordinates when `curves` is set.
inline json to_json(const Lamination& lam, bool curves = true) {
  json j;
  j["class"] = to_json(lam.r);
  j["S"] = lam.S;
  j["gap_tol"] = lam.gap_tol;
  j["leaf_count"] = lam.leaves.size();
  j["translation"] = lam.translation;
  json fol = json::array();
  for (char f : lam.foliated) fol.push_back(f != 0);
  j["foliated"] = std::move(fol);
  json gaps = json::array();
  for (const auto& g : lam.gaps) gaps.push_back(gap_summary(g));
  j["gaps"] = std::move(gaps);
  if (curves) {
    json leaves = json::array();
    for (const auto& c : lam.original_leaves()) leaves.push_back(to_json(c));
    j["leaves"] = std::move(leaves);
  }
  return j;
}

// ---- manifests ----

struct ExperimentManifest {
  std::string command;
  MetricConfig metric;
  std::optional<HomologyClass> cls;
  std::vector<HomologyClass> classes;
  std::optional<DirectionTarget> target;
  std::optional<HomologyClass> limit;
  std::optional<std::size_t> N, M, K, starts, per_unit;
  std::optional<std::array<int, 2>> grid;
  std::optional<double> L;
  std::uint64_t seed = 0;
  bool bottleneck = true;
  std::string out = ".";
  json render_input;  ///< inline render document, if any
};

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds{"stable-norm", "width",          "barrier-seq", "lamination",
                                             "heteroclinic", "gap-minmax",   "foliation-test", "render"};
  return cmds;
}

inline void validate(const ExperimentManifest& m) {
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), m.command) == cmds.end())
    throw Error("unknown_command", "unknown command '" + m.command + "'");
  for (const auto& v : {m.N, m.M, m.K, m.starts, m.per_unit})
    if (v && *v == 0) throw UsageError("resolution overrides must be positive");
  if (m.grid && ((*m.grid)[0] <= 0 || (*m.grid)[1] <= 0)) throw UsageError("grid must be positive");
  if (m.L && !(*m.L > 0.0)) throw UsageError("L must be positive");
}

inline ExperimentManifest manifest_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("manifest must be a JSON object");
  ExperimentManifest m;
  auto size_field = [&](const char* k) -> std::optional<std::size_t> {
    if (!j.contains(k)) return std::nullopt;
    const auto v = detail::get_as<long long>(j.at(k), k);
    if (v <= 0) throw UsageError(std::string(k) + " must be positive");
    return static_cast<std::size_t>(v);
  };
  if (j.contains("command")) m.command = detail::get_as<std::string>(j.at("command"), "command");
  if (j.contains("metric")) m.metric = metric_config_from_json(j.at("metric"));
  if (j.contains("class")) m.cls = class_from_json(j.at("class"));
  if (j.contains("classes"))
    for (const auto& c : j.at("classes")) m.classes.push_back(class_from_json(c, "classes"));
  if (j.contains("target")) m.target = target_from_json(j.at("target"));
  if (j.contains("limit")) m.limit = class_from_json(j.at("limit"), "limit");
  m.N = size_field("N");
  m.M = size_field("M");
  m.K = size_field("K");
  m.starts = size_field("starts");
  m.per_unit = size_field("per_unit");
  if (j.contains("grid")) {
    const auto g = detail::get_as<std::vector<int>>(j.at("grid"), "grid");
    if (g.size() != 2) throw UsageError("grid must be [nx, ny]");
    m.grid = std::array<int, 2>{g[0], g[1]};
  }
  if (j.contains("L")) m.L = detail::get_as<double>(j.at("L"), "L");
  if (j.contains("seed")) m.seed = detail::get_as<std::uint64_t>(j.at("seed"), "seed");
  if (j.contains("bottleneck")) m.bottleneck = detail::get_as<bool>(j.at("bottleneck"), "bottleneck");
  if (j.contains("out")) m.out = detail::get_as<std::string>(j.at("out"), "out");
  if (j.contains("input")) m.render_input = j.at("input");
  return m;
}

/// Normalized echo of a manifest; the output directory is excluded so the
/// same experiment hashes identically wherever it is written.
inline json to_json(const ExperimentManifest& m) {
  json j;
  j["command"] = m.command;
  j["metric"] = to_json(m.metric);
  if (m.cls) j["class"] = to_json(*m.cls);
  if (!m.classes.empty()) {
    json cs = json::array();
    for (const auto& c : m.classes) cs.push_back(to_json(c));
    j["classes"] = std::move(cs);
  }
  if (m.target) j["target"] = to_json(*m.target);
  if (m.limit) j["limit"] = to_json(*m.limit);
  auto put = [&](const char* k, const std::optional<std::size_t>& v) {
    if (v) j[k] = *v;
  };
  put("N", m.N);
  put("M", m.M);
  put("K", m.K);
  put("starts", m.starts);
  put("per_unit", m.per_unit);
  if (m.grid) j["grid"] = {(*m.grid)[0], (*m.grid)[1]};
  if (m.L) j["L"] = *m.L;
  j["seed"] = m.seed;
  j["bottleneck"] = m.bottleneck;
  if (!m.render_input.is_null()) j["input"] = m.render_input;
  return j;
}

inline std::string input_hash(const ExperimentManifest& m) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(m).dump())));
  return buf;
}

}  // namespace torus_minmax
