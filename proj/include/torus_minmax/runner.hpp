#pragma once

// Experiment runner: dispatches a manifest to the module operations and
// assembles the output documents. results.json holds only deterministic
// fields; wall times go to a separate timings document.

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"
#include "lamination.hpp"
#include "svg.hpp"
#include "width.hpp"

namespace torus_minmax {

struct RunOutput {
  json results;                    ///< results.json
  std::optional<std::string> csv;  ///< results.csv when tabular
  std::optional<std::string> svg;  ///< figure.svg when geometric
  json timings;                    ///< timings.json
  std::vector<std::string> warnings;
};

namespace detail {

inline HomologyClass manifest_class(const ExperimentManifest& m) {
  if (!m.cls) throw UsageError(m.command + ": manifest needs a 'class'");
  return *m.cls;
}

inline std::size_t manifest_per_unit(const ExperimentManifest& m) { return m.per_unit.value_or(64); }

inline std::size_t manifest_N(const ExperimentManifest& m, const HomologyClass& r) {
  return m.N.value_or(resolution_for(r, manifest_per_unit(m)));
}

inline WidthOptions width_options(const ExperimentManifest& m, const HomologyClass& r) {
  WidthOptions wo;
  wo.stable.N = manifest_N(m, r);
  wo.stable.seed = m.seed;
  if (m.starts) wo.stable.n_starts = static_cast<int>(*m.starts);
  if (m.M) wo.M = *m.M;
  if (m.grid) {
    wo.grid.nx = (*m.grid)[0];
    wo.grid.ny = (*m.grid)[1];
  }
  wo.bottleneck = m.bottleneck;
  return wo;
}

inline LaminationOptions lamination_options(const ExperimentManifest& m, const HomologyClass& r) {
  LaminationOptions lo;
  lo.stable.N = manifest_N(m, r);
  lo.stable.seed = m.seed;
  if (m.starts) lo.stable.n_starts = static_cast<int>(*m.starts);
  return lo;
}

/// Class sequence of a manifest: explicit list, else convergents of the target.
inline std::pair<std::vector<HomologyClass>, std::optional<HomologyClass>> manifest_sequence(
    const ExperimentManifest& m, bool& exhausted) {
  exhausted = false;
  if (!m.classes.empty()) return {m.classes, m.limit};
  if (!m.target) throw UsageError(m.command + ": manifest needs 'classes' or 'target'");
  const std::size_t K = m.K.value_or(5);
  if (K < 2) throw UsageError(m.command + ": K must be >= 2");
  const ConvergentSequence cs = convergents(*m.target, K);
  exhausted = cs.exhausted;
  std::optional<HomologyClass> limit = m.limit;
  if (!limit && !m.target->infinite() && cs.exhausted) limit = cs.classes.back();
  return {cs.classes, limit};
}

inline std::vector<Polyline> original_polylines(const std::vector<DiscreteCurve>& cs, const Mat2i& Uinv) {
  std::vector<Polyline> out;
  for (const auto& c : cs) out.push_back(to_polyline(map_curve(c, Uinv)));
  return out;
}

inline Polyline original_open(const std::vector<Vec2>& v, const Mat2i& Uinv) {
  Polyline p;
  const double a = static_cast<double>(Uinv.m00), b = static_cast<double>(Uinv.m01);
  const double c = static_cast<double>(Uinv.m10), d = static_cast<double>(Uinv.m11);
  for (const auto& q : v) p.vertices.push_back({a * q.x + b * q.y, c * q.x + d * q.y});
  return p;
}

/// Gaps that are distinct modulo translation: lower leaf in the base translate.
inline std::vector<std::size_t> base_gaps(const Lamination& lam) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < lam.gaps.size(); ++i)
    if (lam.translation[lam.gaps[i].lower_index] == 0) out.push_back(i);
  return out;
}

inline Scene lamination_scene(const Lamination& lam) {
  const Mat2i Uinv = lam.reduction.U.inverse_unimodular();
  Scene s;
  s.leaves = original_polylines(lam.leaves, Uinv);
  for (std::size_t i : base_gaps(lam))
    s.gaps.push_back({to_polyline(map_curve(lam.gaps[i].lower, Uinv)), to_polyline(map_curve(lam.gaps[i].upper, Uinv))});
  return s;
}

/// The first gap of the base translate, for the gap operations.
inline const Gap& first_gap(const Lamination& lam) {
  const auto idx = base_gaps(lam);
  if (idx.empty()) throw Error("no_gap", "class " + lam.r.str() + " has no gap above tolerance");
  return lam.gaps[idx.front()];
}

inline json sequence_timings(const BarrierSequence& s) {
  json recs = json::array();
  for (const auto& r : s.records) recs.push_back({{"class", to_json(r.r)}, {"wall_time_ms", r.wall_time_ms}});
  return recs;
}

inline std::string sequence_csv(const BarrierSequence& s) {
  std::string csv = barrier_csv_header();
  for (const auto& r : s.records) csv += barrier_csv_row(r);
  return csv;
}

}  // namespace detail

inline RunOutput run(const ExperimentManifest& m) {
  using namespace detail;
  validate(m);
  const auto t0 = std::chrono::steady_clock::now();
  RunOutput out;
  json result;
  std::optional<Scene> scene;
  json timing_records = json::array();

  if (m.command == "render") {
    const json& doc = m.render_input;
    if (doc.is_null()) throw UsageError("render: manifest needs an 'input' document");
    scene = scene_from_json(doc);
    result = {{"leaves", scene->leaves.size()},
              {"gaps", scene->gaps.size()},
              {"heteroclinics", scene->heteroclinics.size()},
              {"mountain_pass", scene->mountain_pass.size()},
              {"sweep", scene->sweep.size()}};
  } else {
    const PeriodicMetric g = make_metric(m.metric);
    if (m.command == "stable-norm") {
      const HomologyClass r = manifest_class(m);
      StableNormOptions so;
      so.N = manifest_N(m, r);
      so.seed = m.seed;
      if (m.starts) so.n_starts = static_cast<int>(*m.starts);
      const StableNormResult sn = stable_norm(g, r, so);
      result = {{"class", to_json(r)},
                {"S", sn.S},
                {"S_primitive", sn.S_primitive},
                {"dp_length", sn.dp_length},
                {"N", so.N},
                {"starts", so.n_starts},
                {"converged_starts", sn.converged_starts},
                {"minimizer_count", sn.minimizers.size()}};
      scene = Scene{};
      for (const auto& c : sn.minimizers) scene->leaves.push_back(to_polyline(c));
    } else if (m.command == "width") {
      const HomologyClass r = manifest_class(m);
      BarrierOptions bo;
      bo.width = width_options(m, r);
      bo.seed = m.seed;
      WidthResult w;
      const BarrierRecord rec = barrier(g, r, bo, &w);
      result = {{"record", to_json(rec)}, {"start_maxima", w.start_maxima}, {"saddle_refined", w.saddle.has_value()},
                {"saddle_grad_sup", w.saddle_grad_sup}};
      if (w.grid)
        result["grid"] = {{"omega_grid", w.grid->omega_grid},
                          {"S_grid", w.grid->S_grid},
                          {"s_max_used", w.grid->s_max_used},
                          {"state_count", w.grid->state_count}};
      out.csv = std::string(barrier_csv_header()) + barrier_csv_row(rec);
      timing_records.push_back({{"class", to_json(r)}, {"wall_time_ms", rec.wall_time_ms}});
      const Mat2i Uinv = w.reduction.U.inverse_unimodular();
      scene = Scene{};
      scene->leaves = original_polylines(w.stable.reduced, Uinv);
      scene->sweep = original_polylines(w.sweep.slices, Uinv);
      scene->mountain_pass.push_back(
          to_polyline(map_curve(w.saddle ? *w.saddle : w.sweep.slices[w.sweep.argmax()], Uinv)));
    } else if (m.command == "barrier-seq") {
      bool exhausted = false;
      const auto [classes, limit] = manifest_sequence(m, exhausted);
      BarrierOptions bo;
      bo.width = width_options(m, classes.front());
      bo.seed = m.seed;
      BarrierSequence seq = barrier_sequence_of(g, classes, bo, m.N.value_or(manifest_per_unit(m)));
      seq.exhausted = exhausted;
      result = to_json(seq);
      out.csv = sequence_csv(seq);
      timing_records = sequence_timings(seq);
    } else if (m.command == "lamination") {
      const HomologyClass r = manifest_class(m);
      const Lamination lam = build_lamination(g, r, lamination_options(m, r));
      result = to_json(lam, false);
      result["base_gaps"] = base_gaps(lam);
      scene = lamination_scene(lam);
    } else if (m.command == "heteroclinic" || m.command == "gap-minmax") {
      const HomologyClass r = m.cls.value_or(HomologyClass::curve(1, 0));
      const Lamination lam = build_lamination(g, r, lamination_options(m, r));
      const Gap& gap = first_gap(lam);
      const PeriodicMetric rg = reduced_metric(g, lam.reduction);
      const Mat2i Uinv = lam.reduction.U.inverse_unimodular();
      scene = Scene{};
      scene->leaves = {to_polyline(map_curve(gap.lower, Uinv)), to_polyline(map_curve(gap.upper, Uinv))};
      scene->gaps.push_back({scene->leaves[0], scene->leaves[1]});
      result = {{"class", to_json(r)}, {"gap", gap_summary(gap)}};
      if (m.command == "heteroclinic") {
        HeteroclinicOptions ho;
        if (m.L) ho.L = *m.L;
        const HeteroclinicResult h = heteroclinic(rg, gap, ho);
        const TranslateCoverage cov = heteroclinic_translates(h);
        result["L"] = ho.L;
        result["objective"] = h.objective;
        result["initial_objective"] = h.initial_objective;
        result["defect_left"] = h.defect_left;
        result["defect_right"] = h.defect_right;
        result["decay_monotone"] = h.decay_monotone;
        result["converged"] = h.converged;
        result["iterations"] = h.report.iterations;
        result["grad_sup"] = h.report.grad_sup;
        result["warning"] = h.warning;
        result["translates"] = {{"max_uncovered", cov.max_uncovered},
                                {"crossing", cov.crossing},
                                {"count", cov.translates}};
        if (!h.warning.empty()) out.warnings.push_back("WARNING: heteroclinic: " + h.warning);
        scene->heteroclinics.push_back(original_open(h.vertices, Uinv));
      } else {
        GapMinmaxOptions go;
        if (m.M) go.M = *m.M;
        const GapMinmaxResult gm = gap_minmax(rg, gap, go);
        result["length"] = gm.length;
        result["lower_length"] = gm.lower_length;
        result["excess"] = gm.excess;
        result["sweep_max"] = gm.sweep_max;
        result["grad_sup"] = gm.grad_sup;
        result["index"] = gm.index.negative_count;
        result["index_detail"] = to_json(gm.index);
        result["interior_minimal"] = gm.interior_minimal;
        result["diagnostic"] = gm.diagnostic;
        scene->sweep = original_polylines(gm.sweep.slices, Uinv);
        scene->mountain_pass.push_back(to_polyline(map_curve(gm.critical, Uinv)));
      }
    } else if (m.command == "foliation-test") {
      bool exhausted = false;
      const auto [classes, limit] = manifest_sequence(m, exhausted);
      FoliationOptions fo;
      fo.barrier.width = width_options(m, classes.front());
      fo.barrier.seed = m.seed;
      fo.per_unit = m.N.value_or(manifest_per_unit(m));
      fo.lamination.stable.seed = m.seed;
      FoliationReport rep = foliation_test(g, classes, limit, fo);
      rep.sequence.exhausted = exhausted;
      json gaps = json::array();
      for (const auto& gp : rep.gaps) gaps.push_back(gap_summary(gp));
      result = {{"verdict", to_string(rep.verdict)},
                {"reason", rep.reason},
                {"warnings", rep.warnings},
                {"gap_class", rep.gap_class ? to_json(*rep.gap_class) : json(nullptr)},
                {"gaps", std::move(gaps)},
                {"sequence", to_json(rep.sequence)}};
      for (const auto& w : rep.warnings) out.warnings.push_back(w);
      if (!rep.sequence.records.empty()) {
        out.csv = sequence_csv(rep.sequence);
        timing_records = sequence_timings(rep.sequence);
      }
    }
  }

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["tool"] = {{"name", "torus-minmax"}, {"version", kToolVersion}};
  doc["input_hash"] = input_hash(m);
  doc["manifest"] = to_json(m);
  doc["command"] = m.command;
  doc["result"] = std::move(result);
  if (scene) {
    doc["geometry"] = to_json(*scene);
    out.svg = render_svg(*scene);
  }
  out.results = std::move(doc);
  const double total = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out.timings = {{"input_hash", input_hash(m)}, {"total_ms", total}, {"records", std::move(timing_records)}};
  return out;
}

/// Exit status for an error code: 2 for invariant violations and solver failures, 1 otherwise.
inline int exit_status(const std::string& code) {
  return code == "invariant_violation" || code == "solver_failure" ? 2 : 1;
}

}  // namespace torus_minmax
