// torus-minmax: command-line experiment runner.
//
//   torus-minmax <command> --config path.json [--out dir] [--seed n] [--N n]
//                [--M n] [--grid nx,ny] [--K k] [--L l] [--starts n]
//
// Writes results.json, timings.json and, when applicable, results.csv and
// figure.svg into the output directory. Errors print one JSON line on
// stderr; exit status 1 for usage errors, 2 for invariant violations and
// solver failures.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "torus_minmax/runner.hpp"

namespace fs = std::filesystem;
using namespace torus_minmax;

namespace {

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw UsageError("cannot write " + p.string());
  f << content;
  if (!f) throw UsageError("write failed for " + p.string());
}

int fail(const std::string& code, const std::string& message) {
  std::cerr << json({{"error", code}, {"message", message}}).dump() << "\n";
  return exit_status(code);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Min-max widths, energy barriers and laminations on the 2-torus", "torus-minmax"};
  app.set_version_flag("--version", std::string(kToolVersion));
  std::string command, config, out_dir, grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> N, M, K, starts;
  std::optional<double> L;
  app.add_option("command", command, "stable-norm | width | barrier-seq | lamination | heteroclinic | gap-minmax | "
                                     "foliation-test | render")
      ->required();
  app.add_option("--config", config, "manifest JSON (for render: the document to draw)")->required();
  app.add_option("--out", out_dir, "output directory (default: manifest 'out' or .)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--N", N, "vertices per curve; for class sequences, vertices per unit of |r|");
  app.add_option("--M", M, "slices per sweep-out");
  app.add_option("--grid", grid, "bottleneck grid nx,ny");
  app.add_option("--K", K, "number of convergents");
  app.add_option("--L", L, "heteroclinic strip half-length in periods");
  app.add_option("--starts", starts, "stable norm starts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
      throw Error("unknown_command", "unknown command '" + command + "'");
    std::ifstream in(config, std::ios::binary);
    if (!in) throw UsageError("cannot read config " + config);
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
      doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw Error("parse", std::string(config) + ": " + e.what());
    }

    ExperimentManifest m;
    if (command == "render" && !(doc.is_object() && doc.contains("input"))) {
      // A bare curves, lamination or sweep-out document.
      m.render_input = doc;
      if (doc.is_object() && doc.contains("manifest") && doc["manifest"].contains("seed"))
        m.seed = doc["manifest"]["seed"].get<std::uint64_t>();
    } else {
      m = manifest_from_json(doc);
    }
    if (!m.command.empty() && m.command != command)
      throw UsageError("command '" + command + "' does not match manifest command '" + m.command + "'");
    m.command = command;
    if (seed) m.seed = *seed;
    if (N) m.N = *N;
    if (M) m.M = *M;
    if (K) m.K = *K;
    if (L) m.L = *L;
    if (starts) m.starts = *starts;
    if (!grid.empty()) {
      int nx = 0, ny = 0;
      char comma = 0;
      std::istringstream gs(grid);
      if (!(gs >> nx >> comma >> ny) || comma != ',' || !gs.eof()) throw UsageError("--grid must be nx,ny");
      m.grid = std::array<int, 2>{nx, ny};
    }
    if (!out_dir.empty()) m.out = out_dir;

    const RunOutput r = run(m);
    for (const auto& w : r.warnings) std::cerr << w << "\n";

    const fs::path dir(m.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
    write_file(dir / "results.json", r.results.dump(2) + "\n");
    write_file(dir / "timings.json", r.timings.dump(2) + "\n");
    if (r.csv) write_file(dir / "results.csv", *r.csv);
    if (r.svg) write_file(dir / "figure.svg", *r.svg);
    return 0;
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
