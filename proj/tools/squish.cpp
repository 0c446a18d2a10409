#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "server.hpp"
#include "squish/engine.hpp"
#include "squish/io.hpp"

namespace fs = std::filesystem;
using namespace squish;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitDiverged = 2;

/// Writes to `path.tmp`, renamed over `path` by commit().
class AtomicFile {
 public:
  explicit AtomicFile(fs::path path) : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) {
      throw std::runtime_error("cannot write " + tmp_.string());
    }
  }
  ~AtomicFile() {
    if (out_.is_open()) {
      out_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }
  std::ostream& stream() { return out_; }
  void commit() {
    out_.close();
    if (!out_) {
      throw std::runtime_error("write failed for " + path_.string());
    }
    fs::rename(tmp_, path_);
  }

 private:
  fs::path path_;
  fs::path tmp_;
  std::ofstream out_;
};

/// Sends text to `out` or, when empty, to stdout.
void write_text(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  AtomicFile file(out);
  file.stream() << text;
  file.commit();
}

std::vector<IntegratorKind> parse_integrators(const std::vector<std::string>& names) {
  std::vector<IntegratorKind> kinds;
  for (const auto& name : names) {
    const auto kind = parse_integrator(name);
    if (!kind) {
      throw std::invalid_argument("unknown integrator: " + name);
    }
    kinds.push_back(*kind);
  }
  return kinds;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir, const std::string& format) {
  std::ifstream in(scenario_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << scenario_path << "\n";
    return kExitInvalid;
  }
  std::ostringstream text;
  text << in.rdbuf();
  ScenarioScript script;
  try {
    script = parse_scenario(text.str());
  } catch (const std::invalid_argument& e) {
    std::cerr << scenario_path << ": " << e.what() << "\n";
    return kExitInvalid;
  }

  const bool json = format == "json";
  std::optional<AtomicFile> snapshots;
  std::optional<AtomicFile> metrics;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    if (json) {
      snapshots.emplace(fs::path(out_dir) / "snapshots.ndjson");
    }
    metrics.emplace(fs::path(out_dir) / "metrics.csv");
    metrics->stream() << metrics_csv_header() << "\n";
  } else if (!json) {
    std::cout << metrics_csv_header() << "\n";
  }

  const RunResult result = run(script, [&](const Snapshot& s) {
    if (out_dir.empty()) {
      std::cout << (json ? snapshot_to_json(s).dump() : metrics_csv_row(s)) << "\n";
      return;
    }
    if (snapshots) {
      snapshots->stream() << snapshot_to_json(s).dump() << "\n";
    }
    metrics->stream() << metrics_csv_row(s) << "\n";
  });
  if (snapshots) {
    snapshots->commit();
  }
  if (metrics) {
    metrics->commit();
  }
  if (result.diverged) {
    std::cerr << "diverged at step " << result.final_snapshot.step << "\n";
    return kExitDiverged;
  }
  return kExitOk;
}

int cmd_sweep(const BodySpec& body, const std::vector<double>& dts, const std::vector<std::string>& names,
              std::uint64_t steps, const std::string& out) {
  const auto kinds = parse_integrators(names);
  const auto table = stability_sweep(body, SimConfig{}, dts, kinds, steps);
  std::string csv = "dt,integrator,survived,steps_to_divergence\n";
  for (const SweepCell& c : table) {
    csv += format_double(c.dt) + "," + std::string(to_string(c.integrator)) + "," + (c.survived ? "1" : "0") + "," +
           (c.steps_to_divergence ? std::to_string(*c.steps_to_divergence) : "") + "\n";
  }
  write_text(out, csv);
  return kExitOk;
}

int cmd_accuracy(const std::string& system, const std::vector<double>& dts, const std::vector<std::string>& names,
                 const std::string& out) {
  if (system != "oscillator" && system != "freefall") {
    throw std::invalid_argument("system must be oscillator or freefall");
  }
  const TestSystem sys = system == "oscillator" ? TestSystem::Oscillator : TestSystem::Freefall;
  std::string csv = "integrator,h,steps,error,fitted_order\n";
  for (IntegratorKind kind : parse_integrators(names)) {
    const AccuracyResult r = order_of_accuracy(sys, kind, dts);
    for (const AccuracyRow& row : r.rows) {
      csv += std::string(to_string(kind)) + "," + format_double(row.h) + "," + std::to_string(row.steps) + "," +
             format_double(row.error) + "," + format_double(r.fitted_order) + "\n";
    }
  }
  write_text(out, csv);
  return kExitOk;
}

int cmd_mesh(const BodySpec& body, const std::string& out) {
  write_text(out, mesh_to_json(build_body(body, SimConfig{})).dump() + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squish: two-layer soft body simulator"};
  app.require_subcommand(1);
  app.footer("SQUISH_SEEDLESS=1 is accepted; every command is deterministic and uses no entropy source.");

  std::string scenario;
  std::string out_dir;
  std::string format = "json";
  auto* run_cmd = app.add_subcommand("run", "replay a scenario file");
  run_cmd->add_option("scenario", scenario, "scenario JSON")->required();
  run_cmd->add_option("--out", out_dir, "output directory (snapshots.ndjson, metrics.csv)");
  run_cmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  std::vector<double> dts{0.003, 0.03, 0.3};
  std::vector<std::string> integrators{"euler", "midpoint", "rk4"};
  std::uint64_t steps = 5000;
  std::string out_file;
  std::string body_kind = "sphere_octa";
  BodySpec body;
  auto* sweep_cmd = app.add_subcommand("sweep", "stability table over time steps and integrators");
  sweep_cmd->add_option("--dts", dts, "time steps")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--integrators", integrators, "euler,midpoint,rk4")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--steps", steps, "steps per cell")->capture_default_str();
  sweep_cmd->add_option("--body", body_kind, "body kind")->capture_default_str();
  sweep_cmd->add_option("--iterations", body.iterations, "octahedron subdivisions")->capture_default_str();
  sweep_cmd->add_option("--out", out_file, "CSV file (default stdout)");

  std::string system = "oscillator";
  std::vector<double> accuracy_dts{0.05, 0.025, 0.0125, 0.00625};
  auto* acc_cmd = app.add_subcommand("accuracy", "global error and fitted convergence order");
  acc_cmd->add_option("--system", system, "oscillator | freefall")->capture_default_str();
  acc_cmd->add_option("--dts", accuracy_dts, "step sizes")->delimiter(',')->capture_default_str();
  acc_cmd->add_option("--integrators", integrators, "euler,midpoint,rk4")->delimiter(',')->capture_default_str();
  acc_cmd->add_option("--out", out_file, "CSV file (default stdout)");

  std::string mesh_kind;
  auto* mesh_cmd = app.add_subcommand("mesh", "export a procedural body as JSON");
  mesh_cmd->add_option("kind", mesh_kind, "1d | ring2d | sphere_polar | sphere_octa")->required();
  mesh_cmd->add_option("--iterations", body.iterations, "octahedron subdivisions")->capture_default_str();
  mesh_cmd->add_option("--slices", body.slices, "polar sphere slices")->capture_default_str();
  mesh_cmd->add_option("--stacks", body.stacks, "polar sphere stacks")->capture_default_str();
  mesh_cmd->add_option("--n", body.n, "ring particles per layer")->capture_default_str();
  mesh_cmd->add_option("--out", out_file, "JSON file (default stdout)");

  squish::server::ServerOptions serve;
  std::string serve_body = "ring2d";
  double serve_dt = serve.config.dt;
  auto* serve_cmd = app.add_subcommand("serve", "interactive WebSocket server");
  serve_cmd->add_option("--port", serve.port, "TCP port")->capture_default_str();
  serve_cmd->add_option("--body", serve_body, "body kind")->capture_default_str();
  serve_cmd->add_option("--dt", serve_dt, "time step")->capture_default_str();
  serve_cmd->add_option("--static", serve.static_root, "directory served over plain HTTP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  auto kind_of = [](const std::string& name) {
    const auto kind = parse_body_kind(name);
    if (!kind) {
      throw std::invalid_argument("unknown body kind: " + name);
    }
    return *kind;
  };

  try {
    if (*run_cmd) {
      return cmd_run(scenario, out_dir, format);
    }
    if (*sweep_cmd) {
      body.kind = kind_of(body_kind);
      return cmd_sweep(body, dts, integrators, steps, out_file);
    }
    if (*acc_cmd) {
      return cmd_accuracy(system, accuracy_dts, integrators, out_file);
    }
    if (*mesh_cmd) {
      body.kind = kind_of(mesh_kind);
      return cmd_mesh(body, out_file);
    }
    if (*serve_cmd) {
      serve.body.kind = kind_of(serve_body);
      set_param(serve.config, "dt", serve_dt);
      squish::server::Server server(serve);
      std::cerr << "listening on " << serve.address << ":" << serve.port << "\n";
      server.run_until_signal();
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
