#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tollnet/config.hpp"
#include "tollnet/dynamics.hpp"
#include "tollnet/errors.hpp"
#include "tollnet/throughput.hpp"
#include "tollnet/verifier.hpp"

namespace tollnet {

inline constexpr const char* kToolVersion = "tollnet 0.1.0";

/// Command-line overrides applied on top of the scenario file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> toll;
  std::optional<double> d_bar;  ///< sets d_max = 2 D_bar - d_min
  std::optional<std::size_t> resolution;
  std::optional<std::size_t> horizon;
  std::optional<double> eps_e2;
};

/// Grids for sweep/region; defaults match the reproduction settings.
struct GridOptions {
  double p_min = 0.0;
  double p_max = 20.0;
  double p_step = 0.5;
  double sweep_p_max = 10.0;
  double sweep_p_step = 0.25;
  double d_min = 4500.0;
  double d_max = 6000.0;
  double d_step = 25.0;
  bool with_simulation = false;
};

/// Returns a revalidated copy of the scenario with overrides applied.
inline Scenario apply_overrides(Scenario sc, const Overrides& o) {
  if (o.seed) sc.simulation.seed = *o.seed;
  if (o.toll) sc.toll = *o.toll;
  if (o.d_bar) sc.demand.d_max = 2.0 * *o.d_bar - sc.demand.d_min;
  if (o.resolution) sc.solver.resolution = *o.resolution;
  if (o.horizon) sc.simulation.horizon = *o.horizon;
  if (o.eps_e2) sc.compliance.e2.eps = *o.eps_e2;
  return scenario_from_json(to_json(sc));
}

struct CommandResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> outputs;
  Json summary;
};

namespace detail {

class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

  std::ofstream open(const std::string& name) {
    auto path = dir_ / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot write " + path.string());
    written_.push_back(path);
    return os;
  }

  void write_json(const std::string& name, const Json& j) { open(name) << j.dump(2) << '\n'; }
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
};

inline Json verdict_json(const Verdict& v) {
  return {{"verdict", to_string(v.kind)},
          {"gamma_p1", v.gamma_p1},
          {"gamma_p2", v.gamma_p2},
          {"certificates", Json::array({to_json(v.stability), to_json(v.instability)})}};
}

}  // namespace detail

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate", "verify", "throughput", "sweep", "region"};
  return names;
}

/// Runs one command and writes its artifacts plus scenario.yaml and
/// manifest.json into out_dir. Outputs carry no timestamps, so rerunning
/// with out_dir/scenario.yaml reproduces them byte for byte.
inline CommandResult run_command(const std::string& cmd, const Scenario& sc, const std::filesystem::path& out_dir,
                                 const GridOptions& grids = {}) {
  detail::OutputDir out(out_dir);
  CommandResult res;
  const DemandRange range{grids.d_min, grids.d_max};

  if (cmd == "simulate") {
    const auto traj = simulate(sc.network, sc.compliance, sc.demand, sc.toll, State{}, sc.simulation.horizon,
                               sc.simulation.seed);
    auto os = out.open("trajectory.csv");
    write_trajectory_csv(os, traj);
    const auto diag = diagnose_stability(traj, sc.diagnostic());
    res.summary = {{"p", sc.toll},
                   {"D_bar", sc.demand.mean()},
                   {"diagnosis", diag.unstable ? "unstable" : "stable"},
                   {"window_avg_norm", diag.window_avg_norm},
                   {"buffer_slope", diag.buffer_slope},
                   {"final_avg_norm", traj.running_avg_norm.back()}};
    out.write_json("diagnosis.json", res.summary);
  } else if (cmd == "verify") {
    const Verdict v = verdict(sc.slice(sc.toll), sc.demand.mean());
    res.summary = detail::verdict_json(v);
    out.write_json("certificate.json", res.summary);
  } else if (cmd == "throughput") {
    const auto b = throughput_bounds(sc, sc.toll, range, sc.solver.bisection_tol);
    res.summary = Json::array({to_json(b)});
    out.write_json("bounds.json", res.summary);
  } else if (cmd == "sweep") {
    const auto tolls = arange(grids.p_min, grids.sweep_p_max, grids.sweep_p_step);
    const auto sweep = toll_sweep(sc, tolls, range, sc.solver.bisection_tol);
    Json all = Json::array();
    auto os = out.open("sweep.csv");
    os << "p,lower,upper,lower_status,upper_status\n";
    for (const auto& b : sweep.bounds) {
      all.push_back(to_json(b));
      os << fmt::format("{},{},{},{},{}\n", b.toll, b.lower, b.upper, to_string(b.lower_status), to_string(b.upper_status));
    }
    os.close();
    out.write_json("bounds.json", all);
    res.summary = {{"best_toll", sweep.best_toll()}, {"best_lower", sweep.bounds[sweep.best].lower}, {"tolls", tolls.size()}};
    out.write_json("sweep_summary.json", res.summary);
  } else if (cmd == "region") {
    const auto map = region_map(sc, arange(grids.p_min, grids.p_max, grids.p_step),
                                arange(grids.d_min, grids.d_max, grids.d_step), grids.with_simulation);
    {
      auto os = out.open("region.csv");
      write_region_csv(os, map);
    }
    {
      auto os = out.open("region_matrix.dat");
      write_region_matrix(os, map);
    }
    auto os = out.open("frontiers.csv");
    os << "p,last_stable,first_unstable\n";
    for (const auto& f : extract_frontiers(map))
      os << fmt::format("{},{},{}\n", f.toll, f.last_stable ? fmt::format("{}", *f.last_stable) : "",
                        f.first_unstable ? fmt::format("{}", *f.first_unstable) : "");
    res.summary = {{"cells", map.cells.size()},
                   {"stable", map.count(VerdictKind::stable)},
                   {"unstable", map.count(VerdictKind::unstable)},
                   {"inconclusive", map.count(VerdictKind::inconclusive)}};
  } else {
    throw ValidationError("unknown command '" + cmd + "'");
  }

  out.open("scenario.yaml") << dump_scenario(sc);
  Json files = Json::array();
  for (const auto& p : out.written()) files.push_back(p.filename().string());
  const Json manifest{{"tool", kToolVersion},
                      {"command", cmd},
                      {"seed", sc.simulation.seed},
                      {"grids",
                       {{"p_min", grids.p_min},
                        {"p_max", grids.p_max},
                        {"p_step", grids.p_step},
                        {"sweep_p_max", grids.sweep_p_max},
                        {"sweep_p_step", grids.sweep_p_step},
                        {"d_min", grids.d_min},
                        {"d_max", grids.d_max},
                        {"d_step", grids.d_step},
                        {"with_simulation", grids.with_simulation}}},
                      {"scenario", to_json(sc)},
                      {"outputs", files}};
  out.write_json("manifest.json", manifest);
  res.outputs = out.written();
  return res;
}

/// Machine-readable failure record written next to the outputs.
inline int report_failure(const std::filesystem::path& out_dir, const std::string& kind, const std::string& message,
                          int code) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream os(out_dir / "error.json", std::ios::binary | std::ios::trunc);
  if (os) os << Json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump(2) << '\n';
  return code;
}

}  // namespace tollnet
