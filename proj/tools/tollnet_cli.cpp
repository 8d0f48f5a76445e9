// Command-line front end: tollnet <simulate|verify|throughput|sweep|region> [options]

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tollnet/commands.hpp"

int main(int argc, char** argv) {
  using namespace tollnet;

  CLI::App app{"Stability certificates, throughput bounds and simulation for a tolled two-route network"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  Overrides ov;
  GridOptions grids;
  app.add_option("--config", config_path, "Scenario file (.yaml/.yml or .json); defaults when omitted");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", ov.seed, "Top-level random seed");
  app.add_option("--toll", ov.toll, "Toll p ($/veh)");
  app.add_option("--dbar", ov.d_bar, "Expected demand (veh/h); sets d_max = 2*dbar - d_min");
  app.add_option("--resolution", ov.resolution, "Slice grid nodes per axis");
  app.add_option("--horizon", ov.horizon, "Simulation horizon (steps)");
  app.add_option("--eps-e2", ov.eps_e2, "Compliance half-width on e2");
  app.add_option("--p-min", grids.p_min, "Lowest toll of sweep/region grids")->capture_default_str();
  app.add_option("--p-max", grids.p_max, "Highest toll of the region grid")->capture_default_str();
  app.add_option("--p-step", grids.p_step, "Toll step of the region grid")->capture_default_str();
  app.add_option("--sweep-p-max", grids.sweep_p_max, "Highest toll of the sweep")->capture_default_str();
  app.add_option("--sweep-p-step", grids.sweep_p_step, "Toll step of the sweep")->capture_default_str();
  app.add_option("--d-min", grids.d_min, "Lowest expected demand")->capture_default_str();
  app.add_option("--d-max", grids.d_max, "Highest expected demand")->capture_default_str();
  app.add_option("--d-step", grids.d_step, "Demand step of the region grid")->capture_default_str();

  app.add_subcommand("simulate", "Simulate one trajectory and diagnose stability");
  app.add_subcommand("verify", "Certify stability or instability at (toll, dbar)");
  app.add_subcommand("throughput", "Bisect throughput lower/upper bounds at the toll");
  app.add_subcommand("sweep", "Throughput bounds over a toll grid and the best toll");
  auto* region = app.add_subcommand("region", "Verdict map over (toll, expected demand)");
  region->add_flag("--with-simulation", grids.with_simulation, "Also simulate every cell");

  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    std::vector<std::string> warnings;
    Scenario sc = config_path.empty() ? Scenario{} : load_scenario(config_path, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    sc = apply_overrides(sc, ov);
    const CommandResult res = run_command(cmd, sc, out_dir, grids);
    std::cout << res.summary.dump(2) << '\n';
    return res.exit_code;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return report_failure(out_dir, "validation", e.what(), 1);
  } catch (const DomainError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return report_failure(out_dir, "validation", e.what(), 1);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return report_failure(out_dir, "numeric", e.what(), 2);
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return report_failure(out_dir, "numeric", e.what(), 2);
  }
}
