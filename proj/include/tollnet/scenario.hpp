#pragma once

#include <cstddef>
#include <cstdint>

#include "tollnet/compliance.hpp"
#include "tollnet/dynamics.hpp"
#include "tollnet/network.hpp"
#include "tollnet/verifier.hpp"

namespace tollnet {

struct SolverOptions {
  std::size_t resolution = 33;
  double bisection_tol = 10.0;  ///< veh/h
  SliceDomain slice = SliceDomain::free_flow;
};

struct SimulationOptions {
  std::size_t horizon = 10000;
  std::size_t seeds = 5;
  std::uint64_t seed = 20240601;
  double threshold = 500.0;  ///< veh/km
  double slope_tolerance = 1e-3;
};

/// Everything needed to reproduce one experiment.
struct Scenario {
  NetworkSpec network = default_network();
  ComplianceSpec compliance = default_compliance();
  DemandSpec demand{4000.0, 6000.0};
  double toll = 5.0;
  SolverOptions solver;
  SimulationOptions simulation;

  DiagnosticOptions diagnostic() const {
    DiagnosticOptions d;
    d.threshold = simulation.threshold;
    d.slope_tolerance = simulation.slope_tolerance;
    return d;
  }

  SliceGrid slice(double p) const { return build_slice(network, compliance, p, solver.resolution, solver.slice); }
};

}  // namespace tollnet
