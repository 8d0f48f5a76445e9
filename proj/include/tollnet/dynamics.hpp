#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "tollnet/compliance.hpp"
#include "tollnet/errors.hpp"
#include "tollnet/interlink.hpp"
#include "tollnet/network.hpp"
#include "tollnet/rng.hpp"

namespace tollnet {

/// Per-step demand D(t) ~ U[d_min, d_max], i.i.d.
struct DemandSpec {
  double d_min = 4000.0;
  double d_max = 6000.0;

  double mean() const { return 0.5 * (d_min + d_max); }

  /// Uniform demand with the given mean and fixed lower end.
  static DemandSpec with_mean(double d_bar, double d_min) { return {d_min, 2.0 * d_bar - d_min}; }
};

inline void validate(const DemandSpec& d) {
  if (!(d.d_min >= 0.0)) throw ValidationError("demand: d_min must be >= 0");
  if (!(d.d_max >= d.d_min)) throw ValidationError("demand: d_max must be >= d_min");
}

/// Allowed numerical overshoot of the state-space bounds after one update.
inline constexpr double kStateTolerance = 1e-9;

/// One conservation-law update with a given compliance realization.
inline State advance(const NetworkSpec& net, const State& x, double demand, ComplianceSample c) {
  const InterlinkFlows q = interlink_flows(net, x, c);
  const double out1 = sending_flow(net.e1, x.x1);
  const double out2 = sending_flow(net.e2, x.x2);
  State next{x.x0 + net.dt / net.e0.length * (demand - q.q1 - q.q2),
             x.x1 + net.dt / net.e1.length * (q.q1 - out1),
             x.x2 + net.dt / net.e2.length * (q.q2 - out2)};

  auto settle = [](double& v, double hi, const char* name) {
    if (v < 0.0) {
      if (v < -kStateTolerance) throw NumericError(std::string("step: negative density on ") + name + " (check dt)");
      v = 0.0;
    }
    if (v > hi + kStateTolerance) throw NumericError(std::string("step: jam density exceeded on ") + name + " (check dt)");
  };
  settle(next.x0, INFINITY, "e0");
  settle(next.x1, jam_density(net.e1), "e1");
  settle(next.x2, jam_density(net.e2), "e2");
  return next;
}

/// Samples compliance at the current state and advances one step.
inline State step(const NetworkSpec& net, const ComplianceSpec& compliance, const State& x, double p, double demand,
                  Rng& rng) {
  return advance(net, x, demand, sample(compliance, x, p, rng));
}

struct Trajectory {
  std::vector<State> states;
  std::vector<double> running_avg_norm;  ///< Cesaro mean of |x(0..t)|_1

  std::size_t horizon() const { return states.empty() ? 0 : states.size() - 1; }
};

inline Trajectory simulate(const NetworkSpec& net, const ComplianceSpec& compliance, const DemandSpec& demand,
                           double p, const State& x0, std::size_t horizon, std::uint64_t seed) {
  Rng rng(seed);
  Trajectory traj;
  traj.states.reserve(horizon + 1);
  traj.running_avg_norm.reserve(horizon + 1);
  traj.states.push_back(x0);
  double norm_sum = x0.norm1();
  traj.running_avg_norm.push_back(norm_sum);
  State x = x0;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double d = rng.uniform(demand.d_min, demand.d_max);
    x = step(net, compliance, x, p, d, rng);
    traj.states.push_back(x);
    norm_sum += x.norm1();
    traj.running_avg_norm.push_back(norm_sum / static_cast<double>(t + 1));
  }
  return traj;
}

struct DiagnosticOptions {
  double threshold = 500.0;        ///< veh/km, on the final-window mean of |x|_1
  double slope_tolerance = 1e-3;   ///< veh/km per step, on the buffer density
  double trend_to_noise = 2.0;     ///< fitted rise must exceed this many residual std devs
  std::size_t burn_in = 0;         ///< 0 selects horizon / 2
};

struct StabilityDiagnosis {
  bool unstable = false;
  double window_avg_norm = 0.0;
  double buffer_slope = 0.0;
  double residual_std = 0.0;
};

/// Finite-horizon surrogate of the time-average boundedness criterion:
/// unstable if the window mean of |x|_1 exceeds the threshold, or the
/// buffer density shows a resolvable linear growth trend.
inline StabilityDiagnosis diagnose_stability(const Trajectory& traj, const DiagnosticOptions& opt = {}) {
  const std::size_t horizon = traj.horizon();
  const std::size_t burn_in = opt.burn_in == 0 ? horizon / 2 : opt.burn_in;
  if (burn_in == 0 || horizon < 2 * burn_in)
    throw ValidationError("diagnose_stability: horizon " + std::to_string(horizon) + " shorter than twice the burn-in");

  const std::size_t n = horizon - burn_in + 1;
  double sum_norm = 0.0;
  double t_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t t = burn_in; t <= horizon; ++t) {
    sum_norm += traj.states[t].norm1();
    t_mean += static_cast<double>(t);
    y_mean += traj.states[t].x0;
  }
  t_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t t = burn_in; t <= horizon; ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    stt += dt * dt;
    sty += dt * (traj.states[t].x0 - y_mean);
  }
  StabilityDiagnosis d;
  d.window_avg_norm = sum_norm / static_cast<double>(n);
  d.buffer_slope = stt > 0.0 ? sty / stt : 0.0;
  double ssr = 0.0;
  for (std::size_t t = burn_in; t <= horizon; ++t) {
    const double r = traj.states[t].x0 - y_mean - d.buffer_slope * (static_cast<double>(t) - t_mean);
    ssr += r * r;
  }
  d.residual_std = std::sqrt(ssr / static_cast<double>(n));
  const double rise = d.buffer_slope * static_cast<double>(n - 1);
  const bool growing = d.buffer_slope > opt.slope_tolerance && rise > opt.trend_to_noise * d.residual_std;
  d.unstable = d.window_avg_norm > opt.threshold || growing;
  return d;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x0,x1,x2,running_avg_norm\n";
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    const auto& s = traj.states[t];
    os << fmt::format("{},{},{},{},{}\n", t, s.x0, s.x1, s.x2, traj.running_avg_norm[t]);
  }
}

}  // namespace tollnet
