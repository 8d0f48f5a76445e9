#pragma once

#include <cstddef>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tollnet/dynamics.hpp"
#include "tollnet/parallel.hpp"
#include "tollnet/rng.hpp"
#include "tollnet/scenario.hpp"
#include "tollnet/verifier.hpp"

namespace tollnet {

struct DemandRange {
  double lo = 4500.0;
  double hi = 6000.0;
};

enum class BoundStatus {
  bracketed,    ///< located by bisection inside the range
  whole_range,  ///< the property holds on the entire range; clamped to the range end
  not_found,    ///< the property holds nowhere in the range; clamped to the other end
};

inline const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::bracketed: return "bracketed";
    case BoundStatus::whole_range: return "whole_range";
    default: return "not_found";
  }
}

struct ThroughputBounds {
  double toll = 0.0;
  double lower = 0.0;  ///< largest certified-stable D_bar found
  double upper = 0.0;  ///< smallest certified-unstable D_bar found
  double tol = 0.0;
  BoundStatus lower_status = BoundStatus::bracketed;
  BoundStatus upper_status = BoundStatus::bracketed;
};

namespace detail {

// Largest d in [lo, hi] with holds(d) for a downward-closed predicate.
// Returns lo when nothing holds, hi when everything does.
template <typename Pred>
std::pair<double, BoundStatus> bisect_last_true(Pred holds, double lo, double hi, double tol) {
  if (holds(hi)) return {hi, BoundStatus::whole_range};
  if (!holds(lo)) return {lo, BoundStatus::not_found};
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return {lo, BoundStatus::bracketed};
}

// Smallest d in [lo, hi] with holds(d) for an upward-closed predicate.
template <typename Pred>
std::pair<double, BoundStatus> bisect_first_true(Pred holds, double lo, double hi, double tol) {
  if (holds(lo)) return {lo, BoundStatus::whole_range};
  if (!holds(hi)) return {hi, BoundStatus::not_found};
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return {hi, BoundStatus::bracketed};
}

}  // namespace detail

/// Throughput bounds at the grid's toll, by bisection on the verdict.
/// Relies on lhs shifting one-to-one with D_bar, which makes the stable
/// set downward closed and the unstable set upward closed.
inline ThroughputBounds throughput_bounds(const SliceGrid& grid, DemandRange range, double tol) {
  if (!(range.hi >= range.lo)) throw ValidationError("throughput_bounds: empty demand range");
  if (!(tol > 0.0)) throw ValidationError("throughput_bounds: tolerance must be positive");
  ThroughputBounds b;
  b.toll = grid.toll;
  b.tol = tol;
  auto stable = [&](double d) { return verdict(grid, d).kind == VerdictKind::stable; };
  auto unstable = [&](double d) { return verdict(grid, d).kind == VerdictKind::unstable; };
  std::tie(b.lower, b.lower_status) = detail::bisect_last_true(stable, range.lo, range.hi, tol);
  std::tie(b.upper, b.upper_status) = detail::bisect_first_true(unstable, range.lo, range.hi, tol);
  return b;
}

inline ThroughputBounds throughput_bounds(const Scenario& sc, double p, DemandRange range, double tol) {
  return throughput_bounds(sc.slice(p), range, tol);
}

struct TollSweep {
  std::vector<ThroughputBounds> bounds;  ///< in p_grid order
  std::size_t best = 0;                  ///< index maximizing the lower bound
  double best_toll() const { return bounds.at(best).toll; }
};

/// Ties in the lower bound go to the smaller toll.
inline TollSweep toll_sweep(const Scenario& sc, const std::vector<double>& p_grid, DemandRange range, double tol) {
  if (p_grid.empty()) throw ValidationError("toll_sweep: empty toll grid");
  TollSweep sweep;
  sweep.bounds.resize(p_grid.size());
  parallel_for(p_grid.size(), [&](std::size_t i) { sweep.bounds[i] = throughput_bounds(sc, p_grid[i], range, tol); });
  for (std::size_t i = 1; i < sweep.bounds.size(); ++i) {
    const auto& cand = sweep.bounds[i];
    const auto& cur = sweep.bounds[sweep.best];
    if (cand.lower > cur.lower || (cand.lower == cur.lower && cand.toll < cur.toll)) sweep.best = i;
  }
  return sweep;
}

/// Inclusive arithmetic grid lo, lo+step, ..., hi (hi included when it
/// lies on the lattice up to rounding).
inline std::vector<double> arange(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw ValidationError("arange: invalid grid");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  return out;
}

inline std::vector<double> default_toll_axis() { return arange(0.0, 20.0, 0.5); }
inline std::vector<double> default_demand_axis() { return arange(4500.0, 6000.0, 25.0); }

struct SimulationSummary {
  std::size_t runs = 0;
  std::size_t unstable_runs = 0;

  const char* label() const {
    if (runs == 0) return "none";
    if (unstable_runs == 0) return "stable";
    return unstable_runs == runs ? "unstable" : "mixed";
  }
};

struct RegionCell {
  double toll = 0.0;
  double d_bar = 0.0;
  Verdict verdict;
  std::optional<SimulationSummary> simulation;
};

struct RegionMap {
  std::vector<double> tolls;
  std::vector<double> demands;
  std::vector<RegionCell> cells;  ///< toll index outer

  const RegionCell& at(std::size_t ip, std::size_t id) const { return cells[ip * demands.size() + id]; }
  std::size_t count(VerdictKind k) const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.verdict.kind == k;
    return n;
  }
};

/// Simulates `runs` independent trajectories from the empty network, one
/// rng stream per (cell, run).
inline SimulationSummary simulate_cell(const Scenario& sc, double p, double d_bar, std::uint64_t cell_key,
                                       std::size_t runs) {
  SimulationSummary s;
  s.runs = runs;
  const DemandSpec demand = DemandSpec::with_mean(d_bar, sc.demand.d_min);
  for (std::size_t r = 0; r < runs; ++r) {
    const auto traj = simulate(sc.network, sc.compliance, demand, p, State{}, sc.simulation.horizon,
                               stream_seed(sc.simulation.seed, cell_key * 1024 + r));
    s.unstable_runs += diagnose_stability(traj, sc.diagnostic()).unstable;
  }
  return s;
}

inline void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw ValidationError(std::string("region_map: empty ") + name + " axis");
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1])) throw ValidationError(std::string("region_map: ") + name + " axis not increasing");
}

inline RegionMap region_map(const Scenario& sc, const std::vector<double>& p_grid, const std::vector<double>& d_grid,
                            bool with_simulation) {
  check_axis(p_grid, "toll");
  check_axis(d_grid, "demand");
  RegionMap map;
  map.tolls = p_grid;
  map.demands = d_grid;
  map.cells.resize(p_grid.size() * d_grid.size());
  parallel_for(p_grid.size(), [&](std::size_t ip) {
    const SliceGrid grid = sc.slice(p_grid[ip]);
    for (std::size_t id = 0; id < d_grid.size(); ++id) {
      auto& cell = map.cells[ip * d_grid.size() + id];
      cell.toll = p_grid[ip];
      cell.d_bar = d_grid[id];
      cell.verdict = verdict(grid, d_grid[id]);
      if (with_simulation)
        cell.simulation = simulate_cell(sc, cell.toll, cell.d_bar, ip * d_grid.size() + id, sc.simulation.seeds);
    }
  });
  return map;
}

/// Per toll column: the highest Stable demand and the lowest Unstable one.
struct Frontier {
  double toll = 0.0;
  std::optional<double> last_stable;
  std::optional<double> first_unstable;
};

inline std::vector<Frontier> extract_frontiers(const RegionMap& map) {
  std::vector<Frontier> out;
  for (std::size_t ip = 0; ip < map.tolls.size(); ++ip) {
    Frontier f;
    f.toll = map.tolls[ip];
    for (std::size_t id = 0; id < map.demands.size(); ++id) {
      const auto k = map.at(ip, id).verdict.kind;
      if (k == VerdictKind::stable) f.last_stable = map.demands[id];
      if (k == VerdictKind::unstable && !f.first_unstable) f.first_unstable = map.demands[id];
    }
    out.push_back(f);
  }
  return out;
}

inline void write_region_csv(std::ostream& os, const RegionMap& map) {
  os << "p,D_bar,verdict,gamma_p1,gamma_p2,sim_diagnostic\n";
  for (const auto& c : map.cells)
    os << fmt::format("{},{},{},{},{},{}\n", c.toll, c.d_bar, to_string(c.verdict.kind), c.verdict.gamma_p1,
                      c.verdict.gamma_p2, c.simulation ? c.simulation->label() : "none");
}

/// gnuplot "nonuniform matrix" layout: first row is the toll axis, each
/// following row a demand value then the verdict codes
/// (1 stable, 0 inconclusive, -1 unstable).
inline void write_region_matrix(std::ostream& os, const RegionMap& map) {
  os << map.tolls.size();
  for (double p : map.tolls) os << fmt::format(" {}", p);
  os << '\n';
  for (std::size_t id = 0; id < map.demands.size(); ++id) {
    os << fmt::format("{}", map.demands[id]);
    for (std::size_t ip = 0; ip < map.tolls.size(); ++ip) {
      const auto k = map.at(ip, id).verdict.kind;
      os << ' ' << (k == VerdictKind::stable ? 1 : (k == VerdictKind::unstable ? -1 : 0));
    }
    os << '\n';
  }
}

inline nlohmann::json to_json(const ThroughputBounds& b) {
  return {{"p", b.toll},
          {"lower", b.lower},
          {"upper", b.upper},
          {"tol", b.tol},
          {"lower_status", to_string(b.lower_status)},
          {"upper_status", to_string(b.upper_status)}};
}

}  // namespace tollnet
