#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tollnet/compliance.hpp"
#include "tollnet/errors.hpp"
#include "tollnet/network.hpp"
#include "tollnet/parallel.hpp"
#include "tollnet/simplex.hpp"

namespace tollnet {

/// Which rectangle of (x_e1, x_e2) the certificates quantify over.
enum class SliceDomain {
  free_flow,  ///< [0, free_flow_bound(e1)] x [0, free_flow_bound(e2)], forward invariant
  full_jam,   ///< [0, x_e1^max] x [0, x_e2^max]
};

/// Cached flow values at one node of the critical slice x_e0 = x_e0^c.
struct SlicePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double eq1 = 0.0;  ///< E[q_e1]
  double eq2 = 0.0;  ///< E[q_e2]
  double f1 = 0.0;
  double f2 = 0.0;
};

struct SliceGrid {
  double toll = 0.0;
  std::size_t resolution = 0;  ///< nodes per axis
  std::array<double, 2> spacing{};
  /// f_e is affine on every cell (its kink lies on a grid line or outside),
  /// so it does not contribute to the discretization margin.
  std::array<bool, 2> sending_affine{true, true};
  std::vector<SlicePoint> points;  ///< row-major, x1 index outer

  const SlicePoint& at(std::size_t i1, std::size_t i2) const { return points[i1 * resolution + i2]; }
};

using Theta = std::array<double, 2>;

/// Weighted expected net flow into the buffer at one slice node.
inline double lhs(const SlicePoint& pt, const Theta& theta, double d_bar) {
  return d_bar - (1.0 - theta[0]) * pt.eq1 - (1.0 - theta[1]) * pt.eq2 - theta[0] * pt.f1 - theta[1] * pt.f2;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (n == 1) ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  if (n > 1) out.back() = hi;
  return out;
}

inline SliceGrid build_slice(const NetworkSpec& net, const ComplianceSpec& compliance, double p,
                             std::size_t resolution, SliceDomain domain = SliceDomain::free_flow) {
  if (resolution < 2) throw ValidationError("build_slice: resolution must be >= 2");
  const double hi1 = domain == SliceDomain::free_flow ? free_flow_bound(net.e1) : jam_density(net.e1);
  const double hi2 = domain == SliceDomain::free_flow ? free_flow_bound(net.e2) : jam_density(net.e2);
  const auto ax1 = linspace(0.0, hi1, resolution);
  const auto ax2 = linspace(0.0, hi2, resolution);
  const double x0c = critical_density(net.e0);

  SliceGrid grid;
  grid.toll = p;
  grid.resolution = resolution;
  grid.spacing = {ax1[1] - ax1[0], ax2[1] - ax2[0]};
  auto kink_on_grid = [](const std::vector<double>& axis, double kink, double h) {
    if (kink >= axis.back() || kink <= axis.front()) return true;
    const double k = (kink - axis.front()) / h;
    return std::abs(k - std::round(k)) < 1e-9;
  };
  grid.sending_affine = {kink_on_grid(ax1, critical_density(net.e1), grid.spacing[0]),
                         kink_on_grid(ax2, critical_density(net.e2), grid.spacing[1])};
  grid.points.resize(resolution * resolution);
  parallel_for(grid.points.size(), [&](std::size_t k) {
    const std::size_t i1 = k / resolution;
    const std::size_t i2 = k % resolution;
    const State x{x0c, ax1[i1], ax2[i2]};
    const InterlinkFlows e = expected_interlink_flows(net, compliance, x, p);
    grid.points[k] = {x.x1, x.x2, e.q1, e.q2, sending_flow(net.e1, x.x1), sending_flow(net.e2, x.x2)};
  });
  return grid;
}

struct LpSolution {
  Theta theta{};
  double gamma = 0.0;
};

namespace detail {

// lhs = b_i + a_i . theta with b_i = D - eq1 - eq2 and a_ie = eq_e - f_e.
// The epigraph variable is shifted by a bound on the optimum so that the
// origin is feasible and every variable is non-negative.
inline LpSolution solve_epigraph(const std::vector<SlicePoint>& pts, double d_bar, bool minimize_max) {
  if (pts.empty()) throw ValidationError("solve: empty slice grid");
  const std::size_t m = pts.size() + 2;
  std::vector<double> A(m * 3, 0.0);
  std::vector<double> rhs(m, 0.0);
  double shift = minimize_max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  for (const auto& pt : pts) {
    const double b = d_bar - pt.eq1 - pt.eq2;
    const double a1 = pt.eq1 - pt.f1;
    const double a2 = pt.eq2 - pt.f2;
    if (minimize_max)
      shift = std::max(shift, b + std::max(a1, 0.0) + std::max(a2, 0.0));
    else
      shift = std::min(shift, b + std::min(a1, 0.0) + std::min(a2, 0.0));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& pt = pts[i];
    const double b = d_bar - pt.eq1 - pt.eq2;
    const double a1 = pt.eq1 - pt.f1;
    const double a2 = pt.eq2 - pt.f2;
    if (minimize_max) {  // gamma = shift - y,  a.theta + y <= shift - b
      A[i * 3 + 0] = a1;
      A[i * 3 + 1] = a2;
      rhs[i] = std::max(0.0, shift - b);
    } else {  // gamma = shift + y,  -a.theta + y <= b - shift
      A[i * 3 + 0] = -a1;
      A[i * 3 + 1] = -a2;
      rhs[i] = std::max(0.0, b - shift);
    }
    A[i * 3 + 2] = 1.0;
  }
  const std::size_t box = pts.size();
  A[box * 3 + 0] = 1.0;
  rhs[box] = 1.0;
  A[(box + 1) * 3 + 1] = 1.0;
  rhs[box + 1] = 1.0;

  const std::array<double, 3> c{0.0, 0.0, 1.0};
  const lp::Result res = lp::maximize(c, A, rhs);
  if (res.status != lp::Status::optimal)
    throw NumericError(fmt::format("solve: simplex {} after {} pivots on {} constraints",
                                   res.status == lp::Status::unbounded ? "reported unbounded" : "hit iteration limit",
                                   res.pivots, m));
  LpSolution sol;
  sol.theta = {std::clamp(res.x[0], 0.0, 1.0), std::clamp(res.x[1], 0.0, 1.0)};
  sol.gamma = minimize_max ? shift - res.x[2] : shift + res.x[2];
  return sol;
}

}  // namespace detail

/// min over theta in [0,1]^2 of max over grid nodes of lhs.
inline LpSolution solve_p1(const SliceGrid& grid, double d_bar) { return detail::solve_epigraph(grid.points, d_bar, true); }

/// max over theta in [0,1]^2 of min over grid nodes of lhs.
inline LpSolution solve_p2(const SliceGrid& grid, double d_bar) { return detail::solve_epigraph(grid.points, d_bar, false); }

inline double max_lhs(const SliceGrid& grid, const Theta& theta, double d_bar) {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& pt : grid.points) v = std::max(v, lhs(pt, theta, d_bar));
  return v;
}

inline double min_lhs(const SliceGrid& grid, const Theta& theta, double d_bar) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& pt : grid.points) v = std::min(v, lhs(pt, theta, d_bar));
  return v;
}

inline constexpr double kLipschitzInflation = 1.5;

/// Allowance between the grid extremum of lhs(., theta) and its extremum
/// over the continuous slice. Terms affine on each cell are reproduced
/// exactly by bilinear interpolation of the nodes; the rest is bounded by
/// per-axis Lipschitz constants estimated from adjacent node differences:
///   margin = 1.5 * (L1 h1 + L2 h2) / 2.
inline double discretization_margin(const SliceGrid& grid, const Theta& theta) {
  const std::size_t n = grid.resolution;
  auto residual = [&](const SlicePoint& pt) {
    double g = -(1.0 - theta[0]) * pt.eq1 - (1.0 - theta[1]) * pt.eq2;
    if (!grid.sending_affine[0]) g -= theta[0] * pt.f1;
    if (!grid.sending_affine[1]) g -= theta[1] * pt.f2;
    return g;
  };
  double jump1 = 0.0;
  double jump2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double g = residual(grid.at(i, j));
      if (i + 1 < n) jump1 = std::max(jump1, std::abs(residual(grid.at(i + 1, j)) - g));
      if (j + 1 < n) jump2 = std::max(jump2, std::abs(residual(grid.at(i, j + 1)) - g));
    }
  }
  return kLipschitzInflation * 0.5 * (jump1 + jump2);
}

enum class CertificateKind { stability, instability };

struct Certificate {
  CertificateKind kind = CertificateKind::stability;
  Theta theta{};
  double gamma = 0.0;   ///< grid extremum of lhs at theta (veh/h)
  double margin = 0.0;  ///< discretization allowance (veh/h)
  double toll = 0.0;
  double d_bar = 0.0;
  std::size_t resolution = 0;

  /// gamma + margin < 0 for stability, gamma - margin >= 0 for instability.
  bool certifies() const { return kind == CertificateKind::stability ? gamma + margin < 0.0 : gamma - margin >= 0.0; }
};

enum class VerdictKind { stable, unstable, inconclusive };

inline const char* to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::stable: return "stable";
    case VerdictKind::unstable: return "unstable";
    default: return "inconclusive";
  }
}

inline const char* to_string(CertificateKind k) { return k == CertificateKind::stability ? "stability" : "instability"; }

struct Verdict {
  VerdictKind kind = VerdictKind::inconclusive;
  double gamma_p1 = 0.0;  ///< LP optimum of P1
  double gamma_p2 = 0.0;  ///< LP optimum of P2
  Certificate stability;    ///< best P1 candidate after margin
  Certificate instability;  ///< best P2 candidate after margin

  const Certificate* certificate() const {
    if (kind == VerdictKind::stable) return &stability;
    if (kind == VerdictKind::unstable) return &instability;
    return nullptr;
  }
};

/// Solves P1 and P2 on the grid and keeps, for each, the candidate theta
/// (LP optimum or a box corner) with the best margin-adjusted gamma.
inline Verdict verdict(const SliceGrid& grid, double d_bar) {
  const LpSolution p1 = solve_p1(grid, d_bar);
  const LpSolution p2 = solve_p2(grid, d_bar);
  const std::array<Theta, 4> corners{Theta{0, 0}, Theta{1, 0}, Theta{0, 1}, Theta{1, 1}};

  auto best_of = [&](CertificateKind kind, const Theta& lp_theta) {
    Certificate best;
    bool first = true;
    auto consider = [&](const Theta& th) {
      Certificate c{kind, th, 0.0, discretization_margin(grid, th), grid.toll, d_bar, grid.resolution};
      c.gamma = kind == CertificateKind::stability ? max_lhs(grid, th, d_bar) : min_lhs(grid, th, d_bar);
      const double score = kind == CertificateKind::stability ? c.gamma + c.margin : -(c.gamma - c.margin);
      const double best_score =
          kind == CertificateKind::stability ? best.gamma + best.margin : -(best.gamma - best.margin);
      if (first || score < best_score) best = c;
      first = false;
    };
    consider(lp_theta);
    for (const auto& th : corners) consider(th);
    return best;
  };

  Verdict v;
  v.gamma_p1 = p1.gamma;
  v.gamma_p2 = p2.gamma;
  v.stability = best_of(CertificateKind::stability, p1.theta);
  v.instability = best_of(CertificateKind::instability, p2.theta);
  const bool stable = v.stability.certifies();
  const bool unstable = v.instability.certifies();
  if (stable && unstable)
    throw NumericError(fmt::format("verdict: both certificates hold at p={} D_bar={} (margin underestimated)",
                                   grid.toll, d_bar));
  v.kind = stable ? VerdictKind::stable : (unstable ? VerdictKind::unstable : VerdictKind::inconclusive);
  return v;
}

inline Verdict verdict(const NetworkSpec& net, const ComplianceSpec& compliance, double p, double d_bar,
                       std::size_t resolution, SliceDomain domain = SliceDomain::free_flow) {
  return verdict(build_slice(net, compliance, p, resolution, domain), d_bar);
}

inline nlohmann::json to_json(const Certificate& c) {
  return {{"p", c.toll},         {"D_bar", c.d_bar},   {"kind", to_string(c.kind)},
          {"theta", c.theta},    {"gamma", c.gamma},   {"margin", c.margin},
          {"resolution", c.resolution}};
}

}  // namespace tollnet
