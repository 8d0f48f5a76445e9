#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tollnet/errors.hpp"
#include "tollnet/interlink.hpp"
#include "tollnet/network.hpp"
#include "tollnet/quadrature.hpp"
#include "tollnet/rng.hpp"

namespace tollnet {

enum class RoutedLink { e1, e2 };

/// Logistic mean 1/(1+exp(b0 + b1 x_e1 + b2 x_e2 + b3 p)) and the
/// half-width of the uniform spread around it.
struct LogisticCompliance {
  double beta0 = 0.0;
  double beta1 = 0.0;  ///< per veh/km on e1
  double beta2 = 0.0;  ///< per veh/km on e2
  double beta3 = 0.0;  ///< per $ of toll
  double eps = 0.0;
};

struct ComplianceSpec {
  LogisticCompliance e1;
  LogisticCompliance e2;

  const LogisticCompliance& operator[](RoutedLink link) const { return link == RoutedLink::e1 ? e1 : e2; }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

inline ComplianceSpec default_compliance() {
  return {{-4.0, 0.01, -0.02, 0.3, 0.1}, {1.0, -0.02, 0.03, -0.6, 0.1}};
}

/// Hard errors for malformed coefficients; returns warnings for sign
/// patterns that break the monotonicity assumptions of the certificates.
inline std::vector<std::string> validate(const ComplianceSpec& spec) {
  std::vector<std::string> warnings;
  for (auto link : {RoutedLink::e1, RoutedLink::e2}) {
    const auto& c = spec[link];
    const std::string name = link == RoutedLink::e1 ? "e1" : "e2";
    for (double b : {c.beta0, c.beta1, c.beta2, c.beta3})
      if (!std::isfinite(b)) throw ValidationError("compliance: non-finite coefficient on " + name);
    if (!(c.eps >= 0.0 && c.eps <= 1.0)) throw ValidationError("compliance: " + name + ".eps must lie in [0,1]");
  }
  // Mean toward e1 must be non-increasing in x_e1 and p, non-decreasing in x_e2; mirrored for e2.
  if (spec.e1.beta1 < 0.0) warnings.push_back("compliance: e1.beta1 < 0 makes mean e1 compliance increase with x_e1");
  if (spec.e1.beta2 > 0.0) warnings.push_back("compliance: e1.beta2 > 0 makes mean e1 compliance decrease with x_e2");
  if (spec.e1.beta3 < 0.0) warnings.push_back("compliance: e1.beta3 < 0 makes mean e1 compliance increase with the toll");
  if (spec.e2.beta1 > 0.0) warnings.push_back("compliance: e2.beta1 > 0 makes mean e2 compliance decrease with x_e1");
  if (spec.e2.beta2 < 0.0) warnings.push_back("compliance: e2.beta2 < 0 makes mean e2 compliance increase with x_e2");
  if (spec.e2.beta3 > 0.0) warnings.push_back("compliance: e2.beta3 > 0 makes mean e2 compliance decrease with the toll");
  return warnings;
}

inline double mean_compliance(const ComplianceSpec& spec, RoutedLink link, const State& x, double p) {
  const auto& c = spec[link];
  const double z = c.beta0 + c.beta1 * x.x1 + c.beta2 * x.x2 + c.beta3 * p;
  return 1.0 / (1.0 + std::exp(z));
}

inline Interval support(double mean, double eps) {
  return {std::max(mean - eps, 0.0), std::min(mean + eps, 1.0)};
}

inline Interval support(const ComplianceSpec& spec, RoutedLink link, const State& x, double p) {
  return support(mean_compliance(spec, link, x, p), spec[link].eps);
}

/// Independent uniform draws on each link's support; the e1 component is
/// always drawn first.
inline ComplianceSample sample(const ComplianceSpec& spec, const State& x, double p, Rng& rng) {
  const Interval s1 = support(spec, RoutedLink::e1, x, p);
  const Interval s2 = support(spec, RoutedLink::e2, x, p);
  const double c1 = rng.uniform(s1.lo, s1.hi);
  const double c2 = rng.uniform(s2.lo, s2.hi);
  return {c1, c2};
}

inline constexpr std::size_t kQuadratureNodes = 16;

/// E[q_e] under independent uniform compliance, by tensor Gauss-Legendre
/// quadrature on the two support intervals. Degenerate supports collapse
/// to point evaluation in that dimension.
inline InterlinkFlows expected_interlink_flows(const NetworkSpec& net, const ComplianceSpec& spec, const State& x,
                                               double p) {
  const Interval s1 = support(spec, RoutedLink::e1, x, p);
  const Interval s2 = support(spec, RoutedLink::e2, x, p);
  const auto& rule = gauss_legendre<kQuadratureNodes>();

  const double alpha = routing_ratio(net, x);
  const double outflow = sending_flow(net.e0, x.x0);
  const double r1 = receiving_flow(net.e1, x.x1);
  const double r2 = receiving_flow(net.e2, x.x2);

  struct Node {
    double c;
    double w;
  };
  auto nodes_for = [&rule](const Interval& s) {
    std::vector<Node> out;
    if (s.width() <= 0.0) {
      out.push_back({s.lo, 1.0});
      return out;
    }
    out.reserve(kQuadratureNodes);
    const double half = 0.5 * s.width();
    const double mid = s.midpoint();
    for (std::size_t i = 0; i < kQuadratureNodes; ++i) out.push_back({mid + half * rule.nodes[i], 0.5 * rule.weights[i]});
    return out;
  };
  const auto n1 = nodes_for(s1);
  const auto n2 = nodes_for(s2);

  InterlinkFlows e{};
  for (const auto& a : n1) {
    for (const auto& b : n2) {
      const RouteMix mix = route_mix(alpha, {a.c, b.c});
      const double w = a.w * b.w;
      e.q1 += w * std::min(mix.to_e1 * outflow, r1);
      e.q2 += w * std::min(mix.to_e2 * outflow, r2);
    }
  }
  return e;
}

}  // namespace tollnet
