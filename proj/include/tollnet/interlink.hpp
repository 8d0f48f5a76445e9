#pragma once

#include <algorithm>

#include "tollnet/network.hpp"

namespace tollnet {

/// Realized compliance rates toward e1 and e2.
struct ComplianceSample {
  double c1 = 1.0;
  double c2 = 1.0;
};

struct InterlinkFlows {
  double q1 = 0.0;  ///< buffer -> corridor e1 (veh/h)
  double q2 = 0.0;  ///< buffer -> local street e2 (veh/h)
};

/// Shares of buffer outflow heading to e1 and e2 once instructed drivers
/// comply with probability c1 (told e1) or c2 (told e2).
struct RouteMix {
  double to_e1;
  double to_e2;
};

constexpr RouteMix route_mix(double alpha, ComplianceSample c) {
  return {alpha * c.c1 + (1.0 - alpha) * (1.0 - c.c2), alpha * (1.0 - c.c1) + (1.0 - alpha) * c.c2};
}

/// Flows from the buffer into the routed links; each is the demanded
/// share of buffer sending flow capped by the link's receiving flow.
inline InterlinkFlows interlink_flows(const NetworkSpec& net, const State& x, ComplianceSample c) {
  const double alpha = routing_ratio(net, x);
  const double outflow = sending_flow(net.e0, x.x0);
  const RouteMix mix = route_mix(alpha, c);
  return {std::min(mix.to_e1 * outflow, receiving_flow(net.e1, x.x1)),
          std::min(mix.to_e2 * outflow, receiving_flow(net.e2, x.x2))};
}

}  // namespace tollnet
