#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "tollnet/errors.hpp"

namespace tollnet {

// Units throughout: km, veh/km, veh/h, h.

/// Triangular sending diagram f(x) = min{v x, Q}.
struct SendingDiagram {
  double v = 1.0;  ///< free-flow speed (km/h)
  double Q = 1.0;  ///< capacity (veh/h)
};

/// Receiving diagram r(x) = min{R - w x, Q}, clamped below at zero.
struct ReceivingDiagram {
  double R = 1.0;  ///< backward intercept (veh/h)
  double w = 1.0;  ///< backward wave speed (km/h)
  double Q = 1.0;  ///< capacity (veh/h)
};

struct LinkSpec {
  double length = 1.0;
  SendingDiagram sending;
  std::optional<ReceivingDiagram> receiving;  ///< absent for the buffer e0
};

/// Traffic density on the buffer e0, the corridor e1 and the local street e2.
struct State {
  double x0 = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;

  double norm1() const { return std::abs(x0) + std::abs(x1) + std::abs(x2); }
  friend bool operator==(const State&, const State&) = default;
};

struct NetworkSpec {
  LinkSpec e0;
  LinkSpec e1;
  LinkSpec e2;
  double alpha = 0.5;  ///< share of buffer outflow instructed toward e1
  double dt = 0.005;   ///< time step (h)
};

/// Receiving flows tolerate this much overshoot of the jam density.
inline constexpr double kJamTolerance = 1e-9;

inline double sending_flow(const LinkSpec& link, double x) {
  if (!(x >= 0.0)) throw DomainError("sending_flow: negative density " + std::to_string(x));
  return std::min(link.sending.v * x, link.sending.Q);
}

inline double critical_density(const SendingDiagram& d) {
  if (d.Q <= 0.0) return 0.0;
  return d.Q / d.v;
}
inline double critical_density(const LinkSpec& link) { return critical_density(link.sending); }

inline double jam_density(const ReceivingDiagram& d) { return d.R / d.w; }

inline double jam_density(const LinkSpec& link) {
  if (!link.receiving) throw DomainError("jam_density: link has no receiving diagram (buffer)");
  return jam_density(*link.receiving);
}

inline double receiving_flow(const LinkSpec& link, double x) {
  if (!link.receiving) throw DomainError("receiving_flow: link has no receiving diagram (buffer)");
  const auto& r = *link.receiving;
  const double jam = jam_density(r);
  if (!(x >= 0.0) || x > jam + kJamTolerance)
    throw DomainError("receiving_flow: density " + std::to_string(x) + " outside [0, " +
                      std::to_string(jam) + "]");
  return std::max(0.0, std::min(r.R - r.w * x, r.Q));
}

/// Largest density from which a routed link can never be pushed upward
/// past itself: above it sending flow is at capacity and receiving flow
/// is strictly below it. [0, free_flow_bound] is forward invariant.
inline double free_flow_bound(const LinkSpec& link) {
  const auto& r = link.receiving.value();
  const double saturated_supply_end = (r.R - r.Q) / r.w;
  return std::min(jam_density(r), std::max(critical_density(link), saturated_supply_end));
}

/// Constant routing policy alpha = Q_e1 / (Q_e1 + Q_e2).
inline double capacity_ratio(const NetworkSpec& net) {
  const double total = net.e1.sending.Q + net.e2.sending.Q;
  if (total <= 0.0) return 0.5;
  return net.e1.sending.Q / total;
}

// The state argument is part of the interface so that state-dependent
// policies can be introduced without changing callers; only the constant
// policy stored in the spec is implemented.
inline double routing_ratio(const NetworkSpec& net, const State& /*x*/) { return net.alpha; }

/// Throws ValidationError naming the first violated invariant.
inline void validate(const NetworkSpec& net) {
  auto fail = [](const std::string& what) { throw ValidationError("network: " + what); };
  const std::array<std::pair<const char*, const LinkSpec*>, 3> links{
      {{"e0", &net.e0}, {"e1", &net.e1}, {"e2", &net.e2}}};
  if (net.e0.receiving) fail("buffer e0 must not have a receiving diagram");
  if (!(net.dt > 0.0)) fail("dt must be positive");
  if (!(net.alpha >= 0.0 && net.alpha <= 1.0)) fail("alpha must lie in [0,1]");
  for (const auto& [name, link] : links) {
    const std::string n = name;
    if (!(link->length > 0.0)) fail(n + ".length must be positive");
    if (!(link->sending.v > 0.0)) fail(n + ".v must be positive");
    if (!(link->sending.Q > 0.0)) fail(n + ".Q must be positive");
    if (net.dt * link->sending.v > link->length)
      fail("dt*v <= length violated on " + n + " (dt must be <= " +
           std::to_string(link->length / link->sending.v) + ")");
    if (link == &net.e0) continue;
    if (!link->receiving) fail(n + " requires a receiving diagram");
    const auto& r = *link->receiving;
    if (!(r.w > 0.0)) fail(n + ".w must be positive");
    if (!(r.R >= r.Q)) fail(n + ".R must be >= Q");
    if (std::abs(r.Q - link->sending.Q) > 1e-12 * std::max(1.0, r.Q))
      fail(n + " sending and receiving capacities differ");
    if (!std::isfinite(jam_density(r)) || jam_density(r) <= 0.0) fail(n + " jam density must be positive and finite");
    if (net.dt * r.w > link->length)
      fail("dt*w <= length violated on " + n + " (dt must be <= " + std::to_string(link->length / r.w) + ")");
  }
}

/// Table 1 network with unit lengths and dt = 0.005 h.
inline NetworkSpec default_network() {
  NetworkSpec net;
  net.e0 = LinkSpec{1.0, {80.0, 8000.0}, std::nullopt};
  net.e1 = LinkSpec{1.0, {100.0, 4000.0}, ReceivingDiagram{4800.0, 20.0, 4000.0}};
  net.e2 = LinkSpec{1.0, {50.0, 2000.0}, ReceivingDiagram{2400.0, 10.0, 2000.0}};
  net.alpha = capacity_ratio(net);
  net.dt = 0.005;
  return net;
}

}  // namespace tollnet
