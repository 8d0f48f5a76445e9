#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace tollnet {

template <std::size_t N>
struct GaussLegendreRule {
  std::array<double, N> nodes{};    // on [-1, 1]
  std::array<double, N> weights{};  // sum to 2
};

/// N-point Gauss-Legendre rule by Newton iteration on P_N.
template <std::size_t N>
GaussLegendreRule<N> make_gauss_legendre() {
  static_assert(N >= 1);
  GaussLegendreRule<N> rule;
  for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (std::size_t k = 1; k <= N; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[N - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[N - 1 - i] = w;
  }
  return rule;
}

template <std::size_t N>
const GaussLegendreRule<N>& gauss_legendre() {
  static const GaussLegendreRule<N> rule = make_gauss_legendre<N>();
  return rule;
}

}  // namespace tollnet
