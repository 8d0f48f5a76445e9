#include <random>

#include <gtest/gtest.h>

#include "tollnet/network.hpp"

using namespace tollnet;

namespace {

LinkSpec routed(double v, double Q, double R, double w) { return LinkSpec{1.0, {v, Q}, ReceivingDiagram{R, w, Q}}; }

}  // namespace

TEST(SendingFlow, Examples) {
  const LinkSpec e1 = routed(100, 4000, 4800, 20);
  EXPECT_DOUBLE_EQ(sending_flow(e1, 20), 2000);
  EXPECT_DOUBLE_EQ(sending_flow(e1, 0), 0);
  const LinkSpec e0{1.0, {80, 8000}, std::nullopt};
  EXPECT_DOUBLE_EQ(sending_flow(e0, 150), 8000);
  EXPECT_THROW(sending_flow(e0, -1e-3), DomainError);
}

TEST(ReceivingFlow, Examples) {
  EXPECT_DOUBLE_EQ(receiving_flow(routed(100, 4000, 4800, 20), 0), 4000);
  EXPECT_DOUBLE_EQ(receiving_flow(routed(100, 4000, 4800, 20), 240), 0);
  EXPECT_DOUBLE_EQ(receiving_flow(routed(50, 2000, 2400, 10), 100), 1400);
}

TEST(ReceivingFlow, DomainAndJamDrift) {
  const LinkSpec e1 = routed(100, 4000, 4800, 20);
  EXPECT_THROW(receiving_flow(e1, -1), DomainError);
  EXPECT_THROW(receiving_flow(e1, 240.1), DomainError);
  EXPECT_DOUBLE_EQ(receiving_flow(e1, 240 + 5e-10), 0.0);
  const LinkSpec buffer{1.0, {80, 8000}, std::nullopt};
  EXPECT_THROW(receiving_flow(buffer, 1), DomainError);
}

TEST(CriticalDensity, Examples) {
  EXPECT_DOUBLE_EQ(critical_density(SendingDiagram{80, 8000}), 100);
  EXPECT_DOUBLE_EQ(critical_density(SendingDiagram{100, 4000}), 40);
  EXPECT_DOUBLE_EQ(critical_density(SendingDiagram{1, 0}), 0);
}

TEST(JamDensity, Examples) {
  EXPECT_DOUBLE_EQ(jam_density(routed(100, 4000, 4800, 20)), 240);
  EXPECT_DOUBLE_EQ(jam_density(routed(50, 2000, 2400, 10)), 240);
  EXPECT_DOUBLE_EQ(jam_density(routed(7, 3, 3, 3)), 1);
  EXPECT_THROW(jam_density(LinkSpec{1.0, {80, 8000}, std::nullopt}), DomainError);
}

TEST(RoutingRatio, CapacityShare) {
  NetworkSpec net = default_network();
  EXPECT_DOUBLE_EQ(routing_ratio(net, State{}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(routing_ratio(net, State{500, 10, 200}), 2.0 / 3.0);
  net.e2.sending.Q = 4000;
  EXPECT_DOUBLE_EQ(capacity_ratio(net), 0.5);
  net.e2.sending.Q = 0;
  EXPECT_DOUBLE_EQ(capacity_ratio(net), 1.0);
}

TEST(FundamentalDiagram, MonotoneAndBoundedOnRandomDiagrams) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.5, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double v = 20 * u(gen), Q = 1000 * u(gen), w = 5 * u(gen);
    const double R = Q * (1.0 + 0.5 * u(gen));
    const LinkSpec link = routed(v, Q, R, w);
    const double jam = jam_density(link);
    double prev_f = -1, prev_r = 2 * Q;
    for (int k = 0; k <= 400; ++k) {
      const double x = jam * k / 400.0;
      const double f = sending_flow(link, x);
      const double r = receiving_flow(link, x);
      ASSERT_GE(f, prev_f);
      ASSERT_LE(r, prev_r);
      ASSERT_LE(f, Q);
      ASSERT_LE(r, Q);
      ASSERT_GE(r, 0.0);
      prev_f = f;
      prev_r = r;
    }
    EXPECT_NEAR(receiving_flow(link, jam), 0.0, 1e-9 * link.receiving->R);
    // Infimum property of the critical density.
    const double xc = critical_density(link);
    EXPECT_DOUBLE_EQ(sending_flow(link, xc), Q);
    for (double delta : {1e-6, 1e-3, 0.5}) EXPECT_LT(sending_flow(link, std::max(0.0, xc - delta)), Q);
  }
}

TEST(FreeFlowBound, Table1AndSaturatedSupply) {
  const NetworkSpec net = default_network();
  EXPECT_DOUBLE_EQ(free_flow_bound(net.e1), 40);
  EXPECT_DOUBLE_EQ(free_flow_bound(net.e2), 40);
  // Receiving flow stays at capacity up to (R-Q)/w = 100 > Q/v = 40.
  EXPECT_DOUBLE_EQ(free_flow_bound(routed(100, 4000, 6000, 20)), 100);
}

TEST(NetworkValidation, DefaultsPassAndStepBoundsEnforced) {
  NetworkSpec net = default_network();
  EXPECT_NO_THROW(validate(net));
  net.dt = 0.01;  // equals l/v_e1, still admissible
  EXPECT_NO_THROW(validate(net));
  net.dt = 0.0101;
  EXPECT_THROW(validate(net), ValidationError);
  net = default_network();
  net.e1.length = 0.4;  // l/v_e1 = 0.004 < dt
  EXPECT_THROW(validate(net), ValidationError);
  net = default_network();
  net.alpha = 1.2;
  EXPECT_THROW(validate(net), ValidationError);
  net = default_network();
  net.e2.receiving->R = 1000;  // R < Q
  EXPECT_THROW(validate(net), ValidationError);
  net = default_network();
  net.e2.receiving->w = 250;  // dt*w > l
  EXPECT_THROW(validate(net), ValidationError);
}
