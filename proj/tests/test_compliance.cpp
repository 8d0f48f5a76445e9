#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tollnet/compliance.hpp"
#include "tollnet/quadrature.hpp"

using namespace tollnet;

TEST(GaussLegendre, SixteenNodeRuleIntegratesHighDegreeExactly) {
  const auto& rule = gauss_legendre<16>();
  double wsum = 0.0;
  for (double w : rule.weights) wsum += w;
  EXPECT_NEAR(wsum, 2.0, 1e-14);
  for (int deg : {2, 10, 20, 30}) {
    double s = 0.0;
    for (std::size_t i = 0; i < 16; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], deg);
    EXPECT_NEAR(s, 2.0 / (deg + 1), 1e-13) << "degree " << deg;
  }
  for (std::size_t i = 1; i < 16; ++i) EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
}

TEST(MeanCompliance, Table1Examples) {
  const auto spec = default_compliance();
  EXPECT_NEAR(mean_compliance(spec, RoutedLink::e1, State{0, 0, 0}, 0), 1 / (1 + std::exp(-4.0)), 1e-15);
  EXPECT_NEAR(mean_compliance(spec, RoutedLink::e1, State{0, 0, 0}, 0), 0.98201, 5e-6);
  EXPECT_NEAR(mean_compliance(spec, RoutedLink::e2, State{0, 0, 0}, 0), 0.26894, 5e-6);
  EXPECT_NEAR(mean_compliance(spec, RoutedLink::e2, State{0, 0, 0}, 5), 0.88080, 5e-6);
}

TEST(Support, Examples) {
  auto s = support(0.98201, 0.1);
  EXPECT_NEAR(s.lo, 0.88201, 1e-12);
  EXPECT_DOUBLE_EQ(s.hi, 1.0);
  s = support(0.5, 0.0);
  EXPECT_DOUBLE_EQ(s.lo, 0.5);
  EXPECT_DOUBLE_EQ(s.hi, 0.5);
  s = support(0.26894, 0.1);
  EXPECT_NEAR(s.lo, 0.16894, 1e-12);
  EXPECT_NEAR(s.hi, 0.36894, 1e-12);
}

TEST(Sample, DegenerateSupportReturnsMean) {
  auto spec = default_compliance();
  spec.e1.eps = spec.e2.eps = 0.0;
  Rng rng(1);
  const State x{100, 10, 20};
  const auto c = sample(spec, x, 3.0, rng);
  EXPECT_EQ(c.c1, mean_compliance(spec, RoutedLink::e1, x, 3.0));
  EXPECT_EQ(c.c2, mean_compliance(spec, RoutedLink::e2, x, 3.0));
}

TEST(Sample, EmpiricalMeanAndSupportMembership) {
  const auto spec = default_compliance();
  const State x{100, 0, 0};
  const double p = 0.0;
  const auto s1 = support(spec, RoutedLink::e1, x, p);
  const auto s2 = support(spec, RoutedLink::e2, x, p);
  Rng rng(42);
  const int n = 100000;
  double sum1 = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const auto c = sample(spec, x, p, rng);
    ASSERT_TRUE(s1.contains(c.c1));
    ASSERT_TRUE(s2.contains(c.c2));
    sum1 += c.c1;
    sum2 += c.c2;
  }
  // Uniform on [lo, hi]: mean (lo+hi)/2, standard deviation (hi-lo)/sqrt(12).
  const double se1 = s1.width() / std::sqrt(12.0) / std::sqrt(n);
  const double se2 = s2.width() / std::sqrt(12.0) / std::sqrt(n);
  EXPECT_NEAR(sum1 / n, s1.midpoint(), 3 * se1);
  EXPECT_NEAR(sum2 / n, s2.midpoint(), 3 * se2);
}

TEST(Sample, DeterministicPerSeed) {
  const auto spec = default_compliance();
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    const auto ca = sample(spec, State{100, 5, 5}, 2.0, a);
    const auto cb = sample(spec, State{100, 5, 5}, 2.0, b);
    ASSERT_EQ(ca.c1, cb.c1);
    ASSERT_EQ(ca.c2, cb.c2);
  }
}

TEST(MeanCompliance, MonotonicityAssumptionsHoldForTable1) {
  const auto spec = default_compliance();
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ux(0, 240), up(0, 20), ud(0, 5);
  for (int i = 0; i < 2000; ++i) {
    const State x{100, ux(gen), ux(gen)};
    const double p = up(gen), d = ud(gen);
    const double m1 = mean_compliance(spec, RoutedLink::e1, x, p);
    const double m2 = mean_compliance(spec, RoutedLink::e2, x, p);
    EXPECT_LE(mean_compliance(spec, RoutedLink::e1, State{100, x.x1 + d, x.x2}, p), m1);
    EXPECT_LE(mean_compliance(spec, RoutedLink::e1, x, p + d), m1);
    EXPECT_GE(mean_compliance(spec, RoutedLink::e1, State{100, x.x1, x.x2 + d}, p), m1);
    EXPECT_GE(mean_compliance(spec, RoutedLink::e2, State{100, x.x1 + d, x.x2}, p), m2);
    EXPECT_GE(mean_compliance(spec, RoutedLink::e2, x, p + d), m2);
    EXPECT_LE(mean_compliance(spec, RoutedLink::e2, State{100, x.x1, x.x2 + d}, p), m2);
  }
}

TEST(ComplianceValidation, EpsRangeIsHardSignsAreWarnings) {
  auto spec = default_compliance();
  EXPECT_TRUE(validate(spec).empty());
  spec.e1.beta3 = -0.3;
  spec.e2.beta1 = 0.5;
  EXPECT_EQ(validate(spec).size(), 2u);
  spec = default_compliance();
  spec.e2.eps = -0.1;
  EXPECT_THROW(validate(spec), ValidationError);
  spec.e2.eps = 1.5;
  EXPECT_THROW(validate(spec), ValidationError);
}

TEST(ExpectedFlows, PointMassMatchesDirectEvaluation) {
  const auto net = default_network();
  auto spec = default_compliance();
  spec.e1.eps = spec.e2.eps = 0.0;
  for (const State x : {State{100, 0, 0}, State{50, 20, 30}, State{130, 240, 10}}) {
    for (double p : {0.0, 5.0, 12.0}) {
      const auto e = expected_interlink_flows(net, spec, x, p);
      const auto q = oracle::direct_flows(net, x.x0, x.x1, x.x2, oracle::logistic(spec.e1, x.x1, x.x2, p),
                                          oracle::logistic(spec.e2, x.x1, x.x2, p));
      EXPECT_NEAR(e.q1, q.q1, 1e-9);
      EXPECT_NEAR(e.q2, q.q2, 1e-9);
    }
  }
}

TEST(ExpectedFlows, HandEvaluatedTable1Point) {
  auto spec = default_compliance();
  spec.e1.eps = spec.e2.eps = 0.0;
  const auto e = expected_interlink_flows(default_network(), spec, State{100, 0, 0}, 0.0);
  EXPECT_NEAR(e.q1, 4000.0, 1e-9);
  EXPECT_NEAR(e.q2, 813.1, 0.1);
}

TEST(ExpectedFlows, QuadratureMatchesMonteCarlo) {
  const auto net = default_network();
  const auto spec = default_compliance();
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ux0(0, 200), ux(0, 240), up(0, 20);
  for (int i = 0; i < 10; ++i) {
    const State x{ux0(gen), ux(gen), ux(gen)};
    const double p = up(gen);
    const auto e = expected_interlink_flows(net, spec, x, p);
    const auto mc = oracle::monte_carlo_flows(net, spec, x.x0, x.x1, x.x2, p, 200000, 1000 + i);
    EXPECT_NEAR(e.q1, mc.q1, 1e-3 * 8000);
    EXPECT_NEAR(e.q2, mc.q2, 1e-3 * 8000);
  }
}

TEST(ExpectedFlows, CappedByCapacityAndSupply) {
  const auto net = default_network();
  const auto spec = default_compliance();
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ux0(0, 300), ux(0, 240), up(0, 20);
  for (int i = 0; i < 500; ++i) {
    const State x{ux0(gen), ux(gen), ux(gen)};
    const auto e = expected_interlink_flows(net, spec, x, up(gen));
    EXPECT_GE(e.q1, 0.0);
    EXPECT_GE(e.q2, 0.0);
    EXPECT_LE(e.q1, std::min(8000.0, 4000.0) + 1e-9);
    EXPECT_LE(e.q2, std::min(8000.0, 2000.0) + 1e-9);
    EXPECT_LE(e.q1, receiving_flow(net.e1, x.x1) + 1e-9);
    EXPECT_LE(e.q2, receiving_flow(net.e2, x.x2) + 1e-9);
  }
}

TEST(ExpectedFlows, ContinuousInState) {
  // Changes under small perturbations stay within a Lipschitz envelope
  // measured on a coarser step.
  const auto net = default_network();
  const auto spec = default_compliance();
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> ux(1, 239), up(0, 20);
  for (int i = 0; i < 100; ++i) {
    const State x{100, ux(gen), ux(gen)};
    const double p = up(gen);
    const auto base = expected_interlink_flows(net, spec, x, p);
    for (double h : {1e-2, 1e-4}) {
      const auto moved = expected_interlink_flows(net, spec, State{100, x.x1 + h, x.x2 - h}, p);
      // |dE[q]/dx| is bounded by the receiving slope w plus the compliance
      // sensitivity Q0 * (|beta1| + |beta2|).
      const double bound = (20.0 + 8000.0 * 0.05) * 2 * h;
      EXPECT_LE(std::abs(moved.q1 - base.q1), bound);
      EXPECT_LE(std::abs(moved.q2 - base.q2), bound);
    }
  }
}
