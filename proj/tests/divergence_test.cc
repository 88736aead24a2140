//
// Copyright 2026 The dpkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpkit/divergence.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "dpkit/laplace.h"
#include "dpkit/random.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dpkit {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;

DiscreteDistribution Dist(std::vector<std::pair<std::string, double>> m) {
  return DiscreteDistribution::Create(std::move(m)).value();
}

// 1 - exp((eps - s/b)/2) for 0 <= eps < s/b, else 0. Obtained by integrating
// the two densities up to their single crossing point.
double LaplacePairClosedForm(double b, double s, double eps) {
  const double a = std::abs(s) / b;
  return eps < a ? 1.0 - std::exp((eps - a) / 2.0) : 0.0;
}

TEST(DiscreteDistributionTest, Validation) {
  EXPECT_FALSE(DiscreteDistribution::Create({{"a", 0.5}, {"b", 0.4}}).ok());
  EXPECT_FALSE(DiscreteDistribution::Create({{"a", 1.2}, {"b", -0.2}}).ok());
  EXPECT_FALSE(DiscreteDistribution::Create({{"a", 0.5}, {"a", 0.5}}).ok());
  EXPECT_FALSE(DiscreteDistribution::Create({{"a", std::nan("")}}).ok());
  const DiscreteDistribution d = Dist({{"b", 0.25}, {"a", 0.75}});
  EXPECT_THAT(d.Labels(), ElementsAre("a", "b"));
  EXPECT_EQ(d.Prob("a"), 0.75);
  EXPECT_EQ(d.Prob("zz"), 0.0);
}

TEST(DiscreteDistributionTest, SampleFrequencies) {
  const DiscreteDistribution d = Dist({{"x", 0.2}, {"y", 0.8}});
  RandomSource rng(4);
  int x = 0;
  for (int k = 0; k < 100'000; ++k) x += d.Sample(rng) == "x";
  EXPECT_NEAR(x / 1e5, 0.2, 4 * std::sqrt(0.2 * 0.8 / 1e5));
}

TEST(DivergenceDiscreteTest, Examples) {
  const DiscreteDistribution mu = Dist({{"a", 0.3}, {"b", 0.7}});
  EXPECT_EQ(DivergenceDiscrete(mu, mu, 0.0)->value, 0.0);
  EXPECT_EQ(DivergenceDiscrete(DiscreteDistribution::PointMass("a"),
                               DiscreteDistribution::PointMass("b"), 0.0)
                ->value,
            1.0);
  const auto r = DivergenceDiscrete(Dist({{"a", 0.6}, {"b", 0.4}}),
                                    Dist({{"a", 0.4}, {"b", 0.6}}), 0.0);
  EXPECT_NEAR(r->value, 0.2, 1e-15);
  EXPECT_EQ(r->method, DivergenceMethod::kExactDiscrete);
  EXPECT_EQ(r->error_bound, 0.0);
  EXPECT_EQ(DivergenceMethodName(r->method), "exact-discrete");
}

TEST(DivergenceDiscreteTest, WitnessIsTheMaximizingSet) {
  const DiscreteDistribution mu = Dist({{"a", 0.5}, {"b", 0.3}, {"c", 0.2}});
  const DiscreteDistribution nu = Dist({{"a", 0.1}, {"b", 0.3}, {"c", 0.6}});
  EXPECT_THAT(DivergenceWitness(mu, nu, 0.0), ElementsAre("a"));
  EXPECT_NEAR(DivergenceDiscrete(mu, nu, 0.0)->value, 0.4, 1e-15);
}

TEST(DivergenceBruteForceTest, Examples) {
  const DiscreteDistribution a = DiscreteDistribution::PointMass("a");
  EXPECT_NEAR(DivergenceBruteForce(a, a, -1.0)->value, 1.0 - std::exp(-1.0),
              1e-15);
  const DiscreteDistribution u =
      Dist({{"x", 1.0 / 3}, {"y", 1.0 / 3}, {"z", 1.0 / 3}});
  EXPECT_EQ(DivergenceBruteForce(u, u, 0.0)->value, 0.0);
}

TEST(DivergenceBruteForceTest, CapacityError) {
  std::vector<std::pair<std::string, double>> m;
  for (int k = 0; k < 21; ++k) m.emplace_back(std::to_string(k), 1.0 / 21);
  const DiscreteDistribution d = Dist(m);
  EXPECT_EQ(DivergenceBruteForce(d, d, 0.0).status().code(),
            absl::StatusCode::kResourceExhausted);
}

TEST(DivergenceBruteForceTest, MatchesHockeyStickSum) {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> size(1, 10);
  std::exponential_distribution<double> w(1.0);
  std::uniform_real_distribution<double> e(-1.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = size(gen);
    std::vector<double> a(k), b(k);
    double sa = 0, sb = 0;
    for (int j = 0; j < k; ++j) sa += a[j] = w(gen), sb += b[j] = w(gen);
    std::vector<std::pair<std::string, double>> ma, mb;
    for (int j = 0; j < k; ++j) {
      ma.emplace_back(std::to_string(j), a[j] / sa);
      mb.emplace_back(std::to_string(j), b[j] / sb);
    }
    const double eps = e(gen);
    const DiscreteDistribution mu = Dist(ma), nu = Dist(mb);
    EXPECT_NEAR(DivergenceDiscrete(mu, nu, eps)->value,
                DivergenceBruteForce(mu, nu, eps)->value, 1e-12);
  }
}

TEST(EventBoundEquivalenceTest, AllEventsBoundedIffDivergenceBounded) {
  const DiscreteDistribution mu = Dist({{"a", 0.6}, {"b", 0.4}});
  const DiscreteDistribution nu = Dist({{"a", 0.4}, {"b", 0.6}});
  EXPECT_TRUE(*AllEventsBounded(mu, nu, 0.0, 0.2 + 1e-12));
  EXPECT_FALSE(*AllEventsBounded(mu, nu, 0.0, 0.19));
  EXPECT_TRUE(*AllEventsBounded(mu, nu, std::log(1.5), 0.0));
}

TEST(PushforwardTest, MixesRows) {
  const DiscreteDistribution mu = Dist({{"0", 0.25}, {"1", 0.75}});
  const DiscreteKernel f({{"0", Dist({{"x", 0.5}, {"y", 0.5}})},
                          {"1", DiscreteDistribution::PointMass("y")}});
  const DiscreteDistribution out = Pushforward(mu, f).value();
  EXPECT_DOUBLE_EQ(out.Prob("x"), 0.125);
  EXPECT_DOUBLE_EQ(out.Prob("y"), 0.875);
}

TEST(PushforwardTest, MissingRowIsAnError) {
  const DiscreteKernel f({{"0", DiscreteDistribution::PointMass("y")}});
  EXPECT_EQ(Pushforward(DiscreteDistribution::PointMass("1"), f)
                .status()
                .code(),
            absl::StatusCode::kNotFound);
}

TEST(ComposabilityTest, ReflexiveInstance) {
  const DiscreteDistribution mu = Dist({{"0", 0.5}, {"1", 0.5}});
  const DiscreteKernel f({{"0", Dist({{"a", 0.9}, {"b", 0.1}})},
                          {"1", Dist({{"a", 0.2}, {"b", 0.8}})}});
  const ComposabilityCheck c =
      CheckComposability(mu, mu, f, f, 0.0, 0.0, 0.0, 0.0).value();
  EXPECT_TRUE(c.precondition_met);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.composed_divergence, 0.0);
}

TEST(ComposabilityTest, RandomizedResponseWithConstantKernels) {
  const DiscreteDistribution mu = Dist({{"0", 0.75}, {"1", 0.25}});
  const DiscreteDistribution nu = Dist({{"0", 0.25}, {"1", 0.75}});
  const DiscreteKernel k({{"0", DiscreteDistribution::PointMass("c")},
                          {"1", DiscreteDistribution::PointMass("c")}});
  const ComposabilityCheck c =
      CheckComposability(mu, nu, k, k, std::log(3.0), 0.0, 0.0, 0.0).value();
  EXPECT_TRUE(c.precondition_met);
  EXPECT_TRUE(c.holds);
}

TEST(ComposabilityTest, PreconditionViolationIsReported) {
  const DiscreteDistribution mu = Dist({{"0", 0.75}, {"1", 0.25}});
  const DiscreteDistribution nu = Dist({{"0", 0.25}, {"1", 0.75}});
  const DiscreteKernel k({{"0", DiscreteDistribution::PointMass("0")},
                          {"1", DiscreteDistribution::PointMass("1")}});
  const ComposabilityCheck c =
      CheckComposability(mu, nu, k, k, 0.5, 0.0, 0.0, 0.0).value();
  EXPECT_FALSE(c.precondition_met);
  EXPECT_FALSE(c.detail.empty());
}

TEST(ComposabilityTest, MismatchedKernelDomains) {
  const DiscreteDistribution mu = DiscreteDistribution::PointMass("0");
  const DiscreteKernel f({{"0", mu}});
  const DiscreteKernel g({{"1", mu}});
  EXPECT_FALSE(CheckComposability(mu, mu, f, g, 0, 0, 0, 0).ok());
}

TEST(TransitivityTest, BernoulliChainWithMinimalEpsilons) {
  auto bern = [](double p) { return Dist({{"0", 1 - p}, {"1", p}}); };
  const DiscreteDistribution a = bern(0.5), b = bern(0.6), c = bern(0.7);
  auto minimal = [](double p, double q) {
    return std::max(std::log(p / q), std::log((1 - p) / (1 - q)));
  };
  const TransitivityCheck t =
      CheckTransitivity(a, b, c, minimal(0.5, 0.6), minimal(0.6, 0.7));
  EXPECT_TRUE(t.precondition_met);
  EXPECT_TRUE(t.holds);
  const TransitivityCheck same = CheckTransitivity(a, a, a, 0.0, 0.0);
  EXPECT_TRUE(same.holds);
  EXPECT_FALSE(CheckTransitivity(a, c, a, 0.0, 0.0).precondition_met);
}

TEST(DivergenceLaplaceTest, Examples) {
  const auto at_ratio = DivergenceLaplacePair(1.0, 0.0, 1.0, 1.0, 1e-9);
  EXPECT_LE(std::abs(at_ratio->value), 1e-9);
  EXPECT_EQ(at_ratio->method, DivergenceMethod::kQuadrature);
  EXPECT_EQ(at_ratio->error_bound, 1e-9);
  EXPECT_LE(DivergenceLaplacePair(1.0, 0.0, 0.0, 0.0, 1e-9)->value, 1e-9);
  EXPECT_NEAR(DivergenceLaplacePair(1.0, 0.0, 1.0, 0.5, 1e-10)->value,
              1.0 - std::exp(-0.25), 1e-9);
}

TEST(DivergenceLaplaceTest, MatchesClosedFormOnRandomPairs) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> b(0.2, 4.0), s(-6.0, 6.0),
      e(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double scale = b(gen), shift = s(gen), eps = e(gen);
    EXPECT_NEAR(DivergenceLaplacePair(scale, 0.0, shift, eps, 1e-10)->value,
                LaplacePairClosedForm(scale, shift, eps), 1e-9)
        << scale << " " << shift << " " << eps;
  }
}

TEST(DivergenceLaplaceTest, UnequalScalesAgainstRiemannSum) {
  const LaplaceDistribution mu{0.7, 0.0}, nu{1.6, 0.9};
  const double eps = 0.3;
  const double lo = -40.0, hi = 60.0;
  const int n = 2'000'000;
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = lo + (k + 0.5) * h;
    const double f = std::exp(-std::abs(t) / 0.7) / 1.4;
    const double g = std::exp(-std::abs(t - 0.9) / 1.6) / 3.2;
    sum += std::max(0.0, f - std::exp(eps) * g);
  }
  EXPECT_NEAR(DivergenceLaplace(mu, nu, eps, 1e-10)->value, sum * h, 1e-8);
}

TEST(DivergenceLaplaceTest, MonotoneInEpsilon) {
  double prev = 2.0;
  for (double eps = 0.0; eps <= 2.0; eps += 0.1) {
    const double v = DivergenceLaplacePair(1.0, 0.0, 1.5, eps, 1e-10)->value;
    EXPECT_LE(v, prev + 2e-10);
    prev = v;
  }
}

TEST(DivergenceLaplaceTest, RejectsPointMassesAndBadTolerance) {
  EXPECT_FALSE(DivergenceLaplace({0.0, 0.0}, {1.0, 0.0}, 0.0, 1e-9).ok());
  EXPECT_FALSE(DivergenceLaplacePair(1.0, 0.0, 1.0, 0.0, 0.0).ok());
}

TEST(LaplacePairBreakpointsTest, ContainsCrossing) {
  const std::vector<double> cuts =
      LaplacePairBreakpoints({1.0, 0.0}, {1.0, 1.0}, 0.5);
  // f_mu = e^0.5 f_nu solves 1 - 2t = 0.5 between the locations.
  EXPECT_THAT(cuts, ElementsAre(0.0, DoubleNear(0.25, 1e-15), 1.0));
}

TEST(ClopperPearsonTest, BoundaryCases) {
  const auto [lo0, hi0] = ClopperPearson(0, 10, 0.05);
  EXPECT_EQ(lo0, 0.0);
  EXPECT_NEAR(hi0, 1.0 - std::pow(0.025, 0.1), 1e-12);
  const auto [lo1, hi1] = ClopperPearson(10, 10, 0.05);
  EXPECT_NEAR(lo1, std::pow(0.025, 0.1), 1e-12);
  EXPECT_EQ(hi1, 1.0);
  const auto [lo, hi] = ClopperPearson(50, 100, 0.05);
  EXPECT_NEAR(lo, 0.3983, 1e-4);
  EXPECT_NEAR(hi, 0.6017, 1e-4);
}

Sampler LaplaceSampler(double b, double z) {
  return [b, z](RandomSource& rng) {
    return Outcome(std::vector<double>{LaplaceSample({b, z}, rng)});
  };
}

std::vector<Event> PilotEvents(double z0, double z1) {
  RandomSource rng(99);
  std::vector<double> pilot;
  for (int k = 0; k < 2000; ++k) {
    pilot.push_back(LaplaceSample({1.0, z0}, rng));
    pilot.push_back(LaplaceSample({1.0, z1}, rng));
  }
  return QuantileIntervalEvents(pilot, 10);
}

TEST(DivergenceMonteCarloTest, IdenticalSamplersAreConsistentWithZero) {
  const std::vector<Event> events = PilotEvents(0.0, 0.0);
  const auto r =
      DivergenceMonteCarlo(LaplaceSampler(1, 0), LaplaceSampler(1, 0), events,
                           0.0, {.samples = 50'000}, RandomSource(1))
          .value();
  EXPECT_LE(r.result.value, r.result.error_bound);
  EXPECT_EQ(r.result.method, DivergenceMethod::kMonteCarlo);
}

TEST(DivergenceMonteCarloTest, BracketsQuadratureTruth) {
  const std::vector<Event> events = PilotEvents(0.0, 1.0);
  for (double eps : {0.2, 1.0}) {
    const auto r = DivergenceMonteCarlo(LaplaceSampler(1, 0),
                                        LaplaceSampler(1, 1), events, eps,
                                        {.samples = 200'000}, RandomSource(2))
                       .value();
    const double truth = LaplacePairClosedForm(1.0, 1.0, eps);
    EXPECT_LE(r.lower, truth);
    EXPECT_GE(r.upper, truth * 0.9);  // the event family is restricted
    EXPECT_LE(r.upper, truth + 0.05);
    if (eps == 0.2) {
      EXPECT_GT(r.lower, 0.0);
      ASSERT_TRUE(r.witness.has_value());
    }
  }
}

TEST(DivergenceMonteCarloTest, Deterministic) {
  const std::vector<Event> events = PilotEvents(0.0, 1.0);
  auto run = [&] {
    return DivergenceMonteCarlo(LaplaceSampler(1, 0), LaplaceSampler(1, 1),
                                events, 0.5, {.samples = 20'000},
                                RandomSource(5))
        ->result.value;
  };
  EXPECT_EQ(run(), run());
}

TEST(DivergenceMonteCarloTest, Validation) {
  const std::vector<Event> events = PilotEvents(0.0, 1.0);
  const Sampler s = LaplaceSampler(1, 0);
  const RandomSource rng(0);
  EXPECT_FALSE(DivergenceMonteCarlo(s, s, {}, 0.0, {}, rng).ok());
  EXPECT_FALSE(
      DivergenceMonteCarlo(s, s, events, 0.0, {.samples = 999}, rng).ok());
  EXPECT_FALSE(
      DivergenceMonteCarlo(s, s, events, 0.0, {.alpha = 1.0}, rng).ok());
}

TEST(LabelSubsetEventsTest, SmallFamiliesAreExhaustive) {
  const std::vector<std::string> labels{"a", "b", "c"};
  EXPECT_EQ(LabelSubsetEvents(labels).size(), 7u);
  std::vector<std::string> many;
  for (int k = 0; k < 20; ++k) many.push_back(std::to_string(k));
  EXPECT_EQ(LabelSubsetEvents(many, 12).size(), 40u);
}

}  // namespace
}  // namespace dpkit
