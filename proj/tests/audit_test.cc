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

#include "dpkit/audit.h"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "dpkit/budget.h"
#include "dpkit/dataset.h"
#include "dpkit/mechanism.h"
#include "gtest/gtest.h"

namespace dpkit {
namespace {

Dataset D(std::vector<int64_t> counts) {
  return Dataset::Create(std::move(counts)).value();
}

PrivacyBudget B(double eps, double delta = 0.0) {
  return PrivacyBudget::Create(eps, delta).value();
}

std::vector<DatasetPair> BinaryPairs() {
  return {{D({0}), D({1})}, {D({1}), D({0})}};
}

Mechanism CountingLaplace(size_t n, std::vector<std::vector<size_t>> preds,
                          double eps) {
  const CountingQuerySet q = CountingQuerySet::Create(n, preds).value();
  const int64_t sens = CountingSensitivityExhaustive(q, 1).value();
  return LaplaceMechanism(
             CountingQueryFn(q), n, q.m(),
             SensitivitySpec::Create(double(sens),
                                     SensitivitySpec::Provenance::kExhaustive)
                 .value(),
             eps)
      .value();
}

// P[x_j < c] or P[x_j > c] under Lap(b, z), from the closed-form CDF.
double HalfLineProb(const std::string& event, double b, double z) {
  int j = 0;
  char op = 0;
  double c = 0.0;
  EXPECT_EQ(std::sscanf(event.c_str(), "x%d %c %lf", &j, &op, &c), 3) << event;
  const double lower = c < z ? 0.5 * std::exp((c - z) / b)
                             : 1.0 - 0.5 * std::exp(-(c - z) / b);
  return op == '<' ? lower : 1.0 - lower;
}

TEST(CheckDpExactTest, RandomizedResponseAtLogThree) {
  const Mechanism rr = RandomizedResponse(0.25).value();
  const ExactDpReport r =
      CheckDpExact(rr, BinaryPairs(), B(std::log(3.0))).value();
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.pairs_checked, 2u);
  EXPECT_FALSE(r.witness.has_value());
}

TEST(CheckDpExactTest, RandomizedResponseAtOneFailsWithWitness) {
  const Mechanism rr = RandomizedResponse(0.25).value();
  const ExactDpReport r = CheckDpExact(rr, BinaryPairs(), B(1.0)).value();
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  // The witness event reports the true input: {0} from input 0.
  const std::string expected =
      r.witness->from == D({0}) ? "{0}" : "{1}";
  EXPECT_EQ(r.witness->event, expected);
  EXPECT_EQ(r.witness->prob_from, 0.75);
  EXPECT_EQ(r.witness->prob_to, 0.25);
  EXPECT_NEAR(r.witness->gap, 0.75 - std::exp(1.0) * 0.25, 1e-15);
}

TEST(CheckDpExactTest, EmptyPairsAreVacuous) {
  const Mechanism rr = RandomizedResponse(0.5).value();
  EXPECT_TRUE(CheckDpExact(rr, {}, B(0.0))->passed);
}

TEST(CheckDpExactTest, NeedsAPmf) {
  const Mechanism lap = CountingLaplace(1, {{0}}, 1.0);
  EXPECT_EQ(CheckDpExact(lap, BinaryPairs(), B(1.0)).status().code(),
            absl::StatusCode::kUnimplemented);
}

TEST(CheckDpExactTest, PairComposeBudgetsAdd) {
  const Mechanism rr = RandomizedResponse(0.25).value();
  const Mechanism pair = PairCompose(rr, rr).value();
  EXPECT_TRUE(CheckDpExact(pair, BinaryPairs(), B(2 * std::log(3.0)))->passed);
  EXPECT_FALSE(
      CheckDpExact(pair, BinaryPairs(), B(1.5 * std::log(3.0)))->passed);
  const Mechanism with_const =
      PairCompose(rr, ConstantMechanism("c", 1)).value();
  EXPECT_TRUE(CheckDpExact(with_const, BinaryPairs(), B(std::log(3.0)))->passed);
}

TEST(CheckDpExactTest, AsymmetricAdjacencyChecksBothDirections) {
  // Input 0 answers 0 always; input 1 answers 0 with 1/2. One listed pair
  // still exposes the ratio in the reverse direction.
  const Mechanism m = RandomizedResponse(0.0).value();
  const std::vector<DatasetPair> one_way{{D({0}), D({1})}};
  EXPECT_FALSE(CheckDpExact(m, one_way, B(5.0))->passed);
}

TEST(CheckLaplaceMechanismDpTest, PassesAtDeclaredEpsilon) {
  const Mechanism m = CountingLaplace(3, {{0}, {0, 1}}, 1.0);
  const auto pairs = EnumerateAdjacentPairs(3, 2, 1).value();
  const DensityDpReport r = CheckLaplaceMechanismDp(m, pairs, B(1.0)).value();
  EXPECT_EQ(r.verdict, Verdict::kPass);
  EXPECT_EQ(r.pairs_checked, pairs.size());
  EXPECT_NEAR(r.max_certified_epsilon, 1.0, 1e-12);
}

TEST(CheckLaplaceMechanismDpTest, QuarterEpsilonYieldsVerifiedWitness) {
  const Mechanism m = CountingLaplace(3, {{0}, {1, 2}}, 1.0);
  const auto pairs = EnumerateAdjacentPairs(3, 2, 1).value();
  const DensityDpReport r = CheckLaplaceMechanismDp(m, pairs, B(0.25)).value();
  ASSERT_EQ(r.verdict, Verdict::kViolation);
  ASSERT_TRUE(r.witness.has_value());
  const DpWitness& w = *r.witness;
  int j = 0;
  ASSERT_EQ(std::sscanf(w.event.c_str(), "x%d", &j), 1);
  const auto from = m.LaplaceComponents(w.from).value();
  const auto to = m.LaplaceComponents(w.to).value();
  const double p = HalfLineProb(w.event, from[j].scale, from[j].location);
  const double q = HalfLineProb(w.event, to[j].scale, to[j].location);
  EXPECT_NEAR(w.prob_from, p, 1e-14);
  EXPECT_NEAR(w.prob_to, q, 1e-14);
  EXPECT_GT(p - std::exp(0.25) * q, 0.0);
}

TEST(CheckDpStatisticalTest, LaplaceVerdicts) {
  const Mechanism m = CountingLaplace(1, {{0}}, 1.0);
  const StatisticalAuditOptions options{.samples = 50'000, .seed = 3};
  const auto own = CheckDpStatistical(m, BinaryPairs(), B(1.0), options).value();
  EXPECT_EQ(own.verdict, Verdict::kNoViolationFound);
  EXPECT_EQ(VerdictName(own.verdict), "no-violation-found");
  const auto quarter =
      CheckDpStatistical(m, BinaryPairs(), B(0.25), options).value();
  EXPECT_EQ(quarter.verdict, Verdict::kViolation);
  EXPECT_TRUE(quarter.witness.has_value());
}

TEST(CheckDpStatisticalTest, ConstantMechanismAtZero) {
  const auto r = CheckDpStatistical(ConstantMechanism("k", 1), BinaryPairs(),
                                    B(0.0), {.samples = 5000, .seed = 1})
                     .value();
  EXPECT_EQ(r.verdict, Verdict::kNoViolationFound);
}

TEST(CheckDpStatisticalTest, FewSamplesAreInconclusive) {
  // A generous resolution would hide the gap; a tight one cannot resolve
  // it from so few draws.
  const Mechanism rr = RandomizedResponse(0.3).value();
  const auto r = CheckDpStatistical(
                     rr, BinaryPairs(), B(std::log(7.0 / 3.0)),
                     {.samples = 1000, .resolution = 0.01, .seed = 2})
                     .value();
  EXPECT_EQ(r.verdict, Verdict::kInconclusive);
}

TEST(CheckDpStatisticalTest, Deterministic) {
  const Mechanism m = CountingLaplace(1, {{0}}, 1.0);
  const StatisticalAuditOptions options{.samples = 5000, .seed = 8};
  const auto a = CheckDpStatistical(m, BinaryPairs(), B(0.5), options).value();
  const auto b = CheckDpStatistical(m, BinaryPairs(), B(0.5), options).value();
  ASSERT_EQ(a.audits.size(), b.audits.size());
  for (size_t k = 0; k < a.audits.size(); ++k) {
    EXPECT_EQ(a.audits[k].lower, b.audits[k].lower);
    EXPECT_EQ(a.audits[k].upper, b.audits[k].upper);
  }
}

TEST(GroupPrivacyTest, ThermometerResponseAtTwiceEpsilon) {
  const Mechanism rr = RandomizedResponse(0.25, 2).value();
  const GroupPrivacyReport r =
      CheckGroupPrivacy(rr, std::log(3.0), 2, 2).value();
  EXPECT_TRUE(r.precondition_met);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.chains_verified, r.pairs_checked);
}

TEST(GroupPrivacyTest, TightRatioFailsBelowTwiceEpsilon) {
  const Mechanism rr = RandomizedResponse(0.25, 2).value();
  const std::vector<DatasetPair> far{{D({0}), D({2})}};
  const ExactDpReport r =
      CheckDpExact(rr, far, B(1.5 * std::log(3.0))).value();
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
}

TEST(GroupPrivacyTest, KOneIsTheExactCheck) {
  const Mechanism rr = RandomizedResponse(0.25).value();
  const GroupPrivacyReport r =
      CheckGroupPrivacy(rr, std::log(3.0), 1, 1).value();
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.pairs_checked, 2u);
}

TEST(GroupPrivacyTest, PreconditionFailureIsReported) {
  const Mechanism rr = RandomizedResponse(0.25).value();
  const GroupPrivacyReport r = CheckGroupPrivacy(rr, 0.5, 2, 2).value();
  EXPECT_FALSE(r.precondition_met);
  EXPECT_FALSE(r.passed);
}

TEST(VerifyAdjacencyChainTest, AcceptsAndRejects) {
  const std::vector<Dataset> good{D({0, 2}), D({1, 2}), D({1, 1}), D({1, 0})};
  EXPECT_TRUE(VerifyAdjacencyChain(good, D({0, 2}), D({1, 0}), 3));
  EXPECT_FALSE(VerifyAdjacencyChain(good, D({0, 2}), D({1, 0}), 2));
  const std::vector<Dataset> jump{D({0, 2}), D({1, 0})};
  EXPECT_FALSE(VerifyAdjacencyChain(jump, D({0, 2}), D({1, 0}), 3));
  EXPECT_FALSE(VerifyAdjacencyChain({}, D({0}), D({0}), 0));
}

}  // namespace
}  // namespace dpkit
