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

#include "dpkit/dataset.h"

#include <cstdint>
#include <random>
#include <vector>

#include "absl/status/status.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dpkit {
namespace {

using ::testing::ElementsAre;

Dataset D(std::vector<int64_t> counts) {
  return Dataset::Create(std::move(counts)).value();
}

CountingQuerySet Q(size_t n, std::vector<std::vector<size_t>> predicates) {
  return CountingQuerySet::Create(n, std::move(predicates)).value();
}

TEST(DatasetTest, RejectsNegativeCounts) {
  EXPECT_EQ(Dataset::Create({1, -1}).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(DatasetTest, NthTotalFallsBackToDefault) {
  const Dataset d = D({4, 7});
  EXPECT_EQ(d.CountOr0(1), 7);
  EXPECT_EQ(d.CountOr0(2), 0);
  const std::vector<int> xs{1, 2};
  EXPECT_EQ(NthTotal<int>(xs, 5, -3), -3);
}

TEST(DistL1Test, Examples) {
  EXPECT_EQ(*DistL1(D({1, 2}), D({2, 2})), 1);
  EXPECT_EQ(*DistL1(D({3, 3}), D({3, 3})), 0);
  EXPECT_EQ(*DistL1(D({0, 2, 1}), D({1, 0, 1})), 3);
}

TEST(DistL1Test, LengthMismatchIsAnError) {
  EXPECT_FALSE(DistL1(D({1}), D({1, 2})).ok());
  EXPECT_FALSE(IsAdjacent(D({1}), D({1, 2}), 1).ok());
}

TEST(DistL1Test, MetricAxiomsOnRandomTriples) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int64_t> entry(0, 6);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<int64_t> a(4), b(4), c(4);
    for (int k = 0; k < 4; ++k) {
      a[k] = entry(gen);
      b[k] = entry(gen);
      c[k] = entry(gen);
    }
    const Dataset x = D(a), y = D(b), z = D(c);
    EXPECT_EQ(*DistL1(x, y), *DistL1(y, x));
    EXPECT_LE(*DistL1(x, z), *DistL1(x, y) + *DistL1(y, z));
    EXPECT_EQ(*DistL1(x, y) == 0, x == y);
  }
}

TEST(IsAdjacentTest, Examples) {
  EXPECT_TRUE(*IsAdjacent(D({1, 0}), D({0, 0}), 1));
  EXPECT_FALSE(*IsAdjacent(D({2, 0}), D({0, 0}), 1));
  EXPECT_TRUE(*IsAdjacent(D({0, 2}), D({1, 0}), 3));
}

TEST(AdjacencyRelationTest, SymmetricMembership) {
  const AdjacencyRelation r = AdjacencyRelation::Create(2, 1).value();
  EXPECT_TRUE(*r.Contains(D({1, 0}), D({0, 0})));
  EXPECT_TRUE(*r.Contains(D({0, 0}), D({1, 0})));
  EXPECT_FALSE(*r.Contains(D({1, 1}), D({0, 0})));
  EXPECT_FALSE(r.Contains(D({1}), D({0})).ok());
  EXPECT_FALSE(AdjacencyRelation::Create(2, -1).ok());
}

TEST(AdjacencyChainTest, GreedyWalk) {
  EXPECT_THAT(*AdjacencyChain(D({0, 2}), D({1, 0}), 3),
              ElementsAre(D({0, 2}), D({1, 2}), D({1, 1}), D({1, 0})));
  EXPECT_THAT(*AdjacencyChain(D({5}), D({5}), 0), ElementsAre(D({5})));
  EXPECT_THAT(*AdjacencyChain(D({0}), D({1}), 1), ElementsAre(D({0}), D({1})));
}

TEST(AdjacencyChainTest, InfeasibleRadius) {
  EXPECT_EQ(AdjacencyChain(D({0, 2}), D({1, 0}), 2).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(AdjacencyChainTest, ChainsVerifyOnAllSmallPairs) {
  const auto pairs = EnumerateAdjacentPairs(3, 2, 3).value();
  for (const auto& [a, b] : pairs) {
    const int64_t dist = *DistL1(a, b);
    const auto chain = AdjacencyChain(a, b, dist).value();
    ASSERT_LE(chain.size(), static_cast<size_t>(dist) + 1);
    EXPECT_EQ(chain.front(), a);
    EXPECT_EQ(chain.back(), b);
    for (size_t t = 0; t + 1 < chain.size(); ++t) {
      EXPECT_LE(*DistL1(chain[t], chain[t + 1]), 1);
    }
  }
}

TEST(CountingTest, Examples) {
  EXPECT_EQ(*Counting(Q(3, {{0, 2}}), 0, D({2, 0, 1})), 3);
  EXPECT_EQ(*Counting(Q(2, {{}}), 0, D({9, 9})), 0);
  EXPECT_EQ(*Counting(Q(3, {{0}, {1}}), 1, D({4, 7, 1})), 7);
}

TEST(CountingTest, IndexOutOfRange) {
  EXPECT_EQ(Counting(Q(2, {{0}}), 1, D({1, 1})).status().code(),
            absl::StatusCode::kOutOfRange);
}

TEST(CountingQuerySetTest, RejectsPredicateOutsideDomain) {
  EXPECT_FALSE(CountingQuerySet::Create(2, {{0, 2}}).ok());
}

TEST(CountingQueryTest, Examples) {
  EXPECT_THAT(*CountingQuery(Q(2, {{0}, {0, 1}}), D({3, 1})),
              ElementsAre(3, 4));
  EXPECT_THAT(*CountingQuery(Q(1, {}), D({1})), ElementsAre());
  EXPECT_THAT(*CountingQuery(Q(2, {{0}, {0}, {0}}), D({2, 5})),
              ElementsAre(2, 2, 2));
}

TEST(SensitivityTest, Examples) {
  EXPECT_EQ(*CountingSensitivityExhaustive(Q(2, {{0}}), 2), 1);
  EXPECT_EQ(*CountingSensitivityExhaustive(Q(2, {{0}, {0}}), 2), 2);
  EXPECT_EQ(*CountingSensitivityExhaustive(Q(1, {{}}), 1), 0);
}

TEST(SensitivityTest, BudgetExceeded) {
  EXPECT_EQ(CountingSensitivityExhaustive(Q(8, {{0}}), 9, 1000)
                .status()
                .code(),
            absl::StatusCode::kResourceExhausted);
}

TEST(EnumerateTest, CountsMatchCombinatorics) {
  EXPECT_EQ(EnumerateDatasets(3, 2)->size(), 27u);
  // Each of 27 datasets has one neighbor per coordinate move that stays in
  // range: 2 moves on interior entries, 1 on boundary entries.
  EXPECT_EQ(EnumerateAdjacentPairs(3, 2, 1)->size(), 108u);
}

// For 1-adjacent histograms every counting tuple moves by the same
// sign, each coordinate by at most one.
TEST(CountingDichotomyTest, ExhaustiveSmallInstances) {
  for (size_t n = 1; n <= 4; ++n) {
    const auto pairs = EnumerateAdjacentPairs(n, 3, 1).value();
    // All predicates over n types, then all tuples of up to 3 of them.
    std::vector<std::vector<size_t>> subsets;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<size_t> s;
      for (size_t t = 0; t < n; ++t) {
        if (mask >> t & 1) s.push_back(t);
      }
      subsets.push_back(s);
    }
    for (size_t a = 0; a < subsets.size(); ++a) {
      for (size_t b = a; b < subsets.size(); ++b) {
        const CountingQuerySet q = Q(n, {subsets[a], subsets[b], subsets[0]});
        for (const auto& [x, y] : pairs) {
          const auto cx = CountingQuery(q, x).value();
          const auto cy = CountingQuery(q, y).value();
          bool case_a = true, case_b = true;
          for (size_t j = 0; j < cx.size(); ++j) {
            case_a &= cx[j] >= cy[j] && cx[j] <= cy[j] + 1;
            case_b &= cy[j] >= cx[j] && cy[j] <= cx[j] + 1;
          }
          ASSERT_TRUE(case_a || case_b);
        }
      }
    }
  }
}

TEST(CountingMonotoneTest, OneLipschitzPerCoordinate) {
  const CountingQuerySet q = Q(3, {{0, 2}, {1}, {}});
  const std::vector<Dataset> all = EnumerateDatasets(3, 3).value();
  for (const Dataset& d : all) {
    const auto base = CountingQuery(q, d).value();
    for (size_t t = 0; t < 3; ++t) {
      std::vector<int64_t> bumped(d.counts().begin(), d.counts().end());
      ++bumped[t];
      const auto up = CountingQuery(q, D(bumped)).value();
      for (size_t j = 0; j < base.size(); ++j) {
        EXPECT_GE(up[j], base[j]);
        EXPECT_LE(up[j], base[j] + 1);
      }
    }
  }
}

}  // namespace
}  // namespace dpkit
