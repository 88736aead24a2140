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

#include "dpkit/budget.h"

#include "absl/status/status.h"
#include "gtest/gtest.h"

namespace dpkit {
namespace {

using Kind = CompositionNode::Kind;

PrivacyBudget B(double eps, double delta) {
  return PrivacyBudget::Create(eps, delta).value();
}

CompositionNode Leaf(double eps, double delta = 0.0) {
  CompositionNode node;
  node.epsilon = eps;
  node.delta = delta;
  return node;
}

TEST(PrivacyBudgetTest, Validation) {
  EXPECT_FALSE(PrivacyBudget::Create(-0.1, 0.0).ok());
  EXPECT_FALSE(PrivacyBudget::Create(1.0, -1e-9).ok());
  EXPECT_FALSE(PrivacyBudget::Create(INFINITY, 0.0).ok());
  EXPECT_TRUE(PrivacyBudget::Create(0.0, 0.0).ok());
}

TEST(BudgetOpsTest, Examples) {
  const PrivacyBudget sum = AddBudgets(B(1, 0), B(2, 0.1));
  EXPECT_EQ(sum.epsilon(), 3.0);
  EXPECT_EQ(sum.delta(), 0.1);

  const PrivacyBudget group = GroupBudget(B(0.5, 0), 3).value();
  EXPECT_EQ(group.epsilon(), 1.5);
  EXPECT_EQ(group.delta(), 0.0);

  EXPECT_TRUE(CanWeaken(B(1, 0), B(1, 0)));
  EXPECT_TRUE(CanWeaken(B(1, 0), B(2, 0.1)));
  EXPECT_FALSE(CanWeaken(B(1, 0), B(0.5, 0)));
  EXPECT_FALSE(CanWeaken(B(1, 0.1), B(1, 0)));
}

TEST(BudgetOpsTest, GroupNeedsPureBudget) {
  EXPECT_EQ(GroupBudget(B(0.5, 0.01), 2).status().code(),
            absl::StatusCode::kUnimplemented);
}

TEST(FoldCompositionTest, SequentialAndAdaptiveAdd) {
  const CompositionNode seq{.kind = Kind::kSequential,
                            .children = {Leaf(1), Leaf(2)}};
  EXPECT_EQ(FoldComposition(seq)->epsilon(), 3.0);
  const CompositionNode adaptive{.kind = Kind::kAdaptive,
                                 .children = {Leaf(0.5, 0.01), Leaf(0.25)}};
  EXPECT_EQ(FoldComposition(adaptive)->epsilon(), 0.75);
  EXPECT_EQ(FoldComposition(adaptive)->delta(), 0.01);
}

TEST(FoldCompositionTest, PostProcessIsIdentityAndGroupMultiplies) {
  const CompositionNode post{.kind = Kind::kPostProcess,
                             .children = {Leaf(0.7, 0.02)}};
  EXPECT_EQ(FoldComposition(post)->epsilon(), 0.7);
  EXPECT_EQ(FoldComposition(post)->delta(), 0.02);
  const CompositionNode group{
      .kind = Kind::kGroup, .group_size = 4, .children = {Leaf(0.25)}};
  EXPECT_EQ(FoldComposition(group)->epsilon(), 1.0);
}

TEST(FoldCompositionTest, WeakenChecksDominance) {
  const CompositionNode ok{
      .kind = Kind::kWeaken, .epsilon = 2.0, .children = {Leaf(1)}};
  EXPECT_EQ(FoldComposition(ok)->epsilon(), 2.0);
  const CompositionNode bad{
      .kind = Kind::kWeaken, .epsilon = 0.5, .children = {Leaf(1)}};
  EXPECT_EQ(FoldComposition(bad).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(FoldCompositionTest, Malformed) {
  CompositionNode orphan;
  orphan.kind = Kind::kPostProcess;
  EXPECT_FALSE(FoldComposition(orphan).ok());
  const CompositionNode group_delta{
      .kind = Kind::kGroup, .group_size = 2, .children = {Leaf(0.5, 0.1)}};
  EXPECT_FALSE(FoldComposition(group_delta).ok());
  EXPECT_FALSE(FoldComposition(Leaf(-1.0)).ok());
}

TEST(FoldCompositionTest, NestedTree) {
  // group_2(seq(post(0.25), adaptive(0.25, 0.5))) = 2 * 1.0
  const CompositionNode tree{
      .kind = Kind::kGroup,
      .group_size = 2,
      .children = {{.kind = Kind::kSequential,
                    .children = {{.kind = Kind::kPostProcess,
                                  .children = {Leaf(0.25)}},
                                 {.kind = Kind::kAdaptive,
                                  .children = {Leaf(0.25), Leaf(0.5)}}}}}};
  EXPECT_EQ(FoldComposition(tree)->epsilon(), 2.0);
}

}  // namespace
}  // namespace dpkit
