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

// Privacy budgets and the composition arithmetic applied to them by the
// accountant. Budgets travel next to mechanisms, never inside them.

#ifndef DPKIT_BUDGET_H_
#define DPKIT_BUDGET_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"

namespace dpkit {

class PrivacyBudget {
 public:
  // Fails unless eps >= 0 and delta >= 0 (both finite).
  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;

 private:
  PrivacyBudget(double epsilon, double delta)
      : epsilon_(epsilon), delta_(delta) {}

  double epsilon_;
  double delta_;
};

// Sequential (and adaptive) composition: (eps1 + eps2, delta1 + delta2).
PrivacyBudget AddBudgets(const PrivacyBudget& a, const PrivacyBudget& b);

// Whether a mechanism with budget `from` may be reported under `to`, i.e.
// eps <= eps' and delta <= delta'.
bool CanWeaken(const PrivacyBudget& from, const PrivacyBudget& to);

// Group privacy over datasets at distance k: (k eps, 0). Only pure budgets
// qualify; delta > 0 is Unimplemented.
absl::StatusOr<PrivacyBudget> GroupBudget(const PrivacyBudget& b, int64_t k);

// A node of a composition tree folded by FoldComposition.
struct CompositionNode {
  enum class Kind { kLeaf, kSequential, kAdaptive, kPostProcess, kGroup,
                    kWeaken };

  Kind kind = Kind::kLeaf;
  // kLeaf: the mechanism's budget; kWeaken: the target budget.
  double epsilon = 0.0;
  double delta = 0.0;
  int64_t group_size = 1;
  std::vector<CompositionNode> children;
};

// Sequential and adaptive nodes add their children; post-processing passes
// its single child through; group multiplies epsilon by k (delta must be
// 0); weaken checks dominance and returns the target.
absl::StatusOr<PrivacyBudget> FoldComposition(const CompositionNode& node);

}  // namespace dpkit

#endif  // DPKIT_BUDGET_H_
