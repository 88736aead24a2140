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

#include <cmath>
#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace dpkit {

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be finite and >= 0, got ", epsilon));
  }
  if (!std::isfinite(delta) || delta < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be finite and >= 0, got ", delta));
  }
  return PrivacyBudget(epsilon, delta);
}

PrivacyBudget AddBudgets(const PrivacyBudget& a, const PrivacyBudget& b) {
  return PrivacyBudget::Create(a.epsilon() + b.epsilon(),
                               a.delta() + b.delta())
      .value();
}

bool CanWeaken(const PrivacyBudget& from, const PrivacyBudget& to) {
  return from.epsilon() <= to.epsilon() && from.delta() <= to.delta();
}

absl::StatusOr<PrivacyBudget> GroupBudget(const PrivacyBudget& b, int64_t k) {
  if (k < 0) return absl::InvalidArgumentError("group size must be >= 0");
  if (b.delta() > 0.0) {
    return absl::UnimplementedError(
        "group privacy is only available for pure (eps, 0) budgets");
  }
  return PrivacyBudget::Create(static_cast<double>(k) * b.epsilon(), 0.0);
}

absl::StatusOr<PrivacyBudget> FoldComposition(const CompositionNode& node) {
  using Kind = CompositionNode::Kind;
  switch (node.kind) {
    case Kind::kLeaf:
      return PrivacyBudget::Create(node.epsilon, node.delta);
    case Kind::kSequential:
    case Kind::kAdaptive: {
      PrivacyBudget total = PrivacyBudget::Create(0.0, 0.0).value();
      for (const CompositionNode& child : node.children) {
        absl::StatusOr<PrivacyBudget> b = FoldComposition(child);
        if (!b.ok()) return b.status();
        total = AddBudgets(total, *b);
      }
      return total;
    }
    case Kind::kPostProcess:
    case Kind::kGroup:
    case Kind::kWeaken: {
      if (node.children.size() != 1) {
        return absl::InvalidArgumentError(absl::StrCat(
            "post/group/weaken nodes take exactly one child, got ",
            node.children.size()));
      }
      absl::StatusOr<PrivacyBudget> inner = FoldComposition(node.children[0]);
      if (!inner.ok()) return inner.status();
      if (node.kind == Kind::kPostProcess) return inner;
      if (node.kind == Kind::kGroup) return GroupBudget(*inner, node.group_size);
      absl::StatusOr<PrivacyBudget> target =
          PrivacyBudget::Create(node.epsilon, node.delta);
      if (!target.ok()) return target.status();
      if (!CanWeaken(*inner, *target)) {
        return absl::FailedPreconditionError(absl::StrCat(
            "cannot weaken (", inner->epsilon(), ", ", inner->delta(),
            ") to (", target->epsilon(), ", ", target->delta(), ")"));
      }
      return target;
    }
  }
  return absl::InternalError("unknown composition node");
}

}  // namespace dpkit
