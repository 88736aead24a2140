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

// DP judgments about (mechanism, adjacency, budget) triples.
//
// M is (eps, delta)-DP on a set of input pairs when, for every listed pair
// (D, D'), both D_eps(M(D), M(D')) <= delta and D_eps(M(D'), M(D)) <= delta.
// Both directions are always checked, so asymmetric pair lists are fine.

#ifndef DPKIT_AUDIT_H_
#define DPKIT_AUDIT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpkit/budget.h"
#include "dpkit/dataset.h"
#include "dpkit/divergence.h"
#include "dpkit/mechanism.h"

namespace dpkit {

using DatasetPair = std::pair<Dataset, Dataset>;

enum class Verdict {
  kPass,              // proved by exact arithmetic or certified quadrature
  kNoViolationFound,  // statistical audit, nothing detected
  kViolation,
  kInconclusive,
};

std::string_view VerdictName(Verdict v);

// A concrete event on which Pr[M(from) in S] > exp(eps) Pr[M(to) in S] +
// delta.
struct DpWitness {
  Dataset from;
  Dataset to;
  std::string event;
  double prob_from = 0.0;
  double prob_to = 0.0;
  // prob_from - exp(eps) prob_to - delta (positive for a violation).
  double gap = 0.0;
};

struct ExactDpReport {
  bool passed = true;
  size_t pairs_checked = 0;
  // Largest divergence observed over pairs and directions.
  double max_divergence = 0.0;
  std::optional<DpWitness> witness;
};

// Exact check via DivergenceDiscrete on the mechanism's pmf. Divergences up
// to delta + slack pass, where slack covers rounding and the mechanism's
// declared pmf error. Mechanisms without a pmf are Unimplemented; use
// CheckDpStatistical or CheckLaplaceMechanismDp instead.
absl::StatusOr<ExactDpReport> CheckDpExact(const Mechanism& mech,
                                           std::span<const DatasetPair> pairs,
                                           const PrivacyBudget& budget);

struct DensityDpReport {
  Verdict verdict = Verdict::kPass;
  size_t pairs_checked = 0;
  // Largest sum over coordinates of the certified per-coordinate privacy
  // losses |c_j - c'_j| / b_j.
  double max_certified_epsilon = 0.0;
  std::optional<DpWitness> witness;
};

// Check for mechanisms whose output is a product of Laplace distributions.
// For each pair and coordinate the loss eps_j = |c_j - c'_j| / b_j is
// certified by quadrature (D_{eps_j} <= tol both ways); the pair passes when
// sum_j eps_j <= eps, by composition over independent coordinates. When the
// sum exceeds eps, a coordinate whose marginal divergence at eps exceeds
// delta + tol is a violation, since projection is post-processing; the
// witness is the half-line where that marginal's density ratio exceeds
// exp(eps). Otherwise the pair is inconclusive.
absl::StatusOr<DensityDpReport> CheckLaplaceMechanismDp(
    const Mechanism& mech, std::span<const DatasetPair> pairs,
    const PrivacyBudget& budget, double tol = 1e-9);

struct StatisticalAuditOptions {
  int64_t samples = 100'000;
  double alpha = 1e-3;
  int grid = 10;
  int partitions = 4;
  // No violation is reported as found only when every upper confidence
  // bound is within delta + resolution; otherwise the audit is
  // inconclusive.
  double resolution = 0.25;
  uint64_t seed = 0;
};

struct PairAudit {
  Dataset from;
  Dataset to;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<EventEstimate> witness;
};

struct StatisticalAuditReport {
  Verdict verdict = Verdict::kNoViolationFound;
  // One entry per pair and direction.
  std::vector<PairAudit> audits;
  std::optional<DpWitness> witness;
};

// Monte Carlo surrogate: DivergenceMonteCarlo in both directions for every
// pair, with alpha split evenly across all of them. Label outputs use
// subset events, vector outputs quantile-interval events per coordinate
// built from a separate pilot sample. Never reports kPass.
absl::StatusOr<StatisticalAuditReport> CheckDpStatistical(
    const Mechanism& mech, std::span<const DatasetPair> pairs,
    const PrivacyBudget& budget, const StatisticalAuditOptions& options);

struct GroupPrivacyReport {
  bool precondition_met = false;
  bool passed = false;
  size_t pairs_checked = 0;
  size_t chains_verified = 0;
  double max_divergence = 0.0;
  std::optional<DpWitness> witness;
};

inline constexpr double kGroupPrivacySlack = 1e-10;

// For a mechanism with an exact pmf over histograms of length n with entries
// in [0, max_entry]: first checks (eps, 0)-DP on all 1-adjacent pairs
// (recording an unmet precondition instead of failing), then checks
// D_{k eps} <= 1e-10 both ways for every pair at distance <= k, and that
// AdjacencyChain produces a valid unit-step chain for each.
absl::StatusOr<GroupPrivacyReport> CheckGroupPrivacy(
    const Mechanism& mech, double eps, int64_t k, int64_t max_entry,
    int64_t budget = kDefaultEnumerationBudget);

// Whether `chain` walks from `from` to `to` in at most k unit steps.
bool VerifyAdjacencyChain(std::span<const Dataset> chain, const Dataset& from,
                          const Dataset& to, int64_t k);

}  // namespace dpkit

#endif  // DPKIT_AUDIT_H_
