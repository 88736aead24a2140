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

// The divergence
//
//   D_eps(mu, nu) = sup_S  mu(S) - exp(eps) nu(S)
//
// over probability distributions. A mechanism M is (eps, delta)-DP for an
// adjacency relation iff D_eps(M(D), M(D')) <= delta for every adjacent
// (D, D'). For finite spaces the supremum is attained by
// S* = {y : mu(y) > exp(eps) nu(y)}, which DivergenceDiscrete uses; the
// brute-force variant checks every subset instead.

#ifndef DPKIT_DIVERGENCE_H_
#define DPKIT_DIVERGENCE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpkit/laplace.h"
#include "dpkit/outcome.h"
#include "dpkit/random.h"

namespace dpkit {

inline constexpr double kNormalizationTolerance = 1e-12;

// A probability mass function over distinct string labels, stored in label
// order.
class DiscreteDistribution {
 public:
  // Fails on a negative or non-finite mass, duplicate labels, or a total
  // further than `tolerance` from 1.
  static absl::StatusOr<DiscreteDistribution> Create(
      std::vector<std::pair<std::string, double>> masses,
      double tolerance = kNormalizationTolerance);

  static DiscreteDistribution PointMass(std::string label);

  // Probability of `label`; 0 for labels outside the support list.
  double Prob(std::string_view label) const;
  const std::vector<std::pair<std::string, double>>& masses() const {
    return masses_;
  }
  size_t size() const { return masses_.size(); }

  // Labels in order, as a convenience for enumeration.
  std::vector<std::string> Labels() const;

  // Draws a label by inverting the cumulative masses.
  std::string Sample(RandomSource& rng) const;

 private:
  explicit DiscreteDistribution(
      std::vector<std::pair<std::string, double>> masses)
      : masses_(std::move(masses)) {}

  std::vector<std::pair<std::string, double>> masses_;
};

// A finite Markov kernel: one output distribution per input label.
class DiscreteKernel {
 public:
  DiscreteKernel() = default;
  explicit DiscreteKernel(std::map<std::string, DiscreteDistribution> rows)
      : rows_(std::move(rows)) {}

  // Kernel of a deterministic map over the given input labels.
  template <typename Fn>
  static DiscreteKernel Deterministic(std::span<const std::string> inputs,
                                      Fn&& fn) {
    std::map<std::string, DiscreteDistribution> rows;
    for (const std::string& x : inputs) {
      rows.emplace(x, DiscreteDistribution::PointMass(fn(x)));
    }
    return DiscreteKernel(std::move(rows));
  }

  absl::StatusOr<const DiscreteDistribution*> Row(std::string_view x) const;
  const std::map<std::string, DiscreteDistribution>& rows() const {
    return rows_;
  }

 private:
  std::map<std::string, DiscreteDistribution> rows_;
};

// (mu >>= f)(y) = sum_x mu(x) f(x)(y). Fails when f has no row for some
// label in mu's support.
absl::StatusOr<DiscreteDistribution> Pushforward(const DiscreteDistribution& mu,
                                                 const DiscreteKernel& f);

enum class DivergenceMethod { kExactDiscrete, kQuadrature, kMonteCarlo };

std::string_view DivergenceMethodName(DivergenceMethod method);

struct DivergenceResult {
  double epsilon = 0.0;
  double value = 0.0;
  DivergenceMethod method = DivergenceMethod::kExactDiscrete;
  // 0 for exact arithmetic; the quadrature tolerance; or, for Monte Carlo,
  // the distance from `value` (a lower confidence bound) to the upper
  // confidence bound over the event family.
  double error_bound = 0.0;
};

// Sum over the union of supports of max(0, mu(y) - exp(eps) nu(y)).
absl::StatusOr<DivergenceResult> DivergenceDiscrete(
    const DiscreteDistribution& mu, const DiscreteDistribution& nu,
    double eps);

// The maximizing event {y : mu(y) > exp(eps) nu(y)}.
std::vector<std::string> DivergenceWitness(const DiscreteDistribution& mu,
                                           const DiscreteDistribution& nu,
                                           double eps);

inline constexpr size_t kBruteForceMaxOutcomes = 20;

// max over all subsets S of the joint support of mu(S) - exp(eps) nu(S).
// The empty set contributes 0. Fails with ResourceExhausted beyond
// kBruteForceMaxOutcomes outcomes.
absl::StatusOr<DivergenceResult> DivergenceBruteForce(
    const DiscreteDistribution& mu, const DiscreteDistribution& nu,
    double eps);

// Whether mu(S) <= exp(eps) nu(S) + delta for every subset S of the joint
// support, by enumeration (same capacity limit as DivergenceBruteForce).
absl::StatusOr<bool> AllEventsBounded(const DiscreteDistribution& mu,
                                      const DiscreteDistribution& nu,
                                      double eps, double delta);

// Points where the two Laplace densities have kinks or where
// f_mu(t) = exp(eps) f_nu(t); both scales must be positive.
std::vector<double> LaplacePairBreakpoints(const LaplaceDistribution& mu,
                                           const LaplaceDistribution& nu,
                                           double eps);

// Integral of max(0, f_mu(t) - exp(eps) f_nu(t)) by adaptive Simpson on the
// pieces between breakpoints, truncated kLaplaceTailScales scales beyond the
// outermost location. Requires positive scales and tol > 0.
absl::StatusOr<DivergenceResult> DivergenceLaplace(
    const LaplaceDistribution& mu, const LaplaceDistribution& nu, double eps,
    double tol);

// DivergenceLaplace for Lap(b, x) against Lap(b, y).
absl::StatusOr<DivergenceResult> DivergenceLaplacePair(double b, double x,
                                                       double y, double eps,
                                                       double tol);

// Result of checking that D_{eps1+eps2}(mu >>= f, nu >>= g) <= delta1 +
// delta2 whenever D_{eps1}(mu, nu) <= delta1 and D_{eps2}(f(x), g(x)) <=
// delta2 for every x.
struct ComposabilityCheck {
  bool precondition_met = false;
  bool holds = false;
  double input_divergence = 0.0;   // D_{eps1}(mu, nu)
  double kernel_divergence = 0.0;  // max_x D_{eps2}(f(x), g(x))
  double composed_divergence = 0.0;
  // Budget arithmetic of a violation or of the failed precondition.
  std::string detail;
};

// Slack applied to the composed bound; preconditions use
// kPreconditionSlack to absorb rounding.
inline constexpr double kComposabilitySlack = 1e-10;
inline constexpr double kPreconditionSlack = 1e-12;

// Exact finite check of composability. f and g must have rows for the same
// input labels, covering the supports of mu and nu.
absl::StatusOr<ComposabilityCheck> CheckComposability(
    const DiscreteDistribution& mu, const DiscreteDistribution& nu,
    const DiscreteKernel& f, const DiscreteKernel& g, double eps1,
    double eps2, double delta1, double delta2);

struct TransitivityCheck {
  bool precondition_met = false;
  bool holds = false;
  double composed_divergence = 0.0;  // D_{eps1+eps2}(mu1, mu3)
};

// If D_{eps1}(mu1, mu2) <= 0 and D_{eps2}(mu2, mu3) <= 0, checks that
// D_{eps1+eps2}(mu1, mu3) <= 1e-12. An unmet precondition is reported, not
// treated as failure.
TransitivityCheck CheckTransitivity(const DiscreteDistribution& mu1,
                                    const DiscreteDistribution& mu2,
                                    const DiscreteDistribution& mu3,
                                    double eps1, double eps2);

struct MonteCarloOptions {
  int64_t samples = 100'000;
  double alpha = 1e-3;
  // The sample stream is cut into this many chunks, each drawn from its own
  // forked RandomSource; results depend on (seed, partitions) only.
  int partitions = 4;
};

struct EventEstimate {
  std::string event;
  double mu_hat = 0.0;
  double nu_hat = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct MonteCarloDivergence {
  DivergenceResult result;
  // max over events of the lower / upper confidence bounds, clamped at 0.
  double lower = 0.0;
  double upper = 0.0;
  // Event attaining `lower`, when some event's lower bound is positive.
  std::optional<EventEstimate> witness;
};

// Statistical estimate of the divergence restricted to `events`. For each
// event, mu(S) and nu(S) get two-sided Clopper-Pearson intervals at level
// alpha / (2 |events|), so all intervals hold simultaneously with
// probability >= 1 - alpha. A restricted family can only under-estimate the
// true supremum: a positive lower bound is evidence of a violation, a small
// upper bound is not a proof of privacy.
absl::StatusOr<MonteCarloDivergence> DivergenceMonteCarlo(
    const Sampler& mu, const Sampler& nu, std::span<const Event> events,
    double eps, const MonteCarloOptions& options, const RandomSource& rng);

// Half-line and interval events on coordinate `coordinate` of vector
// outcomes, with endpoints at the pooled empirical quantiles of `pilot`
// (levels 1/(grid+1), ..., grid/(grid+1)).
std::vector<Event> QuantileIntervalEvents(std::span<const double> pilot,
                                          int grid, size_t coordinate = 0);

// Every subset of `labels` as an event when there are at most `max_exact`
// labels, otherwise the singletons and their complements.
std::vector<Event> LabelSubsetEvents(std::span<const std::string> labels,
                                     size_t max_exact = 12);

// Two-sided Clopper-Pearson interval for k successes in n trials at
// miscoverage `alpha`.
std::pair<double, double> ClopperPearson(int64_t k, int64_t n, double alpha);

}  // namespace dpkit

#endif  // DPKIT_DIVERGENCE_H_
