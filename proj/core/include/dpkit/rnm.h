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

// Report noisy max over counting queries.
//
// argmax follows the recursive definition
//
//   max_argmax []        = (-inf, 0)
//   max_argmax (x :: xs) = let (m, i) = max_argmax xs in
//                          if x > m then (x, 0) else (m, i + 1)
//
// so a tie resolves to the LAST maximal position. With continuous noise
// ties have probability zero and the choice does not affect any output
// distribution.

#ifndef DPKIT_RNM_H_
#define DPKIT_RNM_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpkit/dataset.h"
#include "dpkit/mechanism.h"
#include "dpkit/random.h"

namespace dpkit {

inline constexpr double kRnmDefaultTol = 1e-9;

// A real number or -infinity.
class ExtendedReal {
 public:
  static ExtendedReal NegativeInfinity() { return ExtendedReal(); }
  static ExtendedReal Finite(double v) { return ExtendedReal(v); }

  bool is_finite() const { return value_.has_value(); }
  // Requires is_finite().
  double value() const { return *value_; }

  friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;
  friend std::strong_ordering operator<=>(const ExtendedReal& a,
                                          const ExtendedReal& b);
  // Comparisons against plain reals.
  friend bool operator>(double x, const ExtendedReal& e) {
    return !e.is_finite() || x > e.value();
  }
  friend bool operator>=(double x, const ExtendedReal& e) {
    return !e.is_finite() || x >= e.value();
  }

 private:
  ExtendedReal() = default;
  explicit ExtendedReal(double v) : value_(v) {}

  std::optional<double> value_;
};

struct MaxArgmax {
  ExtendedReal max;
  size_t index = 0;
};

MaxArgmax ComputeMaxArgmax(std::span<const double> xs);

size_t ArgmaxList(std::span<const double> xs);

// take i ks ++ [k] ++ drop i ks. Fails when i > ks.size().
absl::StatusOr<std::vector<double>> ListInsert(double k,
                                               std::span<const double> ks,
                                               size_t i);

// ArgmaxList(ListInsert(k, ks, i)).
absl::StatusOr<size_t> ArgmaxInsert(double k, std::span<const double> ks,
                                    size_t i);

// Right-hand side of the insertion characterization:
// k >= max ks  and  k != max (drop i ks). ArgmaxInsert(k, ks, i) == i holds
// exactly when this does.
bool ArgmaxInsertCharacterization(double k, std::span<const double> ks,
                                  size_t i);

// argmax_j (scores_j + r_j) with r_j ~ Lap(1/eps) drawn in order from `rng`.
// For m <= 1 returns 0 without drawing.
absl::StatusOr<size_t> RnmSampleScores(std::span<const double> scores,
                                       double eps, RandomSource& rng);

// RnmSampleScores applied to the counting-query tuple of `d`.
absl::StatusOr<size_t> RnmSample(const CountingQuerySet& q, double eps,
                                 const Dataset& d, RandomSource& rng);

// Pr[argmax_j (c_j + r_j) = i] for independent r_j ~ Lap(1/eps):
//
//   integral f(t - c_i) prod_{j != i} F(t - c_j) dt
//
// with f, F the Lap(1/eps) density and CDF. Adaptive Simpson with cuts at
// every c_j, truncated kLaplaceTailScales scales beyond the extreme scores,
// absolute error about `tol`.
absl::StatusOr<double> RnmProbExact(std::span<const double> scores, double eps,
                                    size_t i, double tol = kRnmDefaultTol);

// RnmProbExact for every index.
absl::StatusOr<std::vector<double>> RnmDistribution(
    std::span<const double> scores, double eps, double tol = kRnmDefaultTol);

// Noise values for every score except the one at `hole`.
class NoiseAssignment {
 public:
  // `hole` is the position the missing value takes in the full vector, so
  // it may equal noise.size().
  static absl::StatusOr<NoiseAssignment> Create(std::vector<double> noise,
                                                size_t hole);

  const std::vector<double>& noise() const { return noise_; }
  size_t hole() const { return hole_; }
  size_t full_length() const { return noise_.size() + 1; }

 private:
  NoiseAssignment(std::vector<double> noise, size_t hole)
      : noise_(std::move(noise)), hole_(hole) {}

  std::vector<double> noise_;
  size_t hole_;
};

// Probability over r_i ~ Lap(1/eps) that index i = others.hole() wins with
// the other noises fixed: 1 - F(M - c_i), M = max_{j != i} (c_j + r_j).
// `scores` holds all m scores.
absl::StatusOr<double> RnmPI(std::span<const double> scores,
                             const NoiseAssignment& others, double eps);

// Whether max(xs + rs) >= max(ys + rs) and max(xs + rs) <= max(ys + rs) + 1,
// the latter up to a few ulps of the operands.
// FailedPrecondition (a skip) unless lengths agree and ys <= xs <= ys + 1
// componentwise.
absl::StatusOr<bool> VerifyMaxAdjacency(std::span<const double> xs,
                                        std::span<const double> ys,
                                        std::span<const double> rs);

// Case (A): ys_j <= xs_j <= ys_j + 1 for every j.
bool DominatesWithinOne(std::span<const double> xs,
                        std::span<const double> ys);

enum class RnmNoise {
  kAll,
  // Noise on query 0 only: a deliberately broken variant for audits.
  kFirstOnly,
};

// Label-valued mechanism returning the winning index as a decimal label.
// The pmf comes from RnmDistribution (pmf_error = tol) for kAll and in
// closed form for kFirstOnly.
absl::StatusOr<Mechanism> RnmMechanism(CountingQuerySet q, double eps,
                                       RnmNoise noise = RnmNoise::kAll,
                                       double tol = kRnmDefaultTol);

struct RnmCell {
  Dataset from;
  Dataset to;
  std::vector<double> scores_from;
  std::vector<double> scores_to;
  size_t index = 0;
  double p_from = 0.0;
  double p_to = 0.0;
  double ratio = 1.0;  // max(p_from / p_to, p_to / p_from)
  bool pass = true;
  bool unstable = false;  // min probability below 1e-6
};

struct RnmFamilyReport {
  std::string name;
  std::vector<std::vector<size_t>> predicates;
  size_t m = 0;
  int64_t sensitivity = 0;
  double naive_bound = 0.0;  // exp(m * eps)
  double max_ratio = 1.0;
  bool dichotomy_holds = true;
  bool pass = true;
  std::vector<RnmCell> cells;
};

struct RnmVerifyOptions {
  size_t n = 3;
  int64_t max_entry = 2;
  size_t max_queries = 3;
  double eps = 1.0;
  double tol = kRnmDefaultTol;
  int64_t budget = kDefaultEnumerationBudget;
  // Keep every (pair, index) cell in the reports, not just the failures
  // and the maximizing cell.
  bool keep_all_cells = false;
};

struct RnmVerifyReport {
  double eps = 0.0;
  double finer_bound = 0.0;  // exp(eps)
  double max_ratio = 1.0;
  size_t cells_checked = 0;
  size_t unstable_cells = 0;
  bool pass = true;
  std::vector<RnmFamilyReport> families;
};

// Query families exercised by VerifyRnmDpFiner for each m in
// [1, max_queries]: every query counting type 0; singletons cycling over the
// types; every query counting type 0 plus a type of its own (sensitivity m,
// where the finer bound is tight); nested prefixes.
std::vector<std::pair<std::string, CountingQuerySet>> DefaultRnmFamilies(
    size_t n, size_t max_queries);

// For every family, every 1-adjacent pair (D, D') with entries in
// [0, max_entry] and every index i: checks the counting-query dichotomy
// (one tuple dominates the other within one) and then
// p <= exp(eps) p' + slack and p' <= exp(eps) p + slack, where p, p' come
// from RnmProbExact and slack = 3 tol. Fails with ResourceExhausted when the
// enumeration exceeds the budget and InvalidArgument for tol <= 0.
absl::StatusOr<RnmVerifyReport> VerifyRnmDpFiner(
    std::span<const std::pair<std::string, CountingQuerySet>> families,
    const RnmVerifyOptions& options);

}  // namespace dpkit

#endif  // DPKIT_RNM_H_
