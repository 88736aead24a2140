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

// Histogram datasets, the L1 metric on fixed-length count vectors, k-fold
// adjacency, and counting queries.

#ifndef DPKIT_DATASET_H_
#define DPKIT_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"

namespace dpkit {

// Default enumeration budget for the exhaustive helpers below.
inline constexpr int64_t kDefaultEnumerationBudget = 2'000'000;

// Totalized list indexing: xs[i] when i is in range, `fallback` otherwise.
template <typename T>
T NthTotal(std::span<const T> xs, size_t i, T fallback) {
  return i < xs.size() ? xs[i] : fallback;
}

// A histogram of record counts, one nonnegative entry per data type.
class Dataset {
 public:
  static absl::StatusOr<Dataset> Create(std::vector<int64_t> counts);

  size_t size() const { return counts_.size(); }
  int64_t operator[](size_t i) const { return counts_[i]; }
  // Count for type `i`, or 0 when `i` is out of range.
  int64_t CountOr0(size_t i) const {
    return NthTotal<int64_t>(counts_, i, 0);
  }
  std::span<const int64_t> counts() const { return counts_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;
  friend auto operator<=>(const Dataset&, const Dataset&) = default;

 private:
  explicit Dataset(std::vector<int64_t> counts) : counts_(std::move(counts)) {}

  std::vector<int64_t> counts_;
};

// Sum of absolute coordinate differences. Fails on a length mismatch.
absl::StatusOr<int64_t> DistL1(const Dataset& xs, const Dataset& ys);

// True iff DistL1(xs, ys) <= k.
absl::StatusOr<bool> IsAdjacent(const Dataset& xs, const Dataset& ys,
                                int64_t k);

// Datasets at L1 distance at most `radius` from each other, over histograms
// of length `n`. Radius 1 is ordinary adjacency.
class AdjacencyRelation {
 public:
  static absl::StatusOr<AdjacencyRelation> Create(size_t n, int64_t radius);

  size_t n() const { return n_; }
  int64_t radius() const { return radius_; }

  absl::StatusOr<bool> Contains(const Dataset& xs, const Dataset& ys) const;

 private:
  AdjacencyRelation(size_t n, int64_t radius) : n_(n), radius_(radius) {}

  size_t n_;
  int64_t radius_;
};

// Walk from `xs` to `ys` in unit L1 steps. Coordinates are adjusted left to
// right, one unit per step, so the chain has DistL1(xs, ys) + 1 entries.
// Fails when the distance exceeds `k`.
absl::StatusOr<std::vector<Dataset>> AdjacencyChain(const Dataset& xs,
                                                    const Dataset& ys,
                                                    int64_t k);

// m counting queries over histograms of length n. Query i counts the records
// whose type belongs to its predicate set.
class CountingQuerySet {
 public:
  // `predicates[i]` lists the types counted by query i; every index must be
  // below n. Duplicated indices are collapsed.
  static absl::StatusOr<CountingQuerySet> Create(
      size_t n, std::vector<std::vector<size_t>> predicates);

  size_t n() const { return n_; }
  size_t m() const { return members_.size(); }
  bool Contains(size_t query, size_t type) const {
    return members_[query][type];
  }
  // Sorted type indices of query `query`.
  std::vector<size_t> Predicate(size_t query) const;

 private:
  CountingQuerySet(size_t n, std::vector<std::vector<bool>> members)
      : n_(n), members_(std::move(members)) {}

  size_t n_;
  std::vector<std::vector<bool>> members_;
};

// q_i(D): sum of D over the types in predicate i.
absl::StatusOr<int64_t> Counting(const CountingQuerySet& q, size_t i,
                                 const Dataset& xs);

// (q_0(D), ..., q_{m-1}(D)).
absl::StatusOr<std::vector<int64_t>> CountingQuery(const CountingQuerySet& q,
                                                   const Dataset& xs);

// Every histogram of length n with entries in [0, max_entry], in
// lexicographic order.
absl::StatusOr<std::vector<Dataset>> EnumerateDatasets(
    size_t n, int64_t max_entry,
    int64_t budget = kDefaultEnumerationBudget);

// Ordered pairs (D, D') of enumerated histograms with 1 <= DistL1 <= radius.
// Both orientations are listed.
absl::StatusOr<std::vector<std::pair<Dataset, Dataset>>>
EnumerateAdjacentPairs(size_t n, int64_t max_entry, int64_t radius,
                       int64_t budget = kDefaultEnumerationBudget);

// Largest L1 change of the query tuple over all 1-adjacent pairs with
// entries in [0, max_entry]. Fails with ResourceExhausted when the
// enumeration would exceed `budget` datasets.
absl::StatusOr<int64_t> CountingSensitivityExhaustive(
    const CountingQuerySet& q, int64_t max_entry,
    int64_t budget = kDefaultEnumerationBudget);

}  // namespace dpkit

#endif  // DPKIT_DATASET_H_
