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

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace dpkit {
namespace {

absl::Status CheckSameLength(const Dataset& xs, const Dataset& ys) {
  if (xs.size() != ys.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dataset lengths differ: ", xs.size(), " vs ",
                     ys.size()));
  }
  return absl::OkStatus();
}

// Number of histograms of length n with entries in [0, max_entry], or -1
// when it exceeds `budget`.
int64_t CountDatasets(size_t n, int64_t max_entry, int64_t budget) {
  int64_t total = 1;
  for (size_t i = 0; i < n; ++i) {
    if (total > budget / (max_entry + 1)) return -1;
    total *= max_entry + 1;
  }
  return total;
}

}  // namespace

absl::StatusOr<Dataset> Dataset::Create(std::vector<int64_t> counts) {
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("histogram entry ", i, " is negative: ", counts[i]));
    }
  }
  return Dataset(std::move(counts));
}

absl::StatusOr<int64_t> DistL1(const Dataset& xs, const Dataset& ys) {
  if (absl::Status s = CheckSameLength(xs, ys); !s.ok()) return s;
  int64_t total = 0;
  for (size_t i = 0; i < xs.size(); ++i) total += std::llabs(xs[i] - ys[i]);
  return total;
}

absl::StatusOr<bool> IsAdjacent(const Dataset& xs, const Dataset& ys,
                                int64_t k) {
  if (k < 0) return absl::InvalidArgumentError("radius must be nonnegative");
  absl::StatusOr<int64_t> d = DistL1(xs, ys);
  if (!d.ok()) return d.status();
  return *d <= k;
}

absl::StatusOr<AdjacencyRelation> AdjacencyRelation::Create(size_t n,
                                                            int64_t radius) {
  if (radius < 0) {
    return absl::InvalidArgumentError("radius must be nonnegative");
  }
  return AdjacencyRelation(n, radius);
}

absl::StatusOr<bool> AdjacencyRelation::Contains(const Dataset& xs,
                                                 const Dataset& ys) const {
  if (xs.size() != n_ || ys.size() != n_) {
    return absl::InvalidArgumentError(
        absl::StrCat("relation is over histograms of length ", n_));
  }
  return IsAdjacent(xs, ys, radius_);
}

absl::StatusOr<std::vector<Dataset>> AdjacencyChain(const Dataset& xs,
                                                    const Dataset& ys,
                                                    int64_t k) {
  absl::StatusOr<int64_t> d = DistL1(xs, ys);
  if (!d.ok()) return d.status();
  if (*d > k) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no chain of length ", k, ": datasets are at distance ", *d));
  }
  std::vector<Dataset> chain{xs};
  std::vector<int64_t> current(xs.counts().begin(), xs.counts().end());
  for (size_t i = 0; i < current.size(); ++i) {
    while (current[i] != ys[i]) {
      current[i] += current[i] < ys[i] ? 1 : -1;
      chain.push_back(Dataset::Create(current).value());
    }
  }
  return chain;
}

absl::StatusOr<CountingQuerySet> CountingQuerySet::Create(
    size_t n, std::vector<std::vector<size_t>> predicates) {
  std::vector<std::vector<bool>> members;
  members.reserve(predicates.size());
  for (size_t q = 0; q < predicates.size(); ++q) {
    std::vector<bool> row(n, false);
    for (size_t type : predicates[q]) {
      if (type >= n) {
        return absl::InvalidArgumentError(absl::StrCat(
            "query ", q, " references type ", type, " but n = ", n));
      }
      row[type] = true;
    }
    members.push_back(std::move(row));
  }
  return CountingQuerySet(n, std::move(members));
}

std::vector<size_t> CountingQuerySet::Predicate(size_t query) const {
  std::vector<size_t> out;
  for (size_t t = 0; t < n_; ++t) {
    if (members_[query][t]) out.push_back(t);
  }
  return out;
}

absl::StatusOr<int64_t> Counting(const CountingQuerySet& q, size_t i,
                                 const Dataset& xs) {
  if (i >= q.m()) {
    return absl::OutOfRangeError(
        absl::StrCat("query index ", i, " out of range for m = ", q.m()));
  }
  int64_t total = 0;
  for (size_t t = 0; t < q.n(); ++t) {
    if (q.Contains(i, t)) total += xs.CountOr0(t);
  }
  return total;
}

absl::StatusOr<std::vector<int64_t>> CountingQuery(const CountingQuerySet& q,
                                                   const Dataset& xs) {
  std::vector<int64_t> out;
  out.reserve(q.m());
  for (size_t i = 0; i < q.m(); ++i) {
    absl::StatusOr<int64_t> c = Counting(q, i, xs);
    if (!c.ok()) return c.status();
    out.push_back(*c);
  }
  return out;
}

absl::StatusOr<std::vector<Dataset>> EnumerateDatasets(size_t n,
                                                       int64_t max_entry,
                                                       int64_t budget) {
  if (max_entry < 0) {
    return absl::InvalidArgumentError("max_entry must be nonnegative");
  }
  const int64_t total = CountDatasets(n, max_entry, budget);
  if (total < 0) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "enumerating histograms with n = ", n, " and entries <= ", max_entry,
        " exceeds the budget of ", budget));
  }
  std::vector<Dataset> out;
  out.reserve(total);
  std::vector<int64_t> counts(n, 0);
  for (int64_t k = 0; k < total; ++k) {
    out.push_back(Dataset::Create(counts).value());
    for (size_t i = n; i-- > 0;) {
      if (++counts[i] <= max_entry) break;
      counts[i] = 0;
    }
  }
  return out;
}

absl::StatusOr<std::vector<std::pair<Dataset, Dataset>>>
EnumerateAdjacentPairs(size_t n, int64_t max_entry, int64_t radius,
                       int64_t budget) {
  if (radius < 0) {
    return absl::InvalidArgumentError("radius must be nonnegative");
  }
  absl::StatusOr<std::vector<Dataset>> all =
      EnumerateDatasets(n, max_entry, budget);
  if (!all.ok()) return all.status();
  const int64_t total = static_cast<int64_t>(all->size());
  if (total > 0 && total > budget / total) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "enumerating pairs over ", total, " histograms exceeds the budget of ",
        budget));
  }
  std::vector<std::pair<Dataset, Dataset>> pairs;
  for (const Dataset& a : *all) {
    for (const Dataset& b : *all) {
      const int64_t d = DistL1(a, b).value();
      if (d >= 1 && d <= radius) pairs.emplace_back(a, b);
    }
  }
  return pairs;
}

absl::StatusOr<int64_t> CountingSensitivityExhaustive(
    const CountingQuerySet& q, int64_t max_entry, int64_t budget) {
  absl::StatusOr<std::vector<Dataset>> all =
      EnumerateDatasets(q.n(), max_entry, budget);
  if (!all.ok()) return all.status();
  // Every 1-adjacent pair differs by one unit in one coordinate, so it is
  // reached from its smaller member by a single increment.
  int64_t best = 0;
  for (const Dataset& d : *all) {
    const std::vector<int64_t> base = CountingQuery(q, d).value();
    for (size_t t = 0; t < q.n(); ++t) {
      if (d[t] >= max_entry) continue;
      std::vector<int64_t> bumped(d.counts().begin(), d.counts().end());
      ++bumped[t];
      const std::vector<int64_t> other =
          CountingQuery(q, Dataset::Create(std::move(bumped)).value()).value();
      int64_t change = 0;
      for (size_t j = 0; j < base.size(); ++j) {
        change += std::llabs(base[j] - other[j]);
      }
      best = std::max(best, change);
    }
  }
  return best;
}

}  // namespace dpkit
