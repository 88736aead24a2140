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

#include "dpkit/rnm.h"

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dpkit/laplace.h"
#include "dpkit/quadrature.h"

namespace dpkit {
namespace {

absl::Status CheckEpsilon(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be positive and finite, got ", eps));
  }
  return absl::OkStatus();
}

std::vector<double> ToDoubles(std::span<const int64_t> xs) {
  return std::vector<double>(xs.begin(), xs.end());
}

// Both tuples agree within one in the dominance sense of case (A) or (B).
bool Dichotomy(std::span<const double> a, std::span<const double> b) {
  return DominatesWithinOne(a, b) || DominatesWithinOne(b, a);
}

}  // namespace

std::strong_ordering operator<=>(const ExtendedReal& a,
                                 const ExtendedReal& b) {
  if (!a.is_finite() || !b.is_finite()) {
    return a.is_finite() <=> b.is_finite();
  }
  // Scores are finite reals (no NaN), so the partial order is total here.
  if (a.value() < b.value()) return std::strong_ordering::less;
  if (a.value() > b.value()) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

MaxArgmax ComputeMaxArgmax(std::span<const double> xs) {
  // Unrolls the recursion from the end of the list.
  MaxArgmax acc{ExtendedReal::NegativeInfinity(), 0};
  for (size_t k = xs.size(); k-- > 0;) {
    if (xs[k] > acc.max) {
      acc = {ExtendedReal::Finite(xs[k]), 0};
    } else {
      ++acc.index;
    }
  }
  return acc;
}

size_t ArgmaxList(std::span<const double> xs) {
  return ComputeMaxArgmax(xs).index;
}

absl::StatusOr<std::vector<double>> ListInsert(double k,
                                               std::span<const double> ks,
                                               size_t i) {
  if (i > ks.size()) {
    return absl::OutOfRangeError(absl::StrCat(
        "insert position ", i, " exceeds list length ", ks.size()));
  }
  std::vector<double> out(ks.begin(), ks.begin() + i);
  out.push_back(k);
  out.insert(out.end(), ks.begin() + i, ks.end());
  return out;
}

absl::StatusOr<size_t> ArgmaxInsert(double k, std::span<const double> ks,
                                    size_t i) {
  absl::StatusOr<std::vector<double>> xs = ListInsert(k, ks, i);
  if (!xs.ok()) return xs.status();
  return ArgmaxList(*xs);
}

bool ArgmaxInsertCharacterization(double k, std::span<const double> ks,
                                  size_t i) {
  const ExtendedReal whole = ComputeMaxArgmax(ks).max;
  const ExtendedReal tail = ComputeMaxArgmax(ks.subspan(std::min(i, ks.size()))).max;
  return k >= whole && ExtendedReal::Finite(k) != tail;
}

absl::StatusOr<size_t> RnmSampleScores(std::span<const double> scores,
                                       double eps, RandomSource& rng) {
  if (absl::Status s = CheckEpsilon(eps); !s.ok()) return s;
  if (scores.size() <= 1) return 0;
  return ArgmaxList(LaplaceVectorSample(1.0 / eps, scores, rng));
}

absl::StatusOr<size_t> RnmSample(const CountingQuerySet& q, double eps,
                                 const Dataset& d, RandomSource& rng) {
  absl::StatusOr<std::vector<int64_t>> c = CountingQuery(q, d);
  if (!c.ok()) return c.status();
  return RnmSampleScores(ToDoubles(*c), eps, rng);
}

absl::StatusOr<double> RnmProbExact(std::span<const double> scores, double eps,
                                    size_t i, double tol) {
  if (absl::Status s = CheckEpsilon(eps); !s.ok()) return s;
  if (scores.empty()) {
    return absl::InvalidArgumentError("report noisy max needs m >= 1");
  }
  if (i >= scores.size()) {
    return absl::OutOfRangeError(
        absl::StrCat("index ", i, " out of range for m = ", scores.size()));
  }
  if (!(tol > 0.0)) return absl::InvalidArgumentError("tol must be positive");
  if (scores.size() == 1) return 1.0;

  const LaplaceDistribution noise{.scale = 1.0 / eps, .location = 0.0};
  auto integrand = [&](double t) {
    double value = *LaplacePdf(noise, t - scores[i]);
    for (size_t j = 0; j < scores.size() && value > 0.0; ++j) {
      if (j != i) value *= LaplaceCdf(noise, t - scores[j]);
    }
    return value;
  };
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double a = *lo - kLaplaceTailScales * noise.scale;
  const double b = *hi + kLaplaceTailScales * noise.scale;
  // The Simpson error estimate is heuristic and can undershoot by a small
  // factor on the kinked pieces; the margin makes tol a delivered bound.
  constexpr double kToleranceMargin = 1.0 / 16.0;
  return IntegratePiecewise(integrand, a, b, scores, kToleranceMargin * tol)
      .value;
}

absl::StatusOr<std::vector<double>> RnmDistribution(
    std::span<const double> scores, double eps, double tol) {
  std::vector<double> out;
  out.reserve(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    absl::StatusOr<double> p = RnmProbExact(scores, eps, i, tol);
    if (!p.ok()) return p.status();
    out.push_back(*p);
  }
  return out;
}

absl::StatusOr<NoiseAssignment> NoiseAssignment::Create(
    std::vector<double> noise, size_t hole) {
  if (hole > noise.size()) {
    return absl::OutOfRangeError(absl::StrCat(
        "hole ", hole, " outside a vector of length ", noise.size() + 1));
  }
  return NoiseAssignment(std::move(noise), hole);
}

absl::StatusOr<double> RnmPI(std::span<const double> scores,
                             const NoiseAssignment& others, double eps) {
  if (absl::Status s = CheckEpsilon(eps); !s.ok()) return s;
  if (scores.size() != others.full_length()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", others.full_length(), " scores, got ", scores.size()));
  }
  const size_t i = others.hole();
  ExtendedReal best = ExtendedReal::NegativeInfinity();
  for (size_t j = 0, r = 0; j < scores.size(); ++j) {
    if (j == i) continue;
    const double v = scores[j] + others.noise()[r++];
    if (v > best) best = ExtendedReal::Finite(v);
  }
  if (!best.is_finite()) return 1.0;
  const LaplaceDistribution noise{.scale = 1.0 / eps, .location = 0.0};
  return 1.0 - LaplaceCdf(noise, best.value() - scores[i]);
}

bool DominatesWithinOne(std::span<const double> xs,
                        std::span<const double> ys) {
  if (xs.size() != ys.size()) return false;
  for (size_t j = 0; j < xs.size(); ++j) {
    if (!(xs[j] >= ys[j] && xs[j] <= ys[j] + 1.0)) return false;
  }
  return true;
}

absl::StatusOr<bool> VerifyMaxAdjacency(std::span<const double> xs,
                                        std::span<const double> ys,
                                        std::span<const double> rs) {
  if (xs.size() != ys.size() || xs.size() != rs.size()) {
    return absl::FailedPreconditionError("lengths differ");
  }
  if (!DominatesWithinOne(xs, ys)) {
    return absl::FailedPreconditionError(
        "need ys <= xs <= ys + 1 componentwise");
  }
  std::vector<double> a(xs.size()), b(xs.size());
  double magnitude = 1.0;
  for (size_t j = 0; j < xs.size(); ++j) {
    a[j] = xs[j] + rs[j];
    b[j] = ys[j] + rs[j];
    magnitude = std::max(magnitude, std::abs(xs[j]) + std::abs(rs[j]) + 1.0);
  }
  const ExtendedReal d = ComputeMaxArgmax(a).max;
  const ExtendedReal d_prime = ComputeMaxArgmax(b).max;
  if (!d.is_finite()) return !d_prime.is_finite();
  // (y + 1) + r and (y + r) + 1 round differently by a few ulps.
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * magnitude;
  return d >= d_prime && d.value() <= d_prime.value() + 1.0 + slack;
}

absl::StatusOr<Mechanism> RnmMechanism(CountingQuerySet q, double eps,
                                       RnmNoise noise, double tol) {
  if (absl::Status s = CheckEpsilon(eps); !s.ok()) return s;
  if (!(tol > 0.0)) return absl::InvalidArgumentError("tol must be positive");
  const size_t m = q.m();
  std::vector<std::string> labels;
  for (size_t i = 0; i < std::max<size_t>(m, 1); ++i) {
    labels.push_back(absl::StrCat(i));
  }
  auto scores_of = [q](const Dataset& d) {
    return ToDoubles(CountingQuery(q, d).value());
  };

  Mechanism::Parts parts;
  parts.name = noise == RnmNoise::kAll ? "rnm" : "rnm-first-only";
  parts.input_length = q.n();
  parts.kind = OutputKind::kLabel;
  parts.output_labels = labels;
  const LaplaceDistribution lap{.scale = 1.0 / eps, .location = 0.0};

  if (noise == RnmNoise::kAll) {
    parts.sample = [scores_of, eps](const Dataset& d,
                                    RandomSource& rng) -> absl::StatusOr<Outcome> {
      absl::StatusOr<size_t> i = RnmSampleScores(scores_of(d), eps, rng);
      if (!i.ok()) return i.status();
      return Outcome(absl::StrCat(*i));
    };
    parts.pmf = [scores_of, eps, tol, m](const Dataset& d)
        -> absl::StatusOr<DiscreteDistribution> {
      if (m <= 1) return DiscreteDistribution::PointMass("0");
      absl::StatusOr<std::vector<double>> probs =
          RnmDistribution(scores_of(d), eps, tol);
      if (!probs.ok()) return probs.status();
      std::vector<std::pair<std::string, double>> masses;
      for (size_t i = 0; i < probs->size(); ++i) {
        masses.emplace_back(absl::StrCat(i), (*probs)[i]);
      }
      return DiscreteDistribution::Create(std::move(masses),
                                          m * tol + kNormalizationTolerance);
    };
    parts.pmf_error = tol;
  } else {
    parts.sample = [scores_of, lap](const Dataset& d,
                                    RandomSource& rng) -> absl::StatusOr<Outcome> {
      std::vector<double> c = scores_of(d);
      if (!c.empty()) c[0] += LaplaceSample(lap, rng);
      return Outcome(absl::StrCat(ArgmaxList(c)));
    };
    parts.pmf = [scores_of, lap, m](const Dataset& d)
        -> absl::StatusOr<DiscreteDistribution> {
      if (m <= 1) return DiscreteDistribution::PointMass("0");
      const std::vector<double> c = scores_of(d);
      const MaxArgmax rest =
          ComputeMaxArgmax(std::span<const double>(c).subspan(1));
      // Index 0 wins iff c_0 + r_0 > max of the rest; otherwise the rest's
      // argmax, shifted by one, wins deterministically.
      const double win = LaplaceSurvival(lap, rest.max.value() - c[0]);
      std::vector<std::pair<std::string, double>> masses{{"0", win}};
      masses.emplace_back(absl::StrCat(rest.index + 1), 1.0 - win);
      return DiscreteDistribution::Create(std::move(masses));
    };
  }
  return Mechanism(std::move(parts));
}

std::vector<std::pair<std::string, CountingQuerySet>> DefaultRnmFamilies(
    size_t n, size_t max_queries) {
  std::vector<std::pair<std::string, CountingQuerySet>> out;
  if (n == 0) return out;
  for (size_t m = 1; m <= max_queries; ++m) {
    std::vector<std::vector<size_t>> shared, singles, own, prefixes;
    for (size_t j = 0; j < m; ++j) {
      shared.push_back({0});
      singles.push_back({j % n});
      own.push_back(n >= 2 ? std::vector<size_t>{0, 1 + j % (n - 1)}
                           : std::vector<size_t>{0});
      std::vector<size_t> prefix;
      for (size_t t = 0; t <= std::min(j, n - 1); ++t) prefix.push_back(t);
      prefixes.push_back(std::move(prefix));
    }
    out.emplace_back(absl::StrCat("shared-type/m=", m),
                     CountingQuerySet::Create(n, std::move(shared)).value());
    out.emplace_back(absl::StrCat("singletons/m=", m),
                     CountingQuerySet::Create(n, std::move(singles)).value());
    out.emplace_back(absl::StrCat("shared-plus-own/m=", m),
                     CountingQuerySet::Create(n, std::move(own)).value());
    out.emplace_back(absl::StrCat("prefixes/m=", m),
                     CountingQuerySet::Create(n, std::move(prefixes)).value());
  }
  return out;
}

absl::StatusOr<RnmVerifyReport> VerifyRnmDpFiner(
    std::span<const std::pair<std::string, CountingQuerySet>> families,
    const RnmVerifyOptions& options) {
  if (absl::Status s = CheckEpsilon(options.eps); !s.ok()) return s;
  if (!(options.tol > 0.0)) {
    return absl::InvalidArgumentError("tol must be positive");
  }
  RnmVerifyReport report;
  report.eps = options.eps;
  report.finer_bound = std::exp(options.eps);
  const double slack = 3.0 * options.tol;

  std::map<std::vector<double>, std::vector<double>> cache;
  auto distribution =
      [&](const std::vector<double>& c) -> absl::StatusOr<std::vector<double>> {
    auto it = cache.find(c);
    if (it != cache.end()) return it->second;
    absl::StatusOr<std::vector<double>> probs =
        c.size() <= 1 ? absl::StatusOr<std::vector<double>>(
                            std::vector<double>(c.size(), 1.0))
                      : RnmDistribution(c, options.eps, options.tol);
    if (!probs.ok()) return probs.status();
    cache.emplace(c, *probs);
    return probs;
  };

  for (const auto& [name, q] : families) {
    if (q.n() != options.n) {
      return absl::InvalidArgumentError(absl::StrCat(
          "family ", name, " is over n = ", q.n(), ", expected ", options.n));
    }
    absl::StatusOr<std::vector<std::pair<Dataset, Dataset>>> pairs =
        EnumerateAdjacentPairs(options.n, options.max_entry, 1,
                               options.budget);
    if (!pairs.ok()) return pairs.status();
    absl::StatusOr<int64_t> sensitivity =
        CountingSensitivityExhaustive(q, options.max_entry, options.budget);
    if (!sensitivity.ok()) return sensitivity.status();

    RnmFamilyReport fam;
    fam.name = name;
    fam.m = q.m();
    for (size_t j = 0; j < q.m(); ++j) fam.predicates.push_back(q.Predicate(j));
    fam.sensitivity = *sensitivity;
    fam.naive_bound = std::exp(static_cast<double>(q.m()) * options.eps);
    std::optional<RnmCell> worst;

    for (const auto& [a, b] : *pairs) {
      if (!(a < b)) continue;  // both directions are checked below
      const std::vector<double> ca = ToDoubles(CountingQuery(q, a).value());
      const std::vector<double> cb = ToDoubles(CountingQuery(q, b).value());
      if (!Dichotomy(ca, cb)) {
        fam.dichotomy_holds = false;
        fam.pass = false;
      }
      absl::StatusOr<std::vector<double>> pa = distribution(ca);
      if (!pa.ok()) return pa.status();
      absl::StatusOr<std::vector<double>> pb = distribution(cb);
      if (!pb.ok()) return pb.status();
      for (size_t i = 0; i < ca.size(); ++i) {
        RnmCell cell{.from = a,
                     .to = b,
                     .scores_from = ca,
                     .scores_to = cb,
                     .index = i,
                     .p_from = (*pa)[i],
                     .p_to = (*pb)[i]};
        const double lo = std::min(cell.p_from, cell.p_to);
        const double hi = std::max(cell.p_from, cell.p_to);
        cell.ratio = lo > 0.0 ? hi / lo : (hi > 0.0 ? INFINITY : 1.0);
        cell.pass = cell.p_from <= report.finer_bound * cell.p_to + slack &&
                    cell.p_to <= report.finer_bound * cell.p_from + slack;
        cell.unstable = lo < 1e-6;
        ++report.cells_checked;
        if (cell.unstable) ++report.unstable_cells;
        if (!cell.pass) fam.pass = false;
        fam.max_ratio = std::max(fam.max_ratio, cell.ratio);
        const bool is_worst = !worst || cell.ratio > worst->ratio;
        if (options.keep_all_cells || !cell.pass) {
          fam.cells.push_back(cell);
        }
        if (is_worst) worst = std::move(cell);
      }
    }
    if (!options.keep_all_cells && worst && worst->pass) {
      fam.cells.push_back(*worst);
    }
    report.max_ratio = std::max(report.max_ratio, fam.max_ratio);
    if (!fam.pass) report.pass = false;
    report.families.push_back(std::move(fam));
  }
  return report;
}

}  // namespace dpkit
