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

#include "dpkit/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dpkit/laplace.h"

namespace dpkit {
namespace {

double EventProb(const DiscreteDistribution& d,
                 std::span<const std::string> event) {
  double total = 0.0;
  for (const std::string& label : event) total += d.Prob(label);
  return total;
}

// Checks one direction; returns a witness when D_eps(p, q) > delta + slack.
std::optional<DpWitness> CheckDirection(const Dataset& from, const Dataset& to,
                                        const DiscreteDistribution& p,
                                        const DiscreteDistribution& q,
                                        const PrivacyBudget& budget,
                                        double slack, double& max_divergence) {
  const double d = DivergenceDiscrete(p, q, budget.epsilon())->value;
  max_divergence = std::max(max_divergence, d);
  if (d <= budget.delta() + slack) return std::nullopt;
  const std::vector<std::string> event =
      DivergenceWitness(p, q, budget.epsilon());
  DpWitness w{.from = from, .to = to, .event = {}};
  w.event = absl::StrCat("{", absl::StrJoin(event, ","), "}");
  w.prob_from = EventProb(p, event);
  w.prob_to = EventProb(q, event);
  w.gap = w.prob_from - std::exp(budget.epsilon()) * w.prob_to -
          budget.delta();
  return w;
}

double PmfSlack(const Mechanism& mech, const DiscreteDistribution& p,
                const DiscreteDistribution& q, double eps) {
  return kPreconditionSlack +
         mech.pmf_error() * static_cast<double>(p.size() + q.size()) *
             (1.0 + std::exp(eps));
}

// Collects the first sampling error raised inside a Monte Carlo run.
class ErrorSink {
 public:
  void Record(const absl::Status& s) {
    std::lock_guard<std::mutex> lock(mu_);
    if (status_.ok()) status_ = s;
  }
  absl::Status status() const {
    std::lock_guard<std::mutex> lock(mu_);
    return status_;
  }

 private:
  mutable std::mutex mu_;
  absl::Status status_;
};

Sampler SamplerFor(const Mechanism& mech, const Dataset& d, ErrorSink& sink) {
  return [&mech, &d, &sink](RandomSource& rng) -> Outcome {
    absl::StatusOr<Outcome> o = mech.Sample(d, rng);
    if (!o.ok()) {
      sink.Record(o.status());
      return Outcome(std::string());
    }
    return *std::move(o);
  };
}

constexpr int64_t kPilotSamples = 2000;
constexpr uint64_t kPilotStreamOffset = uint64_t{1} << 40;

absl::StatusOr<std::vector<Event>> BuildEvents(
    const Mechanism& mech, const Dataset& a, const Dataset& b,
    const StatisticalAuditOptions& options, const RandomSource& root,
    uint64_t stream) {
  ErrorSink sink;
  const Sampler sa = SamplerFor(mech, a, sink);
  const Sampler sb = SamplerFor(mech, b, sink);
  RandomSource ra = root.Fork(kPilotStreamOffset + 2 * stream);
  RandomSource rb = root.Fork(kPilotStreamOffset + 2 * stream + 1);
  std::vector<Outcome> pilot;
  for (int64_t s = 0; s < kPilotSamples; ++s) {
    pilot.push_back(sa(ra));
    pilot.push_back(sb(rb));
  }
  if (absl::Status s = sink.status(); !s.ok()) return s;

  if (mech.output_kind() == OutputKind::kLabel) {
    std::vector<std::string> labels;
    if (mech.output_labels()) {
      labels = *mech.output_labels();
    } else {
      for (const Outcome& o : pilot) labels.push_back(std::get<std::string>(o));
      std::sort(labels.begin(), labels.end());
      labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    }
    return LabelSubsetEvents(labels, 10);
  }
  std::vector<Event> events;
  const size_t dim = std::get<std::vector<double>>(pilot.front()).size();
  for (size_t j = 0; j < dim; ++j) {
    std::vector<double> column;
    column.reserve(pilot.size());
    for (const Outcome& o : pilot) {
      column.push_back(std::get<std::vector<double>>(o)[j]);
    }
    std::vector<Event> more = QuantileIntervalEvents(column, options.grid, j);
    events.insert(events.end(), std::make_move_iterator(more.begin()),
                  std::make_move_iterator(more.end()));
  }
  return events;
}

}  // namespace

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kNoViolationFound:
      return "no-violation-found";
    case Verdict::kViolation:
      return "violation";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

absl::StatusOr<ExactDpReport> CheckDpExact(const Mechanism& mech,
                                           std::span<const DatasetPair> pairs,
                                           const PrivacyBudget& budget) {
  if (!mech.has_pmf()) {
    return absl::UnimplementedError(absl::StrCat(
        mech.name(), " has no exact pmf; use a statistical or density check"));
  }
  ExactDpReport report;
  for (const auto& [a, b] : pairs) {
    absl::StatusOr<DiscreteDistribution> p = mech.Pmf(a);
    if (!p.ok()) return p.status();
    absl::StatusOr<DiscreteDistribution> q = mech.Pmf(b);
    if (!q.ok()) return q.status();
    const double slack = PmfSlack(mech, *p, *q, budget.epsilon());
    ++report.pairs_checked;
    std::optional<DpWitness> w =
        CheckDirection(a, b, *p, *q, budget, slack, report.max_divergence);
    if (!w) {
      w = CheckDirection(b, a, *q, *p, budget, slack, report.max_divergence);
    }
    if (w && report.passed) {
      report.passed = false;
      report.witness = std::move(w);
    }
  }
  return report;
}

absl::StatusOr<DensityDpReport> CheckLaplaceMechanismDp(
    const Mechanism& mech, std::span<const DatasetPair> pairs,
    const PrivacyBudget& budget, double tol) {
  if (!mech.has_laplace_density()) {
    return absl::UnimplementedError(
        absl::StrCat(mech.name(), " has no Laplace density accessor"));
  }
  if (!(tol > 0.0)) return absl::InvalidArgumentError("tol must be positive");
  const double eps = budget.epsilon();

  // Divergence of Lap(b, x) from Lap(b, y) depends on (b, x - y, eps) only.
  std::map<std::tuple<double, double, double>, double> cache;
  auto divergence = [&](double b, double x, double y, double e) {
    const auto key = std::make_tuple(b, x - y, e);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double v = DivergenceLaplacePair(b, x - y, 0.0, e, tol)->value;
    cache.emplace(key, v);
    return v;
  };

  DensityDpReport report;
  bool inconclusive = false;
  for (const auto& [a, b] : pairs) {
    absl::StatusOr<std::vector<LaplaceDistribution>> ca =
        mech.LaplaceComponents(a);
    if (!ca.ok()) return ca.status();
    absl::StatusOr<std::vector<LaplaceDistribution>> cb =
        mech.LaplaceComponents(b);
    if (!cb.ok()) return cb.status();
    if (ca->size() != cb->size()) {
      return absl::InternalError("component counts differ between inputs");
    }
    ++report.pairs_checked;
    double certified = 0.0;
    for (size_t j = 0; j < ca->size(); ++j) {
      const LaplaceDistribution& u = (*ca)[j];
      const LaplaceDistribution& v = (*cb)[j];
      if (u.scale != v.scale || u.IsPointMass()) {
        return absl::UnimplementedError(
            "density check needs equal positive scales per coordinate");
      }
      if (u.location == v.location) continue;
      const double loss = std::fabs(u.location - v.location) / u.scale;
      const bool ok =
          divergence(u.scale, u.location, v.location, loss) <= tol &&
          divergence(u.scale, v.location, u.location, loss) <= tol;
      certified += ok ? loss : std::numeric_limits<double>::infinity();
    }
    report.max_certified_epsilon =
        std::max(report.max_certified_epsilon, certified);
    if (certified <= eps + 1e-12) continue;

    bool found = false;
    for (size_t j = 0; j < ca->size() && !found; ++j) {
      for (int dir = 0; dir < 2 && !found; ++dir) {
        const LaplaceDistribution& u = dir == 0 ? (*ca)[j] : (*cb)[j];
        const LaplaceDistribution& v = dir == 0 ? (*cb)[j] : (*ca)[j];
        if (u.location == v.location) continue;
        const double d = divergence(u.scale, u.location, v.location, eps);
        if (d <= budget.delta() + tol) continue;
        // {t : f_u(t) > exp(eps) f_v(t)} is a half-line ending at the
        // crossing point, on u's side.
        const double mid = 0.5 * (u.location + v.location);
        const double half = 0.5 * eps * u.scale;
        DpWitness w{.from = dir == 0 ? a : b,
                    .to = dir == 0 ? b : a,
                    .event = {}};
        if (u.location < v.location) {
          const double cut = mid - half;
          w.event = absl::StrFormat("x%d < %.17g", j, cut);
          w.prob_from = LaplaceCdf(u, cut);
          w.prob_to = LaplaceCdf(v, cut);
        } else {
          const double cut = mid + half;
          w.event = absl::StrFormat("x%d > %.17g", j, cut);
          w.prob_from = LaplaceSurvival(u, cut);
          w.prob_to = LaplaceSurvival(v, cut);
        }
        w.gap = w.prob_from - std::exp(eps) * w.prob_to - budget.delta();
        if (report.verdict != Verdict::kViolation) {
          report.verdict = Verdict::kViolation;
          report.witness = std::move(w);
        }
        found = true;
      }
    }
    if (!found) inconclusive = true;
  }
  if (report.verdict != Verdict::kViolation && inconclusive) {
    report.verdict = Verdict::kInconclusive;
  }
  return report;
}

absl::StatusOr<StatisticalAuditReport> CheckDpStatistical(
    const Mechanism& mech, std::span<const DatasetPair> pairs,
    const PrivacyBudget& budget, const StatisticalAuditOptions& options) {
  if (options.samples < 1000) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 1000 samples, got ", options.samples));
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1)");
  }
  StatisticalAuditReport report;
  if (pairs.empty()) return report;

  const RandomSource root(options.seed);
  MonteCarloOptions mc{.samples = options.samples,
                       .alpha = options.alpha / (2.0 * pairs.size()),
                       .partitions = options.partitions};
  bool inconclusive = false;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto& [a, b] = pairs[k];
    absl::StatusOr<std::vector<Event>> events =
        BuildEvents(mech, a, b, options, root, k);
    if (!events.ok()) return events.status();
    for (int dir = 0; dir < 2; ++dir) {
      const Dataset& from = dir == 0 ? a : b;
      const Dataset& to = dir == 0 ? b : a;
      ErrorSink sink;
      absl::StatusOr<MonteCarloDivergence> est = DivergenceMonteCarlo(
          SamplerFor(mech, from, sink), SamplerFor(mech, to, sink), *events,
          budget.epsilon(), mc, root.Fork(2 * k + dir));
      if (!est.ok()) return est.status();
      if (absl::Status s = sink.status(); !s.ok()) return s;
      report.audits.push_back({.from = from,
                               .to = to,
                               .lower = est->lower,
                               .upper = est->upper,
                               .witness = est->witness});
      if (est->lower > budget.delta() && est->witness) {
        const double gap = est->lower - budget.delta();
        if (gap > best_gap) {
          best_gap = gap;
          const EventEstimate& e = *est->witness;
          report.witness = DpWitness{
              .from = from,
              .to = to,
              .event = e.event,
              .prob_from = e.mu_hat,
              .prob_to = e.nu_hat,
              .gap = e.mu_hat - std::exp(budget.epsilon()) * e.nu_hat -
                     budget.delta()};
        }
      } else if (est->upper > budget.delta() + options.resolution) {
        inconclusive = true;
      }
    }
  }
  if (report.witness) {
    report.verdict = Verdict::kViolation;
  } else if (inconclusive) {
    report.verdict = Verdict::kInconclusive;
  } else {
    report.verdict = Verdict::kNoViolationFound;
  }
  return report;
}

bool VerifyAdjacencyChain(std::span<const Dataset> chain, const Dataset& from,
                          const Dataset& to, int64_t k) {
  if (chain.empty() || chain.front() != from || chain.back() != to) {
    return false;
  }
  if (static_cast<int64_t>(chain.size()) > k + 1) return false;
  for (size_t t = 0; t + 1 < chain.size(); ++t) {
    absl::StatusOr<int64_t> d = DistL1(chain[t], chain[t + 1]);
    if (!d.ok() || *d > 1) return false;
  }
  return true;
}

absl::StatusOr<GroupPrivacyReport> CheckGroupPrivacy(const Mechanism& mech,
                                                     double eps, int64_t k,
                                                     int64_t max_entry,
                                                     int64_t budget) {
  if (k < 1) return absl::InvalidArgumentError("group size must be >= 1");
  absl::StatusOr<PrivacyBudget> base = PrivacyBudget::Create(eps, 0.0);
  if (!base.ok()) return base.status();
  absl::StatusOr<std::vector<DatasetPair>> unit =
      EnumerateAdjacentPairs(mech.input_length(), max_entry, 1, budget);
  if (!unit.ok()) return unit.status();
  absl::StatusOr<ExactDpReport> pre = CheckDpExact(mech, *unit, *base);
  if (!pre.ok()) return pre.status();

  GroupPrivacyReport report;
  report.precondition_met = pre->passed;
  if (!pre->passed) return report;

  absl::StatusOr<std::vector<DatasetPair>> pairs =
      EnumerateAdjacentPairs(mech.input_length(), max_entry, k, budget);
  if (!pairs.ok()) return pairs.status();
  const PrivacyBudget group =
      PrivacyBudget::Create(static_cast<double>(k) * eps, 0.0).value();
  report.passed = true;
  for (const auto& [a, b] : *pairs) {
    absl::StatusOr<std::vector<Dataset>> chain = AdjacencyChain(a, b, k);
    if (chain.ok() && VerifyAdjacencyChain(*chain, a, b, k)) {
      ++report.chains_verified;
    } else {
      report.passed = false;
    }
    absl::StatusOr<DiscreteDistribution> p = mech.Pmf(a);
    if (!p.ok()) return p.status();
    absl::StatusOr<DiscreteDistribution> q = mech.Pmf(b);
    if (!q.ok()) return q.status();
    const double slack =
        kGroupPrivacySlack + PmfSlack(mech, *p, *q, group.epsilon());
    ++report.pairs_checked;
    std::optional<DpWitness> w =
        CheckDirection(a, b, *p, *q, group, slack, report.max_divergence);
    if (!w) {
      w = CheckDirection(b, a, *q, *p, group, slack, report.max_divergence);
    }
    if (w && !report.witness) {
      report.passed = false;
      report.witness = std::move(w);
    }
  }
  return report;
}

}  // namespace dpkit
