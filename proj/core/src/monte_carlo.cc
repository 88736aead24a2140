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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "boost/math/special_functions/beta.hpp"
#include "dpkit/divergence.h"

namespace dpkit {
namespace {

// Per-event hit counts for one sampler.
struct Tally {
  std::vector<int64_t> hits;
};

// Draws `count` outcomes from `sampler` and counts event membership. Label
// outcomes are grouped first so each event is evaluated once per label.
Tally Collect(const Sampler& sampler, std::span<const Event> events,
              int64_t count, RandomSource rng) {
  Tally tally{std::vector<int64_t>(events.size(), 0)};
  std::map<std::string, int64_t> labels;
  for (int64_t s = 0; s < count; ++s) {
    Outcome o = sampler(rng);
    if (auto* label = std::get_if<std::string>(&o)) {
      ++labels[std::move(*label)];
      continue;
    }
    for (size_t e = 0; e < events.size(); ++e) {
      if (events[e].contains(o)) ++tally.hits[e];
    }
  }
  for (const auto& [label, n] : labels) {
    const Outcome o = label;
    for (size_t e = 0; e < events.size(); ++e) {
      if (events[e].contains(o)) tally.hits[e] += n;
    }
  }
  return tally;
}

std::string FormatEndpoint(double x) { return absl::StrFormat("%.17g", x); }

}  // namespace

std::pair<double, double> ClopperPearson(int64_t k, int64_t n, double alpha) {
  const double a = static_cast<double>(k);
  const double b = static_cast<double>(n - k);
  const double lower =
      k == 0 ? 0.0 : boost::math::ibeta_inv(a, b + 1.0, alpha / 2.0);
  const double upper =
      k == n ? 1.0 : boost::math::ibeta_inv(a + 1.0, b, 1.0 - alpha / 2.0);
  return {lower, upper};
}

absl::StatusOr<MonteCarloDivergence> DivergenceMonteCarlo(
    const Sampler& mu, const Sampler& nu, std::span<const Event> events,
    double eps, const MonteCarloOptions& options, const RandomSource& rng) {
  if (events.empty()) {
    return absl::InvalidArgumentError("event family is empty");
  }
  if (options.samples < 1000) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 1000 samples, got ", options.samples));
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1)");
  }
  if (options.partitions < 1) {
    return absl::InvalidArgumentError("partitions must be positive");
  }

  const int parts = options.partitions;
  std::vector<Tally> mu_parts(parts), nu_parts(parts);
  {
    std::vector<std::jthread> workers;
    workers.reserve(parts);
    for (int p = 0; p < parts; ++p) {
      const int64_t count =
          options.samples / parts + (p < options.samples % parts ? 1 : 0);
      workers.emplace_back([&, p, count] {
        mu_parts[p] = Collect(mu, events, count, rng.Fork(2 * p));
        nu_parts[p] = Collect(nu, events, count, rng.Fork(2 * p + 1));
      });
    }
  }

  const double level = options.alpha / (2.0 * events.size());
  const double scale = std::exp(eps);
  const double n = static_cast<double>(options.samples);
  MonteCarloDivergence out;
  double best_lower = -std::numeric_limits<double>::infinity();
  double best_upper = -std::numeric_limits<double>::infinity();
  for (size_t e = 0; e < events.size(); ++e) {
    int64_t mu_hits = 0, nu_hits = 0;
    for (int p = 0; p < parts; ++p) {
      mu_hits += mu_parts[p].hits[e];
      nu_hits += nu_parts[p].hits[e];
    }
    const auto [mu_lo, mu_hi] = ClopperPearson(mu_hits, options.samples, level);
    const auto [nu_lo, nu_hi] = ClopperPearson(nu_hits, options.samples, level);
    EventEstimate est{.event = events[e].name,
                      .mu_hat = mu_hits / n,
                      .nu_hat = nu_hits / n,
                      .lower = mu_lo - scale * nu_hi,
                      .upper = mu_hi - scale * nu_lo};
    if (est.lower > best_lower) {
      best_lower = est.lower;
      if (est.lower > 0.0) out.witness = est;
    }
    best_upper = std::max(best_upper, est.upper);
  }
  // The empty event is always available, so neither bound is below 0.
  out.lower = std::max(0.0, best_lower);
  out.upper = std::max(out.lower, best_upper);
  out.result = DivergenceResult{.epsilon = eps,
                                .value = out.lower,
                                .method = DivergenceMethod::kMonteCarlo,
                                .error_bound = out.upper - out.lower};
  return out;
}

std::vector<Event> QuantileIntervalEvents(std::span<const double> pilot,
                                          int grid, size_t coordinate) {
  std::vector<double> sorted(pilot.begin(), pilot.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  if (!sorted.empty()) {
    for (int k = 1; k <= grid; ++k) {
      const size_t idx = std::min(
          sorted.size() - 1,
          static_cast<size_t>(k * sorted.size() / (grid + 1)));
      cuts.push_back(sorted[idx]);
    }
  }
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto coord = [coordinate](const Outcome& o) {
    const auto* v = std::get_if<std::vector<double>>(&o);
    return v != nullptr && coordinate < v->size()
               ? (*v)[coordinate]
               : std::numeric_limits<double>::quiet_NaN();
  };
  const std::string var = absl::StrCat("x", coordinate);
  std::vector<Event> events;
  for (double c : cuts) {
    events.push_back({absl::StrCat(var, " <= ", FormatEndpoint(c)),
                      [coord, c](const Outcome& o) { return coord(o) <= c; }});
    events.push_back({absl::StrCat(var, " > ", FormatEndpoint(c)),
                      [coord, c](const Outcome& o) { return coord(o) > c; }});
  }
  for (size_t i = 0; i < cuts.size(); ++i) {
    for (size_t j = i + 1; j < cuts.size(); ++j) {
      const double lo = cuts[i], hi = cuts[j];
      events.push_back(
          {absl::StrCat(FormatEndpoint(lo), " < ", var,
                        " <= ", FormatEndpoint(hi)),
           [coord, lo, hi](const Outcome& o) {
             const double x = coord(o);
             return x > lo && x <= hi;
           }});
    }
  }
  return events;
}

std::vector<Event> LabelSubsetEvents(std::span<const std::string> labels,
                                     size_t max_exact) {
  auto member = [](std::vector<std::string> set) {
    std::sort(set.begin(), set.end());
    return [set = std::move(set)](const Outcome& o) {
      const auto* l = std::get_if<std::string>(&o);
      return l != nullptr && std::binary_search(set.begin(), set.end(), *l);
    };
  };
  std::vector<Event> events;
  if (labels.size() <= max_exact) {
    const uint64_t total = uint64_t{1} << labels.size();
    for (uint64_t mask = 1; mask < total; ++mask) {
      std::vector<std::string> set;
      for (size_t k = 0; k < labels.size(); ++k) {
        if (mask >> k & 1) set.push_back(labels[k]);
      }
      const std::string name = absl::StrCat("{", absl::StrJoin(set, ","), "}");
      events.push_back({name, member(std::move(set))});
    }
    return events;
  }
  for (size_t k = 0; k < labels.size(); ++k) {
    events.push_back({absl::StrCat("{", labels[k], "}"), member({labels[k]})});
    std::vector<std::string> rest;
    for (size_t j = 0; j < labels.size(); ++j) {
      if (j != k) rest.push_back(labels[j]);
    }
    events.push_back({absl::StrCat("not {", labels[k], "}"),
                      member(std::move(rest))});
  }
  return events;
}

}  // namespace dpkit
