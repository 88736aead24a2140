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

#include "dpkit/divergence.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dpkit/laplace.h"
#include "dpkit/quadrature.h"

namespace dpkit {
namespace {

// Sorted union of both supports with the aligned masses.
struct AlignedPair {
  std::vector<std::string> labels;
  std::vector<double> mu;
  std::vector<double> nu;
};

AlignedPair Align(const DiscreteDistribution& mu,
                  const DiscreteDistribution& nu) {
  AlignedPair out;
  const auto& a = mu.masses();
  const auto& b = nu.masses();
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.labels.push_back(a[i].first);
      out.mu.push_back(a[i].second);
      out.nu.push_back(0.0);
      ++i;
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.labels.push_back(b[j].first);
      out.mu.push_back(0.0);
      out.nu.push_back(b[j].second);
      ++j;
    } else {
      out.labels.push_back(a[i].first);
      out.mu.push_back(a[i].second);
      out.nu.push_back(b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

absl::Status CheckBruteForceCapacity(size_t outcomes) {
  if (outcomes > kBruteForceMaxOutcomes) {
    return absl::ResourceExhaustedError(
        absl::StrCat("subset enumeration over ", outcomes,
                     " outcomes exceeds the limit of ",
                     kBruteForceMaxOutcomes));
  }
  return absl::OkStatus();
}

// Calls visit(mu(S), nu(S)) for every subset S, walking the subsets in Gray
// code order so each step adds or removes one outcome.
template <typename Visit>
void ForEachSubset(const AlignedPair& p, Visit&& visit) {
  const size_t n = p.labels.size();
  double mu_s = 0.0, nu_s = 0.0;
  std::vector<bool> in(n, false);
  visit(mu_s, nu_s);
  const uint64_t total = uint64_t{1} << n;
  for (uint64_t step = 1; step < total; ++step) {
    const int bit = __builtin_ctzll(step);
    in[bit] = !in[bit];
    const double sign = in[bit] ? 1.0 : -1.0;
    mu_s += sign * p.mu[bit];
    nu_s += sign * p.nu[bit];
    // Re-sum occasionally so the running totals do not drift.
    if ((step & 0xfff) == 0) {
      mu_s = nu_s = 0.0;
      for (size_t k = 0; k < n; ++k) {
        if (in[k]) {
          mu_s += p.mu[k];
          nu_s += p.nu[k];
        }
      }
    }
    visit(mu_s, nu_s);
  }
}

double LogDensity(const LaplaceDistribution& d, double t) {
  return -std::fabs(t - d.location) / d.scale - std::log(2.0 * d.scale);
}

}  // namespace

std::string OutcomeToString(const Outcome& outcome) {
  if (const auto* label = std::get_if<std::string>(&outcome)) return *label;
  const auto& values = std::get<std::vector<double>>(outcome);
  return absl::StrCat(
      "[",
      absl::StrJoin(values, ",",
                    [](std::string* out, double v) {
                      absl::StrAppend(out, absl::StrFormat("%.17g", v));
                    }),
      "]");
}

absl::StatusOr<DiscreteDistribution> DiscreteDistribution::Create(
    std::vector<std::pair<std::string, double>> masses, double tolerance) {
  std::sort(masses.begin(), masses.end());
  double total = 0.0;
  for (size_t i = 0; i < masses.size(); ++i) {
    const auto& [label, p] = masses[i];
    if (!std::isfinite(p) || p < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("mass of '", label, "' is ", p));
    }
    if (i > 0 && masses[i - 1].first == label) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate outcome label '", label, "'"));
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > tolerance) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "masses sum to %.17g, not 1 (tolerance %g)", total, tolerance));
  }
  return DiscreteDistribution(std::move(masses));
}

DiscreteDistribution DiscreteDistribution::PointMass(std::string label) {
  return DiscreteDistribution({{std::move(label), 1.0}});
}

double DiscreteDistribution::Prob(std::string_view label) const {
  auto it = std::lower_bound(
      masses_.begin(), masses_.end(), label,
      [](const auto& entry, std::string_view l) { return entry.first < l; });
  return it != masses_.end() && it->first == label ? it->second : 0.0;
}

std::vector<std::string> DiscreteDistribution::Labels() const {
  std::vector<std::string> out;
  out.reserve(masses_.size());
  for (const auto& [label, p] : masses_) out.push_back(label);
  return out;
}

std::string DiscreteDistribution::Sample(RandomSource& rng) const {
  const double u = rng.Uniform();
  double cumulative = 0.0;
  for (const auto& [label, p] : masses_) {
    cumulative += p;
    if (u < cumulative) return label;
  }
  // Rounding left u above the final cumulative sum; take the last outcome
  // with positive mass.
  for (auto it = masses_.rbegin(); it != masses_.rend(); ++it) {
    if (it->second > 0.0) return it->first;
  }
  return masses_.back().first;
}

absl::StatusOr<const DiscreteDistribution*> DiscreteKernel::Row(
    std::string_view x) const {
  auto it = rows_.find(std::string(x));
  if (it == rows_.end()) {
    return absl::NotFoundError(
        absl::StrCat("kernel has no row for input '", std::string(x), "'"));
  }
  return &it->second;
}

absl::StatusOr<DiscreteDistribution> Pushforward(const DiscreteDistribution& mu,
                                                 const DiscreteKernel& f) {
  auto deviation = [](const DiscreteDistribution& d) {
    double total = 0.0;
    for (const auto& [label, p] : d.masses()) total += p;
    return std::fabs(total - 1.0);
  };
  // The output is normalized as well as the inputs were.
  double slack = deviation(mu) + kNormalizationTolerance;
  std::map<std::string, double> out;
  for (const auto& [x, px] : mu.masses()) {
    absl::StatusOr<const DiscreteDistribution*> row = f.Row(x);
    if (!row.ok()) return row.status();
    slack = std::max(slack, deviation(mu) + deviation(**row) +
                                kNormalizationTolerance);
    for (const auto& [y, py] : (*row)->masses()) out[y] += px * py;
  }
  return DiscreteDistribution::Create(
      std::vector<std::pair<std::string, double>>(out.begin(), out.end()),
      slack);
}

std::string_view DivergenceMethodName(DivergenceMethod method) {
  switch (method) {
    case DivergenceMethod::kExactDiscrete:
      return "exact-discrete";
    case DivergenceMethod::kQuadrature:
      return "quadrature";
    case DivergenceMethod::kMonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

absl::StatusOr<DivergenceResult> DivergenceDiscrete(
    const DiscreteDistribution& mu, const DiscreteDistribution& nu,
    double eps) {
  const AlignedPair p = Align(mu, nu);
  const double scale = std::exp(eps);
  double total = 0.0;
  for (size_t k = 0; k < p.labels.size(); ++k) {
    total += std::max(0.0, p.mu[k] - scale * p.nu[k]);
  }
  return DivergenceResult{.epsilon = eps,
                          .value = total,
                          .method = DivergenceMethod::kExactDiscrete,
                          .error_bound = 0.0};
}

std::vector<std::string> DivergenceWitness(const DiscreteDistribution& mu,
                                           const DiscreteDistribution& nu,
                                           double eps) {
  const AlignedPair p = Align(mu, nu);
  const double scale = std::exp(eps);
  std::vector<std::string> out;
  for (size_t k = 0; k < p.labels.size(); ++k) {
    if (p.mu[k] > scale * p.nu[k]) out.push_back(p.labels[k]);
  }
  return out;
}

absl::StatusOr<DivergenceResult> DivergenceBruteForce(
    const DiscreteDistribution& mu, const DiscreteDistribution& nu,
    double eps) {
  const AlignedPair p = Align(mu, nu);
  if (absl::Status s = CheckBruteForceCapacity(p.labels.size()); !s.ok()) {
    return s;
  }
  const double scale = std::exp(eps);
  double best = 0.0;
  ForEachSubset(p, [&](double mu_s, double nu_s) {
    best = std::max(best, mu_s - scale * nu_s);
  });
  return DivergenceResult{.epsilon = eps,
                          .value = best,
                          .method = DivergenceMethod::kExactDiscrete,
                          .error_bound = 0.0};
}

absl::StatusOr<bool> AllEventsBounded(const DiscreteDistribution& mu,
                                      const DiscreteDistribution& nu,
                                      double eps, double delta) {
  const AlignedPair p = Align(mu, nu);
  if (absl::Status s = CheckBruteForceCapacity(p.labels.size()); !s.ok()) {
    return s;
  }
  const double scale = std::exp(eps);
  bool bounded = true;
  ForEachSubset(p, [&](double mu_s, double nu_s) {
    if (mu_s > scale * nu_s + delta) bounded = false;
  });
  return bounded;
}

absl::StatusOr<ComposabilityCheck> CheckComposability(
    const DiscreteDistribution& mu, const DiscreteDistribution& nu,
    const DiscreteKernel& f, const DiscreteKernel& g, double eps1,
    double eps2, double delta1, double delta2) {
  if (f.rows().size() != g.rows().size() ||
      !std::equal(f.rows().begin(), f.rows().end(), g.rows().begin(),
                  [](const auto& a, const auto& b) {
                    return a.first == b.first;
                  })) {
    return absl::InvalidArgumentError(
        "kernels f and g are defined on different input labels");
  }
  ComposabilityCheck out;
  out.input_divergence = DivergenceDiscrete(mu, nu, eps1)->value;
  for (const auto& [x, fx] : f.rows()) {
    const DiscreteDistribution& gx = *g.Row(x).value();
    out.kernel_divergence = std::max(out.kernel_divergence,
                                     DivergenceDiscrete(fx, gx, eps2)->value);
  }
  absl::StatusOr<DiscreteDistribution> mu_f = Pushforward(mu, f);
  if (!mu_f.ok()) return mu_f.status();
  absl::StatusOr<DiscreteDistribution> nu_g = Pushforward(nu, g);
  if (!nu_g.ok()) return nu_g.status();
  out.composed_divergence =
      DivergenceDiscrete(*mu_f, *nu_g, eps1 + eps2)->value;

  out.precondition_met = out.input_divergence <= delta1 + kPreconditionSlack &&
                         out.kernel_divergence <= delta2 + kPreconditionSlack;
  if (!out.precondition_met) {
    out.detail = absl::StrFormat(
        "precondition violated: D_%g(mu, nu) = %.17g vs delta1 = %g; "
        "max_x D_%g(f(x), g(x)) = %.17g vs delta2 = %g",
        eps1, out.input_divergence, delta1, eps2, out.kernel_divergence,
        delta2);
    return out;
  }
  out.holds =
      out.composed_divergence <= delta1 + delta2 + kComposabilitySlack;
  if (!out.holds) {
    out.detail = absl::StrFormat(
        "D_%g(mu >>= f, nu >>= g) = %.17g exceeds %g + %g", eps1 + eps2,
        out.composed_divergence, delta1, delta2);
  }
  return out;
}

TransitivityCheck CheckTransitivity(const DiscreteDistribution& mu1,
                                    const DiscreteDistribution& mu2,
                                    const DiscreteDistribution& mu3,
                                    double eps1, double eps2) {
  TransitivityCheck out;
  out.precondition_met =
      DivergenceDiscrete(mu1, mu2, eps1)->value <= kPreconditionSlack &&
      DivergenceDiscrete(mu2, mu3, eps2)->value <= kPreconditionSlack;
  out.composed_divergence = DivergenceDiscrete(mu1, mu3, eps1 + eps2)->value;
  out.holds = out.precondition_met && out.composed_divergence <= 1e-12;
  return out;
}

std::vector<double> LaplacePairBreakpoints(const LaplaceDistribution& mu,
                                           const LaplaceDistribution& nu,
                                           double eps) {
  const double lo = std::min(mu.location, nu.location);
  const double hi = std::max(mu.location, nu.location);
  std::vector<double> points{lo, hi};
  // log f_mu - (eps + log f_nu) is linear on each of the three pieces cut
  // by the locations, with slope fixed by the side of each location.
  auto gap = [&](double t) {
    return LogDensity(mu, t) - (eps + LogDensity(nu, t));
  };
  auto side = [](double t, double z) { return t < z ? -1.0 : 1.0; };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double bounds[3][2] = {{-kInf, lo}, {lo, hi}, {hi, kInf}};
  const double anchors[3] = {lo, lo, hi};
  const double probes[3] = {lo - 1.0, 0.5 * (lo + hi), hi + 1.0};
  for (int k = 0; k < 3; ++k) {
    if (k == 1 && !(hi > lo)) continue;
    const double t = probes[k];
    const double slope = -side(t, mu.location) / mu.scale +
                         side(t, nu.location) / nu.scale;
    if (slope == 0.0) continue;
    const double root = anchors[k] - gap(anchors[k]) / slope;
    if (root >= bounds[k][0] && root <= bounds[k][1]) points.push_back(root);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

absl::StatusOr<DivergenceResult> DivergenceLaplace(
    const LaplaceDistribution& mu, const LaplaceDistribution& nu, double eps,
    double tol) {
  if (mu.IsPointMass() || nu.IsPointMass()) {
    return absl::InvalidArgumentError(
        "quadrature needs Laplace distributions with positive scale");
  }
  if (!(tol > 0.0)) {
    return absl::InvalidArgumentError("tolerance must be positive");
  }
  const double scale = std::exp(eps);
  auto integrand = [&](double t) {
    const double fm = std::exp(LogDensity(mu, t));
    const double fn = std::exp(LogDensity(nu, t));
    return std::max(0.0, fm - scale * fn);
  };
  const double widest = std::max(mu.scale, nu.scale);
  const double a = std::min(mu.location, nu.location) -
                   kLaplaceTailScales * widest;
  const double b = std::max(mu.location, nu.location) +
                   kLaplaceTailScales * widest;
  const std::vector<double> cuts = LaplacePairBreakpoints(mu, nu, eps);
  // Half the budget goes to quadrature; the truncated tails of mu carry
  // at most exp(-40) of mass, far below any useful tolerance.
  const QuadratureResult r = IntegratePiecewise(integrand, a, b, cuts,
                                                0.5 * tol);
  return DivergenceResult{.epsilon = eps,
                          .value = r.value,
                          .method = DivergenceMethod::kQuadrature,
                          .error_bound = tol};
}

absl::StatusOr<DivergenceResult> DivergenceLaplacePair(double b, double x,
                                                       double y, double eps,
                                                       double tol) {
  if (!(b > 0.0)) {
    return absl::InvalidArgumentError("Laplace scale must be positive");
  }
  return DivergenceLaplace({.scale = b, .location = x},
                           {.scale = b, .location = y}, eps, tol);
}

}  // namespace dpkit
