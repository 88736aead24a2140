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

#include "dpkit/mechanism.h"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "dpkit/laplace.h"

namespace dpkit {
namespace {

constexpr int kMaxRandomizedResponseLevels = 16;

std::string BitString(uint64_t bits, int levels) {
  std::string out(levels, '0');
  for (int t = 0; t < levels; ++t) {
    if (bits >> t & 1) out[t] = '1';
  }
  return out;
}

}  // namespace

absl::Status Mechanism::CheckInput(const Dataset& d) const {
  if (d.size() != parts_.input_length) {
    return absl::InvalidArgumentError(absl::StrCat(
        parts_.name, " expects histograms of length ", parts_.input_length,
        ", got ", d.size()));
  }
  return absl::OkStatus();
}

absl::StatusOr<Outcome> Mechanism::Sample(const Dataset& d,
                                          RandomSource& rng) const {
  if (absl::Status s = CheckInput(d); !s.ok()) return s;
  return parts_.sample(d, rng);
}

absl::StatusOr<DiscreteDistribution> Mechanism::Pmf(const Dataset& d) const {
  if (!parts_.pmf) {
    return absl::UnimplementedError(
        absl::StrCat(parts_.name, " has no exact pmf"));
  }
  if (absl::Status s = CheckInput(d); !s.ok()) return s;
  return parts_.pmf(d);
}

absl::StatusOr<std::vector<LaplaceDistribution>> Mechanism::LaplaceComponents(
    const Dataset& d) const {
  if (!parts_.laplace) {
    return absl::UnimplementedError(
        absl::StrCat(parts_.name, " has no Laplace density accessor"));
  }
  if (absl::Status s = CheckInput(d); !s.ok()) return s;
  return parts_.laplace(d);
}

absl::StatusOr<SensitivitySpec> SensitivitySpec::Create(double value,
                                                        Provenance provenance) {
  if (std::isnan(value) || value < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("sensitivity must be >= 0, got ", value));
  }
  SensitivitySpec spec;
  spec.value = value;
  spec.provenance = provenance;
  return spec;
}

QueryFn CountingQueryFn(CountingQuerySet q) {
  return [q = std::move(q)](const Dataset& d) {
    std::vector<double> out;
    out.reserve(q.m());
    for (size_t i = 0; i < q.m(); ++i) {
      out.push_back(static_cast<double>(Counting(q, i, d).value()));
    }
    return out;
  };
}

absl::StatusOr<Mechanism> LaplaceMechanism(QueryFn f, size_t input_length,
                                           size_t m,
                                           const SensitivitySpec& sensitivity,
                                           double eps) {
  if (!(eps > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace mechanism needs eps > 0, got ", eps));
  }
  if (!(sensitivity.value > 0.0) || std::isinf(sensitivity.value)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Laplace mechanism needs 0 < sensitivity < inf, got ",
        sensitivity.value));
  }
  const double scale = sensitivity.value / eps;
  auto evaluate = [f, m](const Dataset& d) -> absl::StatusOr<std::vector<double>> {
    std::vector<double> values = f(d);
    if (values.size() != m) {
      return absl::InternalError(absl::StrCat(
          "query returned ", values.size(), " values, expected ", m));
    }
    return values;
  };
  Mechanism::Parts parts;
  parts.name = "laplace";
  parts.input_length = input_length;
  parts.kind = OutputKind::kVector;
  parts.output_dim = m;
  parts.sample = [evaluate, scale](const Dataset& d,
                                   RandomSource& rng) -> absl::StatusOr<Outcome> {
    absl::StatusOr<std::vector<double>> values = evaluate(d);
    if (!values.ok()) return values.status();
    return Outcome(LaplaceVectorSample(scale, *values, rng));
  };
  parts.laplace = [f, scale](const Dataset& d) {
    std::vector<LaplaceDistribution> out;
    for (double z : f(d)) out.push_back({.scale = scale, .location = z});
    return out;
  };
  return Mechanism(std::move(parts));
}

absl::StatusOr<Mechanism> RandomizedResponse(double flip_probability,
                                             int levels) {
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "flip probability must lie in [0, 1], got ", flip_probability));
  }
  if (levels < 1 || levels > kMaxRandomizedResponseLevels) {
    return absl::InvalidArgumentError(absl::StrCat(
        "levels must lie in [1, ", kMaxRandomizedResponseLevels, "]"));
  }
  const double p = flip_probability;
  auto truth = [levels](const Dataset& d) {
    uint64_t bits = 0;
    for (int t = 0; t < levels; ++t) {
      if (d[0] > t) bits |= uint64_t{1} << t;
    }
    return bits;
  };
  std::vector<std::string> labels;
  for (uint64_t bits = 0; bits < (uint64_t{1} << levels); ++bits) {
    labels.push_back(BitString(bits, levels));
  }
  Mechanism::Parts parts;
  parts.name = "randomized-response";
  parts.input_length = 1;
  parts.kind = OutputKind::kLabel;
  parts.output_labels = labels;
  parts.sample = [truth, p, levels](const Dataset& d,
                                    RandomSource& rng) -> absl::StatusOr<Outcome> {
    uint64_t bits = truth(d);
    for (int t = 0; t < levels; ++t) {
      if (rng.Uniform() < p) bits ^= uint64_t{1} << t;
    }
    return Outcome(BitString(bits, levels));
  };
  parts.pmf = [truth, p, levels](const Dataset& d)
      -> absl::StatusOr<DiscreteDistribution> {
    const uint64_t bits = truth(d);
    std::vector<std::pair<std::string, double>> masses;
    for (uint64_t out = 0; out < (uint64_t{1} << levels); ++out) {
      const int flips = __builtin_popcountll(out ^ bits);
      masses.emplace_back(BitString(out, levels),
                          std::pow(p, flips) *
                              std::pow(1.0 - p, levels - flips));
    }
    return DiscreteDistribution::Create(std::move(masses), 1e-12);
  };
  return Mechanism(std::move(parts));
}

Mechanism ConstantMechanism(std::string label, size_t input_length) {
  Mechanism::Parts parts;
  parts.name = "constant";
  parts.input_length = input_length;
  parts.kind = OutputKind::kLabel;
  parts.output_labels = std::vector<std::string>{label};
  parts.sample = [label](const Dataset&, RandomSource&)
      -> absl::StatusOr<Outcome> { return Outcome(label); };
  parts.pmf = [label](const Dataset&) -> absl::StatusOr<DiscreteDistribution> {
    return DiscreteDistribution::PointMass(label);
  };
  return Mechanism(std::move(parts));
}

absl::StatusOr<Mechanism> PostProcess(const Mechanism& mech,
                                      const DiscreteKernel& kernel) {
  if (mech.output_kind() != OutputKind::kLabel) {
    return absl::InvalidArgumentError(
        "a finite kernel needs a label-valued mechanism");
  }
  if (mech.output_labels()) {
    for (const std::string& label : *mech.output_labels()) {
      if (!kernel.Row(label).ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "kernel is not total: no row for output '", label, "'"));
      }
    }
  }
  Mechanism::Parts parts;
  parts.name = absl::StrCat("post(", mech.name(), ")");
  parts.input_length = mech.input_length();
  parts.kind = OutputKind::kLabel;
  {
    std::map<std::string, bool> codomain;
    for (const auto& [x, row] : kernel.rows()) {
      for (const std::string& y : row.Labels()) codomain[y] = true;
    }
    std::vector<std::string> labels;
    for (const auto& [y, unused] : codomain) labels.push_back(y);
    parts.output_labels = std::move(labels);
  }
  const Mechanism inner = mech;
  parts.sample = [inner, kernel](const Dataset& d,
                                 RandomSource& rng) -> absl::StatusOr<Outcome> {
    absl::StatusOr<Outcome> x = inner.Sample(d, rng);
    if (!x.ok()) return x.status();
    absl::StatusOr<const DiscreteDistribution*> row =
        kernel.Row(std::get<std::string>(*x));
    if (!row.ok()) return row.status();
    return Outcome((*row)->Sample(rng));
  };
  if (mech.has_pmf()) {
    parts.pmf = [inner, kernel](const Dataset& d)
        -> absl::StatusOr<DiscreteDistribution> {
      absl::StatusOr<DiscreteDistribution> mu = inner.Pmf(d);
      if (!mu.ok()) return mu.status();
      return Pushforward(*mu, kernel);
    };
    parts.pmf_error = mech.pmf_error();
  }
  return Mechanism(std::move(parts));
}

Mechanism PostProcessMap(
    const Mechanism& mech, std::function<Outcome(const Outcome&)> g,
    OutputKind kind, size_t output_dim,
    std::optional<std::vector<std::string>> output_labels) {
  Mechanism::Parts parts;
  parts.name = absl::StrCat("map(", mech.name(), ")");
  parts.input_length = mech.input_length();
  parts.kind = kind;
  parts.output_dim = output_dim;
  parts.output_labels = std::move(output_labels);
  const Mechanism inner = mech;
  parts.sample = [inner, g = std::move(g)](
                     const Dataset& d,
                     RandomSource& rng) -> absl::StatusOr<Outcome> {
    absl::StatusOr<Outcome> x = inner.Sample(d, rng);
    if (!x.ok()) return x.status();
    return g(*x);
  };
  return Mechanism(std::move(parts));
}

std::string PairLabel(const std::string& a, const std::string& b) {
  return absl::StrCat("(", a, ",", b, ")");
}

absl::StatusOr<Mechanism> PairCompose(const Mechanism& first,
                                      const Mechanism& second) {
  if (first.input_length() != second.input_length()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input spaces differ: histograms of length ", first.input_length(),
        " vs ", second.input_length()));
  }
  if (first.output_kind() != second.output_kind()) {
    return absl::InvalidArgumentError(
        "cannot pair a label-valued with a vector-valued mechanism");
  }
  Mechanism::Parts parts;
  parts.name = absl::StrCat("pair(", first.name(), ",", second.name(), ")");
  parts.input_length = first.input_length();
  parts.kind = first.output_kind();
  parts.output_dim = first.output_dim() + second.output_dim();
  if (first.output_labels() && second.output_labels()) {
    std::vector<std::string> labels;
    for (const std::string& a : *first.output_labels()) {
      for (const std::string& b : *second.output_labels()) {
        labels.push_back(PairLabel(a, b));
      }
    }
    parts.output_labels = std::move(labels);
  }
  const Mechanism m1 = first;
  const Mechanism m2 = second;
  parts.sample = [m1, m2](const Dataset& d,
                          RandomSource& rng) -> absl::StatusOr<Outcome> {
    absl::StatusOr<Outcome> a = m1.Sample(d, rng);
    if (!a.ok()) return a.status();
    absl::StatusOr<Outcome> b = m2.Sample(d, rng);
    if (!b.ok()) return b.status();
    if (m1.output_kind() == OutputKind::kLabel) {
      return Outcome(
          PairLabel(std::get<std::string>(*a), std::get<std::string>(*b)));
    }
    std::vector<double> joined = std::get<std::vector<double>>(*a);
    const auto& tail = std::get<std::vector<double>>(*b);
    joined.insert(joined.end(), tail.begin(), tail.end());
    return Outcome(std::move(joined));
  };
  if (first.has_pmf() && second.has_pmf()) {
    parts.pmf = [m1, m2](const Dataset& d)
        -> absl::StatusOr<DiscreteDistribution> {
      absl::StatusOr<DiscreteDistribution> a = m1.Pmf(d);
      if (!a.ok()) return a.status();
      absl::StatusOr<DiscreteDistribution> b = m2.Pmf(d);
      if (!b.ok()) return b.status();
      std::vector<std::pair<std::string, double>> masses;
      for (const auto& [la, pa] : a->masses()) {
        for (const auto& [lb, pb] : b->masses()) {
          masses.emplace_back(PairLabel(la, lb), pa * pb);
        }
      }
      return DiscreteDistribution::Create(
          std::move(masses),
          kNormalizationTolerance + 2.0 * (m1.pmf_error() * a->size() +
                                           m2.pmf_error() * b->size()));
    };
    parts.pmf_error = first.pmf_error() + second.pmf_error();
  }
  if (first.has_laplace_density() && second.has_laplace_density()) {
    parts.laplace = [m1, m2](const Dataset& d) {
      std::vector<LaplaceDistribution> out = *m1.LaplaceComponents(d);
      const std::vector<LaplaceDistribution> tail = *m2.LaplaceComponents(d);
      out.insert(out.end(), tail.begin(), tail.end());
      return out;
    };
  }
  return Mechanism(std::move(parts));
}

absl::StatusOr<Mechanism> AdaptiveCompose(
    const Mechanism& first, AdaptiveKernel kernel,
    std::optional<std::vector<std::string>> output_labels) {
  if (first.output_kind() != OutputKind::kLabel) {
    return absl::InvalidArgumentError(
        "adaptive composition needs a label-valued first stage");
  }
  Mechanism::Parts parts;
  parts.name = absl::StrCat("adaptive(", first.name(), ")");
  parts.input_length = first.input_length();
  parts.kind = OutputKind::kLabel;
  parts.output_labels = std::move(output_labels);
  const Mechanism m1 = first;
  parts.sample = [m1, kernel](const Dataset& d,
                              RandomSource& rng) -> absl::StatusOr<Outcome> {
    absl::StatusOr<Outcome> z = m1.Sample(d, rng);
    if (!z.ok()) return z.status();
    absl::StatusOr<DiscreteDistribution> next =
        kernel(d, std::get<std::string>(*z));
    if (!next.ok()) return next.status();
    return Outcome(next->Sample(rng));
  };
  if (first.has_pmf()) {
    parts.pmf = [m1, kernel](const Dataset& d)
        -> absl::StatusOr<DiscreteDistribution> {
      absl::StatusOr<DiscreteDistribution> mu = m1.Pmf(d);
      if (!mu.ok()) return mu.status();
      std::map<std::string, DiscreteDistribution> rows;
      for (const auto& [z, pz] : mu->masses()) {
        absl::StatusOr<DiscreteDistribution> row = kernel(d, z);
        if (!row.ok()) return row.status();
        rows.emplace(z, *std::move(row));
      }
      return Pushforward(*mu, DiscreteKernel(std::move(rows)));
    };
    parts.pmf_error = first.pmf_error();
  }
  return Mechanism(std::move(parts));
}

}  // namespace dpkit
