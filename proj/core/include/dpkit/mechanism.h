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

// Mechanisms: randomized maps from histograms to outcomes, with optional
// exact accessors, and the combinators that mirror post-processing,
// sequential composition, and adaptive composition.
//
// Exactness propagates explicitly. Pushforward, product, and finite mixture
// keep an exact pmf; a map over real-valued outputs keeps only the sampler.

#ifndef DPKIT_MECHANISM_H_
#define DPKIT_MECHANISM_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpkit/dataset.h"
#include "dpkit/divergence.h"
#include "dpkit/laplace.h"
#include "dpkit/outcome.h"
#include "dpkit/random.h"

namespace dpkit {

enum class OutputKind { kLabel, kVector };

class Mechanism {
 public:
  using SampleFn =
      std::function<absl::StatusOr<Outcome>(const Dataset&, RandomSource&)>;
  using PmfFn =
      std::function<absl::StatusOr<DiscreteDistribution>(const Dataset&)>;
  // The output is distributed as the product of these per-coordinate
  // Laplace distributions.
  using LaplaceFn = std::function<std::vector<LaplaceDistribution>(
      const Dataset&)>;

  struct Parts {
    std::string name;
    size_t input_length = 0;
    OutputKind kind = OutputKind::kLabel;
    size_t output_dim = 0;
    // Declared finite output space, when known.
    std::optional<std::vector<std::string>> output_labels;
    SampleFn sample;
    PmfFn pmf;
    // Absolute error bound on each pmf mass (0 for exact arithmetic).
    double pmf_error = 0.0;
    LaplaceFn laplace;
  };

  explicit Mechanism(Parts parts) : parts_(std::move(parts)) {}

  const std::string& name() const { return parts_.name; }
  size_t input_length() const { return parts_.input_length; }
  OutputKind output_kind() const { return parts_.kind; }
  size_t output_dim() const { return parts_.output_dim; }
  const std::optional<std::vector<std::string>>& output_labels() const {
    return parts_.output_labels;
  }
  bool has_pmf() const { return static_cast<bool>(parts_.pmf); }
  bool has_laplace_density() const {
    return static_cast<bool>(parts_.laplace);
  }
  double pmf_error() const { return parts_.pmf_error; }

  absl::StatusOr<Outcome> Sample(const Dataset& d, RandomSource& rng) const;
  absl::StatusOr<DiscreteDistribution> Pmf(const Dataset& d) const;
  absl::StatusOr<std::vector<LaplaceDistribution>> LaplaceComponents(
      const Dataset& d) const;

  const Parts& parts() const { return parts_; }

 private:
  absl::Status CheckInput(const Dataset& d) const;

  Parts parts_;
};

struct SensitivitySpec {
  enum class Provenance { kDeclared, kExhaustive, kAnalytic };

  // Fails when value is negative or NaN; +infinity is allowed and marks an
  // unbounded query.
  static absl::StatusOr<SensitivitySpec> Create(double value,
                                                Provenance provenance);

  double value = 0.0;
  Provenance provenance = Provenance::kDeclared;
};

using QueryFn = std::function<std::vector<double>(const Dataset&)>;

// Query function returning the counting-query tuple as doubles.
QueryFn CountingQueryFn(CountingQuerySet q);

// D -> f(D) + Lap(sensitivity / eps)^m. Requires eps > 0 and a finite,
// positive sensitivity. The density accessor reports the m shifted Laplace
// components.
absl::StatusOr<Mechanism> LaplaceMechanism(QueryFn f, size_t input_length,
                                           size_t m,
                                           const SensitivitySpec& sensitivity,
                                           double eps);

// Thermometer randomized response over a single-type histogram [v]: for each
// t < levels the reported bit is [v > t], flipped independently with
// probability `flip_probability`. Output labels are bit strings of length
// `levels`. With levels = 1 this is binary randomized response, which is
// (ln((1 - p) / p), 0)-DP for p <= 1/2.
absl::StatusOr<Mechanism> RandomizedResponse(double flip_probability,
                                             int levels = 1);

// Always returns `label`.
Mechanism ConstantMechanism(std::string label, size_t input_length);

// Applies a finite kernel to a label-valued mechanism. The kernel must have
// a row for every declared output label.
absl::StatusOr<Mechanism> PostProcess(const Mechanism& mech,
                                      const DiscreteKernel& kernel);

// Applies a deterministic map to any mechanism. The result has no exact
// accessor; `output_labels` declares a finite codomain when the map returns
// labels.
Mechanism PostProcessMap(
    const Mechanism& mech, std::function<Outcome(const Outcome&)> g,
    OutputKind kind, size_t output_dim = 0,
    std::optional<std::vector<std::string>> output_labels = std::nullopt);

// Label of the pair outcome (a, b).
std::string PairLabel(const std::string& a, const std::string& b);

// Runs both mechanisms independently on the same input. Label outputs pair
// into "(a,b)" labels with a product pmf; vector outputs concatenate.
absl::StatusOr<Mechanism> PairCompose(const Mechanism& first,
                                      const Mechanism& second);

// Second stage of an adaptive composition: the output distribution given
// the input and the first stage's label.
using AdaptiveKernel = std::function<absl::StatusOr<DiscreteDistribution>(
    const Dataset&, const std::string&)>;

// z <- first(D); y <- kernel(D, z); return y. The pmf, when `first` has one,
// is the mixture sum_z first(D)(z) kernel(D, z).
absl::StatusOr<Mechanism> AdaptiveCompose(
    const Mechanism& first, AdaptiveKernel kernel,
    std::optional<std::vector<std::string>> output_labels = std::nullopt);

}  // namespace dpkit

#endif  // DPKIT_MECHANISM_H_
