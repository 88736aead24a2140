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

#include "config.h"

#include <cmath>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpkit/rnm.h"

namespace dpkit::cli {
namespace {

// nlohmann throws on type mismatches; every parser funnels through here so
// that malformed input surfaces as a status.
template <typename Fn>
auto Guard(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed config: ",
                                                   e.what()));
  }
}

absl::StatusOr<CountingQuerySet> QuerySetFrom(const Json& j) {
  const size_t n = j.at("n").get<size_t>();
  std::vector<std::vector<size_t>> predicates;
  for (const Json& q : j.at("queries")) {
    predicates.push_back(q.get<std::vector<size_t>>());
  }
  return CountingQuerySet::Create(n, std::move(predicates));
}

absl::StatusOr<SensitivitySpec> SensitivityFor(const Json& j,
                                               const CountingQuerySet& q) {
  if (j.contains("sensitivity")) {
    return SensitivitySpec::Create(j.at("sensitivity").get<double>(),
                                   SensitivitySpec::Provenance::kDeclared);
  }
  // The worst case is one added record; any base histogram exposes it.
  absl::StatusOr<int64_t> s = CountingSensitivityExhaustive(q, 1);
  if (!s.ok()) return s.status();
  return SensitivitySpec::Create(static_cast<double>(*s),
                                 SensitivitySpec::Provenance::kExhaustive);
}

absl::StatusOr<Mechanism> MechanismFrom(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "laplace") {
    absl::StatusOr<CountingQuerySet> q = QuerySetFrom(j.at("queries"));
    if (!q.ok()) return q.status();
    absl::StatusOr<SensitivitySpec> sens = SensitivityFor(j, *q);
    if (!sens.ok()) return sens.status();
    return LaplaceMechanism(CountingQueryFn(*q), q->n(), q->m(), *sens,
                            j.at("epsilon").get<double>());
  }
  if (kind == "rnm") {
    absl::StatusOr<CountingQuerySet> q = QuerySetFrom(j.at("queries"));
    if (!q.ok()) return q.status();
    const std::string noise = j.value("noise", std::string("all"));
    if (noise != "all" && noise != "first-only") {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown rnm noise mode '", noise, "'"));
    }
    return RnmMechanism(*q, j.at("epsilon").get<double>(),
                        noise == "all" ? RnmNoise::kAll : RnmNoise::kFirstOnly,
                        j.value("tol", kRnmDefaultTol));
  }
  if (kind == "randomized-response") {
    return RandomizedResponse(j.at("flip").get<double>(),
                              j.value("levels", 1));
  }
  if (kind == "composed") {
    absl::StatusOr<Mechanism> first = MechanismFrom(j.at("first"));
    if (!first.ok()) return first.status();
    absl::StatusOr<Mechanism> second = MechanismFrom(j.at("second"));
    if (!second.ok()) return second.status();
    return PairCompose(*first, *second);
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism kind '", kind, "'"));
}

absl::StatusOr<CompositionNode> NodeFrom(const Json& j) {
  using Kind = CompositionNode::Kind;
  const std::string kind = j.at("kind").get<std::string>();
  CompositionNode node;
  if (kind == "leaf") {
    node.kind = Kind::kLeaf;
    node.epsilon = j.at("epsilon").get<double>();
    node.delta = j.value("delta", 0.0);
    return node;
  }
  if (kind == "seq" || kind == "adaptive") {
    node.kind = kind == "seq" ? Kind::kSequential : Kind::kAdaptive;
    for (const Json& c : j.at("children")) {
      absl::StatusOr<CompositionNode> child = NodeFrom(c);
      if (!child.ok()) return child.status();
      node.children.push_back(*std::move(child));
    }
    return node;
  }
  if (kind == "post") {
    node.kind = Kind::kPostProcess;
  } else if (kind == "group") {
    node.kind = Kind::kGroup;
    node.group_size = j.at("k").get<int64_t>();
  } else if (kind == "weaken") {
    node.kind = Kind::kWeaken;
    node.epsilon = j.at("epsilon").get<double>();
    node.delta = j.value("delta", 0.0);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown composition node kind '", kind, "'"));
  }
  absl::StatusOr<CompositionNode> child = NodeFrom(j.at("child"));
  if (!child.ok()) return child.status();
  node.children.push_back(*std::move(child));
  return node;
}

}  // namespace

absl::StatusOr<Json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, " is not valid JSON"));
  }
  return j;
}

absl::StatusOr<Dataset> ParseDataset(const Json& j) {
  return Guard([&]() -> absl::StatusOr<Dataset> {
    return Dataset::Create(j.at("histogram").get<std::vector<int64_t>>());
  });
}

absl::StatusOr<CountingQuerySet> ParseQuerySet(const Json& j) {
  return Guard([&] { return QuerySetFrom(j); });
}

absl::StatusOr<PrivacyBudget> ParseBudget(const Json& j) {
  return Guard([&] {
    return PrivacyBudget::Create(j.at("epsilon").get<double>(),
                                 j.value("delta", 0.0));
  });
}

absl::StatusOr<Mechanism> ParseMechanism(const Json& j) {
  return Guard([&] { return MechanismFrom(j); });
}

absl::StatusOr<CompositionNode> ParseCompositionTree(const Json& j) {
  return Guard([&] { return NodeFrom(j); });
}

absl::StatusOr<DistributionSpec> ParseDistributionSpec(const Json& j) {
  return Guard([&]() -> absl::StatusOr<DistributionSpec> {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "discrete") {
      std::vector<std::pair<std::string, double>> masses;
      for (const auto& [label, p] : j.at("masses").items()) {
        masses.emplace_back(label, p.get<double>());
      }
      absl::StatusOr<DiscreteDistribution> d =
          DiscreteDistribution::Create(std::move(masses));
      if (!d.ok()) return d.status();
      return *std::move(d);
    }
    if (kind == "laplace") {
      return LaplaceDistribution{.scale = j.at("scale").get<double>(),
                                 .location = j.value("location", 0.0)};
    }
    if (kind == "sampler") {
      absl::StatusOr<Mechanism> mech = MechanismFrom(j.at("mechanism"));
      if (!mech.ok()) return mech.status();
      absl::StatusOr<Dataset> d =
          Dataset::Create(j.at("dataset").at("histogram")
                              .get<std::vector<int64_t>>());
      if (!d.ok()) return d.status();
      if (d->size() != mech->input_length()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "dataset has ", d->size(), " types, mechanism expects ",
            mech->input_length()));
      }
      return SamplerSpec{*std::move(mech), *std::move(d)};
    }
    return absl::InvalidArgumentError(
        absl::StrCat("unknown distribution kind '", kind, "'"));
  });
}

absl::StatusOr<AdjacencySpec> ParseAdjacency(const Json& j) {
  return Guard([&]() -> absl::StatusOr<AdjacencySpec> {
    AdjacencySpec spec{.n = j.at("n").get<size_t>(),
                       .max_entry = j.at("max_entry").get<int64_t>(),
                       .radius = j.value("radius", int64_t{1})};
    if (spec.max_entry < 0 || spec.radius < 1) {
      return absl::InvalidArgumentError(
          "adjacency needs max_entry >= 0 and radius >= 1");
    }
    return spec;
  });
}

}  // namespace dpkit::cli
