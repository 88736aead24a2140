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

// JSON configuration parsing for the dpkit command-line tool.

#ifndef DPKIT_TOOLS_CLI_CONFIG_H_
#define DPKIT_TOOLS_CLI_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "absl/status/statusor.h"
#include "dpkit/budget.h"
#include "dpkit/dataset.h"
#include "dpkit/divergence.h"
#include "dpkit/laplace.h"
#include "dpkit/mechanism.h"
#include "nlohmann/json.hpp"

namespace dpkit::cli {

using Json = nlohmann::ordered_json;

absl::StatusOr<Json> ReadJsonFile(const std::string& path);

absl::StatusOr<Dataset> ParseDataset(const Json& j);
absl::StatusOr<CountingQuerySet> ParseQuerySet(const Json& j);
absl::StatusOr<PrivacyBudget> ParseBudget(const Json& j);

// Mechanism kinds: "laplace", "rnm", "randomized-response", "composed".
absl::StatusOr<Mechanism> ParseMechanism(const Json& j);

// Node kinds: "leaf", "seq", "adaptive", "post", "group", "weaken".
absl::StatusOr<CompositionNode> ParseCompositionTree(const Json& j);

// A distribution operand of the divergence command.
struct SamplerSpec {
  Mechanism mechanism;
  Dataset dataset;
};
using DistributionSpec =
    std::variant<DiscreteDistribution, LaplaceDistribution, SamplerSpec>;

absl::StatusOr<DistributionSpec> ParseDistributionSpec(const Json& j);

struct AdjacencySpec {
  size_t n = 0;
  int64_t max_entry = 0;
  int64_t radius = 1;
};
absl::StatusOr<AdjacencySpec> ParseAdjacency(const Json& j);

}  // namespace dpkit::cli

#endif  // DPKIT_TOOLS_CLI_CONFIG_H_
