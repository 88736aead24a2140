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

#ifndef DPKIT_OUTCOME_H_
#define DPKIT_OUTCOME_H_

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "dpkit/random.h"

namespace dpkit {

// A mechanism output: either a label from a finite output space or a real
// vector (a scalar output is a vector of length one).
using Outcome = std::variant<std::string, std::vector<double>>;

// Renders an outcome for reports: labels verbatim, vectors as "[a,b,...]".
std::string OutcomeToString(const Outcome& outcome);

using Sampler = std::function<Outcome(RandomSource&)>;

// A measurable set of outcomes, named for witnesses and reports.
struct Event {
  std::string name;
  std::function<bool(const Outcome&)> contains;
};

}  // namespace dpkit

#endif  // DPKIT_OUTCOME_H_
