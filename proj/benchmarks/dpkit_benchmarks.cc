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

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "benchmark/benchmark.h"
#include "dpkit/divergence.h"
#include "dpkit/laplace.h"
#include "dpkit/outcome.h"
#include "dpkit/random.h"
#include "dpkit/rnm.h"

namespace dpkit {
namespace {

DiscreteDistribution Geometric(int k, double ratio) {
  std::vector<std::pair<std::string, double>> masses;
  double total = 0.0;
  for (int i = 0; i < k; ++i) total += std::pow(ratio, i);
  for (int i = 0; i < k; ++i) {
    masses.emplace_back(std::to_string(i), std::pow(ratio, i) / total);
  }
  return DiscreteDistribution::Create(std::move(masses)).value();
}

void BM_LaplaceSample(benchmark::State& state) {
  RandomSource rng(1);
  const LaplaceDistribution d{1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(LaplaceSample(d, rng));
}
BENCHMARK(BM_LaplaceSample);

void BM_DivergenceDiscrete(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const DiscreteDistribution mu = Geometric(k, 0.7), nu = Geometric(k, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(DivergenceDiscrete(mu, nu, 0.3)->value);
  }
}
BENCHMARK(BM_DivergenceDiscrete)->Arg(4)->Arg(15)->Arg(1000);

// The subset sweep is exponential; the sum above is its linear equivalent.
void BM_DivergenceBruteForce(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const DiscreteDistribution mu = Geometric(k, 0.7), nu = Geometric(k, 0.8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(DivergenceBruteForce(mu, nu, 0.3)->value);
  }
}
BENCHMARK(BM_DivergenceBruteForce)->Arg(4)->Arg(10)->Arg(15);

void BM_DivergenceLaplace(benchmark::State& state) {
  const LaplaceDistribution a{1.0, 0.0}, b{2.0, 1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(DivergenceLaplace(a, b, 0.5, 1e-10)->value);
  }
}
BENCHMARK(BM_DivergenceLaplace);

void BM_RnmProbExact(benchmark::State& state) {
  std::vector<double> scores;
  for (int j = 0; j < state.range(0); ++j) scores.push_back(0.5 * j);
  for (auto _ : state) {
    benchmark::DoNotOptimize(RnmProbExact(scores, 1.0, 0).value());
  }
}
BENCHMARK(BM_RnmProbExact)->Arg(2)->Arg(5)->Arg(20);

void BM_DivergenceMonteCarlo(benchmark::State& state) {
  const Sampler mu = [](RandomSource& rng) -> Outcome {
    return std::vector<double>{LaplaceSample({1.0, 0.0}, rng)};
  };
  const Sampler nu = [](RandomSource& rng) -> Outcome {
    return std::vector<double>{LaplaceSample({1.0, 1.0}, rng)};
  };
  std::vector<Event> events;
  for (double c : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
    events.push_back({"x < " + std::to_string(c), [c](const Outcome& o) {
                        return std::get<std::vector<double>>(o)[0] < c;
                      }});
  }
  const MonteCarloOptions options{.samples = state.range(0)};
  const RandomSource rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        DivergenceMonteCarlo(mu, nu, events, 0.5, options, rng)->upper);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DivergenceMonteCarlo)->Arg(10'000)->Arg(100'000)->UseRealTime();

}  // namespace
}  // namespace dpkit

BENCHMARK_MAIN();
