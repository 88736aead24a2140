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

#include "dpkit/random.h"

#include <cstdint>

namespace dpkit {
namespace {

// splitmix64 finalizer; decorrelates nearby seeds before seeding the engine.
uint64_t Mix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomSource::RandomSource(uint64_t seed) : seed_(seed), engine_(Mix(seed)) {}

double RandomSource::Uniform() {
  // Midpoint of one of 2^53 equal cells, so neither 0 nor 1 is produced.
  const uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

uint64_t RandomSource::UniformIndex(uint64_t bound) {
  // Rejection sampling keeps the result exactly uniform and, unlike
  // std::uniform_int_distribution, identical across standard libraries.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

RandomSource RandomSource::Fork(uint64_t stream) const {
  return RandomSource(Mix(seed_ ^ Mix(stream + 1)));
}

}  // namespace dpkit
