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

#ifndef DPKIT_RANDOM_H_
#define DPKIT_RANDOM_H_

#include <cstdint>
#include <random>

namespace dpkit {

// Seeded source of uniform variates. Two sources built from the same seed
// produce identical streams. Not thread-safe: give each thread its own
// source, e.g. via Fork().
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed);

  // Uniform double in the open interval (0, 1), 53 bits of resolution.
  double Uniform();

  // Uniform integer in [0, bound). `bound` must be positive.
  uint64_t UniformIndex(uint64_t bound);

  uint64_t seed() const { return seed_; }

  // Independent source derived from this source's seed and `stream`. Does
  // not advance this source.
  RandomSource Fork(uint64_t stream) const;

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dpkit

#endif  // DPKIT_RANDOM_H_
