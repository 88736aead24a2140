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

// The Laplace distribution Lap(b, z): density, CDF, quantile, and seeded
// inverse-transform sampling.
//
// A scale b <= 0 denotes the point mass at z. Sampling then returns z
// without consuming randomness and the CDF becomes a unit step; the density
// does not exist and LaplacePdf reports an error.

#ifndef DPKIT_LAPLACE_H_
#define DPKIT_LAPLACE_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpkit/random.h"

namespace dpkit {

// Quadrature over a Laplace density is truncated this many scale units from
// its location. Each tail beyond the cut holds exp(-40)/2 < 2.2e-18 of mass.
inline constexpr double kLaplaceTailScales = 40.0;

struct LaplaceDistribution {
  double scale = 1.0;
  double location = 0.0;

  bool IsPointMass() const { return !(scale > 0.0); }
};

// exp(-|x - z| / b) / (2 b). Fails for a point mass.
absl::StatusOr<double> LaplacePdf(const LaplaceDistribution& d, double x);

// exp((x - z) / b) / 2 for x < z, 1 - exp(-(x - z) / b) / 2 otherwise.
// For a point mass: 0 below z and 1 at or above z.
double LaplaceCdf(const LaplaceDistribution& d, double x);

// 1 - LaplaceCdf evaluated without cancellation in the upper tail.
double LaplaceSurvival(const LaplaceDistribution& d, double x);

// Inverse of LaplaceCdf on (0, 1). A point mass returns its location.
absl::StatusOr<double> LaplaceQuantile(const LaplaceDistribution& d,
                                       double p);

// Probability of [lo, hi]. Fails when lo > hi.
absl::StatusOr<double> LaplaceIntervalProb(const LaplaceDistribution& d,
                                           double lo, double hi);

// One draw: LaplaceQuantile applied to rng.Uniform().
double LaplaceSample(const LaplaceDistribution& d, RandomSource& rng);

// locations[j] + Lap(b) for each j, drawn in order from `rng`.
std::vector<double> LaplaceVectorSample(double scale,
                                        std::span<const double> locations,
                                        RandomSource& rng);

// Compares LaplaceCdf(Lap(b, z), t) with LaplaceCdf(Lap(b, 0), t - z) on
// `grid_points` points spread over [z - 20b, z + 20b]; returns whether the
// largest absolute difference is within `tolerance`.
bool ShiftLawCheck(double scale, double location, double tolerance,
                   int grid_points = 1000);

// Largest absolute CDF difference found by ShiftLawCheck's grid.
double ShiftLawDeviation(double scale, double location, int grid_points);

}  // namespace dpkit

#endif  // DPKIT_LAPLACE_H_
