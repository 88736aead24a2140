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

#include "dpkit/laplace.h"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace dpkit {

absl::StatusOr<double> LaplacePdf(const LaplaceDistribution& d, double x) {
  if (d.IsPointMass()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "Laplace scale ", d.scale, " <= 0 is a point mass with no density"));
  }
  return std::exp(-std::fabs(x - d.location) / d.scale) / (2.0 * d.scale);
}

double LaplaceCdf(const LaplaceDistribution& d, double x) {
  if (d.IsPointMass()) return x < d.location ? 0.0 : 1.0;
  if (x < d.location) return std::exp((x - d.location) / d.scale) / 2.0;
  return 1.0 - std::exp(-(x - d.location) / d.scale) / 2.0;
}

double LaplaceSurvival(const LaplaceDistribution& d, double x) {
  if (d.IsPointMass()) return x < d.location ? 1.0 : 0.0;
  if (x < d.location) return 1.0 - std::exp((x - d.location) / d.scale) / 2.0;
  return std::exp(-(x - d.location) / d.scale) / 2.0;
}

absl::StatusOr<double> LaplaceQuantile(const LaplaceDistribution& d,
                                       double p) {
  if (!(p > 0.0 && p < 1.0)) {
    return absl::OutOfRangeError(
        absl::StrCat("quantile level ", p, " is outside (0, 1)"));
  }
  if (d.IsPointMass()) return d.location;
  if (p < 0.5) return d.location + d.scale * std::log(2.0 * p);
  // 1 - p is exact for p in [0.5, 1).
  return d.location - d.scale * std::log(2.0 * (1.0 - p));
}

absl::StatusOr<double> LaplaceIntervalProb(const LaplaceDistribution& d,
                                           double lo, double hi) {
  if (lo > hi) {
    return absl::InvalidArgumentError(
        absl::StrCat("empty interval [", lo, ", ", hi, "]"));
  }
  if (d.IsPointMass() || lo == hi) {
    return LaplaceCdf(d, hi) - LaplaceCdf(d, lo);
  }
  // Same-side intervals are differences of two tail exponentials; factoring
  // out the larger one keeps full relative precision deep in either tail.
  const double z = d.location, b = d.scale;
  if (lo >= z) {
    return std::exp(-(lo - z) / b) / 2.0 * -std::expm1(-(hi - lo) / b);
  }
  if (hi <= z) {
    return std::exp((hi - z) / b) / 2.0 * -std::expm1(-(hi - lo) / b);
  }
  return 1.0 - std::exp((lo - z) / b) / 2.0 - std::exp(-(hi - z) / b) / 2.0;
}

double LaplaceSample(const LaplaceDistribution& d, RandomSource& rng) {
  if (d.IsPointMass()) return d.location;
  return *LaplaceQuantile(d, rng.Uniform());
}

std::vector<double> LaplaceVectorSample(double scale,
                                        std::span<const double> locations,
                                        RandomSource& rng) {
  std::vector<double> out;
  out.reserve(locations.size());
  for (double z : locations) {
    out.push_back(LaplaceSample({.scale = scale, .location = z}, rng));
  }
  return out;
}

double ShiftLawDeviation(double scale, double location, int grid_points) {
  const LaplaceDistribution shifted{.scale = scale, .location = location};
  const LaplaceDistribution centered{.scale = scale, .location = 0.0};
  const double lo = location - 20.0 * scale;
  const double step = 40.0 * scale / std::max(1, grid_points - 1);
  double worst = 0.0;
  for (int k = 0; k < grid_points; ++k) {
    const double t = lo + k * step;
    worst = std::max(worst, std::fabs(LaplaceCdf(shifted, t) -
                                      LaplaceCdf(centered, t - location)));
  }
  return worst;
}

bool ShiftLawCheck(double scale, double location, double tolerance,
                   int grid_points) {
  return ShiftLawDeviation(scale, location, grid_points) <= tolerance;
}

}  // namespace dpkit
