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

// Adaptive Simpson quadrature for piecewise-smooth integrands with known
// kink locations.

#ifndef DPKIT_QUADRATURE_H_
#define DPKIT_QUADRATURE_H_

#include <span>

#include "absl/functional/function_ref.h"

namespace dpkit {

struct QuadratureResult {
  double value = 0.0;
  // Sum of the per-panel Richardson error estimates.
  double error_estimate = 0.0;
  long evaluations = 0;
};

// Integrates `f` over [a, b] to an absolute tolerance `tol`. Panels are
// bisected until |S_2 - S_1| <= 15 tol_panel or `max_depth` is reached;
// accepted panels carry the Richardson-corrected estimate.
QuadratureResult AdaptiveSimpson(absl::FunctionRef<double(double)> f,
                                 double a, double b, double tol,
                                 int max_depth = 60);

// Integrates over [a, b] after splitting at every breakpoint that lies
// strictly inside the interval. The tolerance is shared evenly between the
// pieces. Breakpoints need not be sorted or distinct.
QuadratureResult IntegratePiecewise(absl::FunctionRef<double(double)> f,
                                    double a, double b,
                                    std::span<const double> breakpoints,
                                    double tol);

}  // namespace dpkit

#endif  // DPKIT_QUADRATURE_H_
