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

#include "dpkit/quadrature.h"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace dpkit {
namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
};

double Simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

void Refine(absl::FunctionRef<double(double)> f, const Panel& p, double tol,
            int depth, QuadratureResult& out) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  out.evaluations += 2;
  const double left = Simpson(p.a, p.m, p.fa, flm, p.fm);
  const double right = Simpson(p.m, p.b, p.fm, frm, p.fb);
  const double diff = left + right - p.whole;
  if (depth <= 0 || std::fabs(diff) <= 15.0 * tol || !(p.m > p.a)) {
    out.value += left + right + diff / 15.0;
    out.error_estimate += std::fabs(diff) / 15.0;
    return;
  }
  Refine(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1, out);
  Refine(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1,
         out);
}

}  // namespace

QuadratureResult AdaptiveSimpson(absl::FunctionRef<double(double)> f,
                                 double a, double b, double tol,
                                 int max_depth) {
  QuadratureResult out;
  if (!(b > a)) return out;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  out.evaluations = 3;
  // Always split once so a symmetric integrand cannot fool the first test.
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  out.evaluations += 2;
  Refine(f, {a, lm, m, fa, flm, fm, Simpson(a, m, fa, flm, fm)}, 0.5 * tol,
         max_depth, out);
  Refine(f, {m, rm, b, fm, frm, fb, Simpson(m, b, fm, frm, fb)}, 0.5 * tol,
         max_depth, out);
  return out;
}

QuadratureResult IntegratePiecewise(absl::FunctionRef<double(double)> f,
                                    double a, double b,
                                    std::span<const double> breakpoints,
                                    double tol) {
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  QuadratureResult total;
  const double piece_tol = tol / static_cast<double>(cuts.size() - 1);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const QuadratureResult r = AdaptiveSimpson(f, cuts[i], cuts[i + 1],
                                               piece_tol);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.evaluations += r.evaluations;
  }
  return total;
}

}  // namespace dpkit
