//
// Copyright 2026 The ShuffleDP Authors
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

#ifndef SHUFFLEDP_BUDGET_H_
#define SHUFFLEDP_BUDGET_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>

#include "shuffledp/errors.h"

namespace shuffledp {

// An (epsilon, delta) pair as produced or consumed by composition theorems.
struct EpsDelta {
  double epsilon = 0;
  double delta = 0;
};

// Privacy budget of a whole protocol run plus the failure probability its
// utility guarantees are stated for.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-12;
  double beta = 0.1;

  static PrivacyBudget Make(double epsilon, double delta, double beta) {
    PrivacyBudget b{epsilon, delta, beta};
    b.Validate();
    return b;
  }

  void Validate() const {
    if (!(epsilon > 0) || !std::isfinite(epsilon)) {
      throw ConfigError("epsilon must be positive and finite, got " +
                        std::to_string(epsilon));
    }
    if (!(delta > 0 && delta < 1)) {
      throw ConfigError("delta must lie in (0,1), got " + std::to_string(delta));
    }
    if (!(beta > 0 && beta < 1)) {
      throw ConfigError("beta must lie in (0,1), got " + std::to_string(beta));
    }
  }

  EpsDelta eps_delta() const { return {epsilon, delta}; }
};

// k-fold basic composition.
inline EpsDelta BasicComposition(EpsDelta step, int64_t k) {
  return {static_cast<double>(k) * step.epsilon,
          static_cast<double>(k) * step.delta};
}

// Mechanisms on disjoint inputs: the worst one.
inline EpsDelta ParallelComposition(std::span<const EpsDelta> parts) {
  EpsDelta out;
  for (const EpsDelta& p : parts) {
    out.epsilon = std::max(out.epsilon, p.epsilon);
    out.delta = std::max(out.delta, p.delta);
  }
  return out;
}

// k-fold advanced composition with slack delta'':
//   eps' = eps * sqrt(2k ln(1/delta'')) + k eps (e^eps - 1)
//   delta' = k delta + delta''
inline EpsDelta AdvancedComposition(double step_epsilon, double step_delta,
                                    int64_t k, double slack_delta) {
  if (step_epsilon < 0 || step_delta < 0 || k < 1 || !(slack_delta > 0)) {
    throw ConfigError("advanced composition needs eps,delta >= 0, k >= 1 and "
                      "slack delta > 0");
  }
  const double kd = static_cast<double>(k);
  const double eps = step_epsilon * std::sqrt(2.0 * kd * std::log(1.0 / slack_delta)) +
                     kd * step_epsilon * std::expm1(step_epsilon);
  return {eps, kd * step_delta + slack_delta};
}

// Largest per-step epsilon whose k-fold advanced composition, with per-step
// delta total.delta/(2k) and slack total.delta/2, stays within total.epsilon.
// The returned delta is that per-step delta.
inline EpsDelta InverseAdvancedComposition(EpsDelta total, int64_t k) {
  if (k < 1 || !(total.epsilon > 0) || !(total.delta > 0 && total.delta < 1)) {
    throw ConfigError("inverse composition needs k >= 1, eps > 0, delta in (0,1)");
  }
  const double step_delta = total.delta / (2.0 * static_cast<double>(k));
  const double slack = total.delta / 2.0;
  auto composed = [&](double e) {
    return AdvancedComposition(e, step_delta, k, slack).epsilon;
  };
  // composed(total.epsilon) >= total.epsilon * sqrt(2 ln 2) > total.epsilon,
  // so [0, total.epsilon] brackets the root.
  double lo = 0;
  double hi = total.epsilon;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (composed(mid) <= total.epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-9 * hi) break;
  }
  return {lo, step_delta};
}

// True when `used` does not exceed `total` up to floating-point rounding.
inline bool WithinBudget(EpsDelta used, EpsDelta total, double rel_tol = 1e-9) {
  return used.epsilon <= total.epsilon * (1 + rel_tol) &&
         used.delta <= total.delta * (1 + rel_tol);
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_BUDGET_H_
