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

#ifndef SHUFFLEDP_BASELINES_H_
#define SHUFFLEDP_BASELINES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "shuffledp/errors.h"
#include "shuffledp/sum_dp.h"

namespace shuffledp {

// Continuous Laplace(scale) as a difference of two exponentials.
template <class URBG>
double SampleLaplace(double scale, URBG& gen) {
  std::exponential_distribution<double> e(1.0);
  return scale * (e(gen) - e(gen));
}

inline int64_t ExactSum(std::span<const int64_t> values) {
  int64_t s = 0;
  for (int64_t v : values) s += v;
  return s;
}

inline int64_t MaxValue(std::span<const int64_t> values) {
  int64_t m = 0;
  for (int64_t v : values) m = std::max(m, v);
  return m;
}

// Sum(D) + (U / eps) Lap(1).
template <class URBG>
double CentralLaplace(std::span<const int64_t> values, int64_t domain_U, double epsilon,
                      URBG& gen, bool noiseless = false) {
  if (!(epsilon > 0)) throw ConfigError("epsilon must be > 0");
  const double sum = static_cast<double>(ExactSum(values));
  if (noiseless) return sum;
  return sum + SampleLaplace(static_cast<double>(domain_U) / epsilon, gen);
}

inline int64_t ClippedSumOracle(std::span<const int64_t> values, int64_t tau) {
  if (tau < 0) throw ConfigError("tau must be >= 0");
  int64_t s = 0;
  for (int64_t v : values) s += std::min(v, tau);
  return s;
}

// The k-th largest value.
inline int64_t MaxK(std::span<const int64_t> values, int64_t k) {
  if (k < 1 || k > static_cast<int64_t>(values.size())) {
    throw ConfigError("k must lie in [1, n]");
  }
  std::vector<int64_t> v(values.begin(), values.end());
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end(), std::greater<>());
  return v[static_cast<size_t>(k - 1)];
}

// Idealized central clipping: non-private tau = 2^{ceil(log2 Max(D))}, then
// Laplace noise of scale tau / eps.
template <class URBG>
double CentralClippingReference(std::span<const int64_t> values, double epsilon,
                                URBG& gen, bool noiseless = false) {
  if (!(epsilon > 0)) throw ConfigError("epsilon must be > 0");
  const int64_t max_d = MaxValue(values);
  const int64_t tau = max_d == 0 ? 0 : NextPowerOfTwo(max_d);
  const double sum = static_cast<double>(ClippedSumOracle(values, tau));
  if (noiseless || tau == 0) return sum;
  return sum + SampleLaplace(static_cast<double>(tau) / epsilon, gen);
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_BASELINES_H_
