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

#ifndef SHUFFLEDP_BASE_SUM_H_
#define SHUFFLEDP_BASE_SUM_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>

#include "shuffledp/budget.h"
#include "shuffledp/errors.h"
#include "shuffledp/message.h"
#include "shuffledp/noise.h"
#include "shuffledp/shuffler.h"

namespace shuffledp {

// Which base backend variant an instance runs.
//   kThreshold: round iff U > sqrt(n / zeta).
//   kAuto:      as kThreshold, but only when rounding also needs fewer
//               flooding messages than the unrounded variant.
//   kNever:     never round.
enum class RoundingPolicy { kThreshold, kAuto, kNever };

struct BaseParams {
  double epsilon = 1.0;
  double delta = 1e-12;
  int64_t n = 1;
  int64_t domain_U = 1;
  double lambda = 0.1;
  std::optional<double> zeta;  // defaults to min(0.1, 0.1 / epsilon)
  RoundingPolicy rounding = RoundingPolicy::kThreshold;
  bool noiseless_mode = false;
  double flood_constant = 1.0;

  double Zeta() const { return zeta ? *zeta : std::min(0.1, 0.1 / epsilon); }

  double RoundingThreshold() const {
    return std::sqrt(static_cast<double>(n) / Zeta());
  }

  bool rounding_threshold_active() const {
    return static_cast<double>(domain_U) > RoundingThreshold();
  }

  void Validate() const {
    if (!(epsilon > 0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be > 0");
    if (!(delta > 0 && delta < 1)) throw ConfigError("delta must lie in (0,1)");
    if (n < 1) throw ConfigError("n must be >= 1");
    if (domain_U < 1) throw ConfigError("domain U must be >= 1");
    if (!(lambda > 0 && lambda < 1)) throw ConfigError("lambda must lie in (0,1)");
    const double z = Zeta();
    if (!(z > 0 && z < 1)) throw ConfigError("zeta must lie in (0,1)");
    if (flood_constant < 0) throw ConfigError("flood constant must be >= 0");
  }
};

inline InstanceSpec MakeBaseInstance(const BaseParams& p,
                                     const InstanceTag& tag = {Protocol::kBase}) {
  p.Validate();
  InstanceSpec spec;
  spec.tag = tag;
  spec.participants = p.n;
  spec.domain_bound = p.domain_U;
  spec.budget = {p.epsilon, p.delta};
  spec.noiseless = p.noiseless_mode;

  const int64_t b = static_cast<int64_t>(
      std::ceil(static_cast<double>(p.domain_U) / p.RoundingThreshold()));
  const int64_t rounded_bound = (p.domain_U + b - 1) / b;
  const double mu_rounded = FloodingRateRounded(p.n, p.epsilon, p.delta, p.lambda,
                                                p.Zeta(), p.flood_constant);
  const double mu_plain =
      FloodingRateUnrounded(p.n, p.epsilon, p.delta, p.domain_U, p.flood_constant);
  switch (p.rounding) {
    case RoundingPolicy::kNever:
      spec.rounding = false;
      break;
    case RoundingPolicy::kThreshold:
      spec.rounding = p.rounding_threshold_active();
      break;
    case RoundingPolicy::kAuto:
      spec.rounding = p.rounding_threshold_active() && mu_rounded < mu_plain;
      break;
  }
  if (spec.rounding) {
    spec.rounding_factor = std::max<int64_t>(b, 1);
    spec.message_bound = rounded_bound;
    spec.flood_rate = mu_rounded;
  } else {
    spec.rounding_factor = 1;
    spec.message_bound = p.domain_U;
    spec.flood_rate = mu_plain;
  }
  spec.noise_scale =
      static_cast<double>(spec.message_bound) / ((1.0 - p.lambda) * p.epsilon);
  return spec;
}

// Unbiased: ceil(x/B) with probability (x mod B)/B, floor otherwise.
template <class URBG>
int64_t RoundRandomized(int64_t x, int64_t b, URBG& gen) {
  const int64_t q = x / b;
  const int64_t r = x % b;
  if (r == 0) return q;
  return std::uniform_int_distribution<int64_t>(0, b - 1)(gen) < r ? q + 1 : q;
}

template <class URBG>
int64_t RoundRandomized(int64_t x, const BaseParams& params, URBG& gen) {
  return RoundRandomized(x, MakeBaseInstance(params).rounding_factor, gen);
}

// Data payload for x under an instance; 0 means no data message.
template <class URBG>
int64_t BaseDataPayload(const InstanceSpec& spec, int64_t x, URBG& gen) {
  if (x < 0 || x > spec.domain_bound) {
    throw DatasetError("value " + std::to_string(x) + " outside [0, " +
                       std::to_string(spec.domain_bound) + "]");
  }
  return spec.rounding ? RoundRandomized(x, spec.rounding_factor, gen) : x;
}

template <class URBG>
MessageBag RandomizeBase(int64_t x, const BaseParams& params, const InstanceTag& tag,
                         URBG& gen) {
  const InstanceSpec spec = MakeBaseInstance(params, tag);
  MessageBag bag;
  const int64_t payload = BaseDataPayload(spec, x, gen);
  if (payload != 0) bag.push_back({tag, payload});
  AppendNoiseMessages(spec, gen, bag);
  return bag;
}

inline double AnalyzeBaseSum(int64_t payload_sum, const InstanceSpec& spec) {
  return static_cast<double>(payload_sum) * static_cast<double>(spec.rounding_factor);
}

inline double AnalyzeBase(const MessageBag& bag, const BaseParams& params) {
  return AnalyzeBaseSum(SumPayloads(bag), MakeBaseInstance(params));
}

// (zeta + 1/(eps (1 - lambda))) U ln(2 / beta).
inline double ErrorBoundBase(const BaseParams& params, double beta) {
  return (params.Zeta() + 1.0 / (params.epsilon * (1.0 - params.lambda))) *
         static_cast<double>(params.domain_U) * std::log(2.0 / beta);
}

// Standalone single-instance protocol over scalar inputs.
class BaseSumDp {
 public:
  using Input = int64_t;

  explicit BaseSumDp(const BaseParams& params) : params_(params) {
    registry_.Add(MakeBaseInstance(params, {Protocol::kBase}));
  }

  const BaseParams& params() const { return params_; }
  const InstanceRegistry& registry() const { return registry_; }
  const InstanceSpec& instance() const { return registry_[0]; }

  template <class URBG, class Emit>
  void EmitData(int64_t x, URBG& gen, Emit&& emit) const {
    const int64_t payload = BaseDataPayload(instance(), x, gen);
    if (payload != 0) emit(size_t{0}, payload);
  }

  double Analyze(std::span<const int64_t> sums) const {
    return AnalyzeBaseSum(sums[0], instance());
  }

  EpsDelta ComposedBudget() const { return {params_.epsilon, params_.delta}; }

 private:
  BaseParams params_;
  InstanceRegistry registry_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_BASE_SUM_H_
