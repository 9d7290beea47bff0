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

#ifndef SHUFFLEDP_NOISE_H_
#define SHUFFLEDP_NOISE_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "shuffledp/errors.h"
#include "shuffledp/message.h"
#include "shuffledp/rng.h"

namespace shuffledp {

struct DiscreteLaplaceParam {
  double scale = 1.0;

  // q = e^{-1/s}; the pmf is (1-q)/(1+q) * q^{|k|}.
  double q() const { return std::exp(-1.0 / scale); }
};

struct NoiseShareSpec {
  int64_t participants = 1;
  double scale = 1.0;
  int64_t domain_bound = 1;
};

namespace internal {

// Uniform on (0, 1].
template <class URBG>
double OpenUniform(URBG& gen) {
  return 1.0 - std::generate_canonical<double, 53>(gen);
}

// Number of failures before the first success, P(K >= k) = q^k with
// q = e^{-1/s}.
template <class URBG>
int64_t SampleGeometric(double scale, URBG& gen) {
  return static_cast<int64_t>(std::floor(-scale * std::log(OpenUniform(gen))));
}

template <class URBG>
int64_t SamplePoisson(double mean, URBG& gen) {
  if (!(mean > 0)) return 0;
  return std::poisson_distribution<int64_t>(mean)(gen);
}

}  // namespace internal

template <class URBG>
int64_t SampleDiscreteLaplace(const DiscreteLaplaceParam& param, URBG& gen) {
  if (!(param.scale > 0)) throw ConfigError("discrete Laplace scale must be > 0");
  if (param.q() == 0.0) return 0;
  return internal::SampleGeometric(param.scale, gen) -
         internal::SampleGeometric(param.scale, gen);
}

inline int64_t SampleDiscreteLaplace(const DiscreteLaplaceParam& param,
                                     const RngSeed& seed) {
  Engine gen = seed.MakeEngine();
  return SampleDiscreteLaplace(param, gen);
}

// P(X <= k).
inline double DiscreteLaplaceCdf(const DiscreteLaplaceParam& param, int64_t k) {
  const double q = param.q();
  if (k >= 0) return 1.0 - std::pow(q, static_cast<double>(k + 1)) / (1.0 + q);
  return std::pow(q, static_cast<double>(-k)) / (1.0 + q);
}

inline double DiscreteLaplaceVariance(const DiscreteLaplaceParam& param) {
  const double q = param.q();
  const double one_minus_q = -std::expm1(-1.0 / param.scale);
  return 2.0 * q / (one_minus_q * one_minus_q);
}

// One user's additive share: the difference of two NB(1/n, q) draws, each
// realized as Poisson(Gamma(1/n, q/(1-q))). The n-fold sum is exactly
// discrete Laplace at the same scale.
template <class URBG>
int64_t SampleDlapShare(const NoiseShareSpec& spec, URBG& gen) {
  if (spec.participants < 1) throw ConfigError("participants must be >= 1");
  if (!(spec.scale > 0)) throw ConfigError("share scale must be > 0");
  const double q = std::exp(-1.0 / spec.scale);
  if (q == 0.0) return 0;
  const double odds = q / -std::expm1(-1.0 / spec.scale);
  std::gamma_distribution<double> gamma(1.0 / static_cast<double>(spec.participants),
                                        odds);
  const int64_t plus = internal::SamplePoisson(gamma(gen), gen);
  const int64_t minus = internal::SamplePoisson(gamma(gen), gen);
  return plus - minus;
}

inline int64_t SampleDlapShare(const NoiseShareSpec& spec, const RngSeed& seed) {
  Engine gen = seed.MakeEngine();
  return SampleDlapShare(spec, gen);
}

// Logarithmic(p): P(K = k) = -p^k / (k ln(1-p)), k >= 1. Kemp's LK method.
template <class URBG>
int64_t SampleLogarithmic(double p, URBG& gen) {
  if (!(p > 0 && p < 1)) throw ConfigError("logarithmic parameter must lie in (0,1)");
  const double r = std::log1p(-p);
  while (true) {
    const double v = std::generate_canonical<double, 53>(gen);
    if (v >= p) return 1;
    const double u = std::generate_canonical<double, 53>(gen);
    const double q = -std::expm1(r * u);
    if (v <= q * q) {
      if (v == 0.0) continue;
      const double k = std::floor(1.0 + std::log(v) / std::log(q));
      if (k < 1) continue;
      return static_cast<int64_t>(k);
    }
    return v >= q ? 1 : 2;
  }
}

// Sum of n independent shares, drawn jointly. NB(1/n, q) is compound
// Poisson with rate -ln(1-q)/n and Logarithmic(q) jumps, so across all n
// users each side is Poisson(-ln(1-q)) jumps landing on uniform users. The
// per-user totals are reconstructed to count encoded messages.
struct AggregateNoise {
  int64_t total = 0;
  int64_t messages = 0;
  int64_t nonzero_users = 0;
};

template <class URBG>
AggregateNoise SampleAggregateShares(const NoiseShareSpec& spec, URBG& gen) {
  AggregateNoise out;
  const double q = std::exp(-1.0 / spec.scale);
  if (q == 0.0) return out;
  const double rate = -std::log1p(-q);
  std::vector<std::pair<int64_t, int64_t>> jumps;
  std::uniform_int_distribution<int64_t> user(0, spec.participants - 1);
  for (int64_t sign : {int64_t{1}, int64_t{-1}}) {
    const int64_t count = internal::SamplePoisson(rate, gen);
    for (int64_t i = 0; i < count; ++i) {
      const int64_t who = user(gen);
      jumps.emplace_back(who, sign * SampleLogarithmic(q, gen));
    }
  }
  std::sort(jumps.begin(), jumps.end());
  for (size_t i = 0; i < jumps.size();) {
    int64_t z = 0;
    size_t k = i;
    for (; k < jumps.size() && jumps[k].first == jumps[i].first; ++k) z += jumps[k].second;
    out.total += z;
    if (z != 0) {
      ++out.nonzero_users;
      out.messages += (std::abs(z) + spec.domain_bound - 1) / spec.domain_bound;
    }
    i = k;
  }
  return out;
}

// Greedy split into messages of magnitude <= bound, ceil(|share|/bound) of them.
inline MessageBag EncodeShareAsMessages(int64_t share, int64_t domain_bound,
                                        const InstanceTag& tag = {}) {
  if (domain_bound < 1) throw ConfigError("domain bound must be >= 1");
  MessageBag bag;
  const int64_t sign = share < 0 ? -1 : 1;
  int64_t rest = std::abs(share);
  bag.reserve(static_cast<size_t>((rest + domain_bound - 1) / domain_bound));
  while (rest > 0) {
    const int64_t chunk = std::min(rest, domain_bound);
    bag.push_back({tag, sign * chunk});
    rest -= chunk;
  }
  return bag;
}

template <class URBG>
void AppendFloodingPairs(double rate, int64_t domain_bound, const InstanceTag& tag,
                         URBG& gen, MessageBag& bag) {
  if (rate < 0) throw ConfigError("flooding rate must be >= 0");
  const int64_t pairs = internal::SamplePoisson(rate, gen);
  std::uniform_int_distribution<int64_t> value(1, domain_bound);
  for (int64_t i = 0; i < pairs; ++i) {
    const int64_t j = value(gen);
    bag.push_back({tag, j});
    bag.push_back({tag, -j});
  }
}

template <class URBG>
MessageBag SampleFloodingPairs(double rate, int64_t domain_bound, URBG& gen,
                               const InstanceTag& tag = {}) {
  MessageBag bag;
  AppendFloodingPairs(rate, domain_bound, tag, gen, bag);
  return bag;
}

inline MessageBag SampleFloodingPairs(double rate, int64_t domain_bound,
                                      const RngSeed& seed,
                                      const InstanceTag& tag = {}) {
  Engine gen = seed.MakeEngine();
  return SampleFloodingPairs(rate, domain_bound, gen, tag);
}

// Per-user flooding pair rate with randomized rounding:
//   c_f log^2 n log(1/delta) / (eps lambda sqrt(zeta n)), logs base 2.
inline double FloodingRateRounded(int64_t n, double epsilon, double delta,
                                  double lambda, double zeta, double c_f) {
  const double log_n = std::log2(static_cast<double>(n));
  return c_f * log_n * log_n * std::log2(1.0 / delta) /
         (epsilon * lambda * std::sqrt(zeta * static_cast<double>(n)));
}

// Without rounding: c_f U' (1 + log U')^2 log(U'/delta) / (eps n).
inline double FloodingRateUnrounded(int64_t n, double epsilon, double delta,
                                    int64_t message_bound, double c_f) {
  const double u = static_cast<double>(message_bound);
  const double log_u = 1.0 + std::log2(u);
  return c_f * u * log_u * log_u * std::log2(u / delta) /
         (epsilon * static_cast<double>(n));
}

// E[ceil(L / bound)] for L ~ Logarithmic(q).
inline double ExpectedCeilLogarithmic(double q, int64_t bound) {
  const double log1mq = std::log1p(-q);
  const double mean = q / (-log1mq * (1.0 - q));
  if (mean > 1e7) return 1.0 + mean / static_cast<double>(bound);
  double acc = 0;
  double mass = 0;
  double qk = 1;
  for (int64_t k = 1; k < 1'000'000'000; ++k) {
    qk *= q;
    const double pk = -qk / (static_cast<double>(k) * log1mq);
    mass += pk;
    acc += pk * static_cast<double>((k + bound - 1) / bound);
    if (1.0 - mass < 1e-13 || pk < 1e-300) break;
  }
  return acc;
}

// Upper bound on the expected number of share messages per user: a user
// holds 2(-ln(1-q))/n jumps on average and each jump needs at most
// ceil(L / U') messages.
inline double ExpectedShareMessagesPerUser(const NoiseShareSpec& spec) {
  const double q = std::exp(-1.0 / spec.scale);
  if (q == 0.0) return 0;
  const double rate = -std::log1p(-q);
  return 2.0 * rate / static_cast<double>(spec.participants) *
         ExpectedCeilLogarithmic(q, spec.domain_bound);
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_NOISE_H_
