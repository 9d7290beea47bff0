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

#ifndef SHUFFLEDP_SUM_DP_H_
#define SHUFFLEDP_SUM_DP_H_

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shuffledp/base_sum.h"
#include "shuffledp/budget.h"
#include "shuffledp/errors.h"
#include "shuffledp/message.h"
#include "shuffledp/shuffler.h"

namespace shuffledp {

// ceil(log2 x) for x >= 1.
inline int CeilLog2(int64_t x) {
  return x <= 1 ? 0 : std::bit_width(static_cast<uint64_t>(x - 1));
}

inline int64_t NextPowerOfTwo(int64_t x) { return int64_t{1} << CeilLog2(x); }

// The j with 2^{j-1} + 1 <= x <= 2^j, taking 2^{-1} = 0.
inline int PartitionIndex(int64_t x) {
  if (x < 1) throw ConfigError("partition index needs x >= 1");
  return CeilLog2(x);
}

struct SumParams {
  PrivacyBudget budget;
  int64_t n = 1;
  int64_t domain_U = 1;  // padded up to a power of two for the sub-domains
  bool noiseless_mode = false;
  double lambda = 0.1;
  std::optional<double> zeta;
  RoundingPolicy rounding = RoundingPolicy::kAuto;
  double flood_constant = 1.0;

  int LogU() const { return CeilLog2(domain_U); }
  int64_t PaddedU() const { return int64_t{1} << LogU(); }
  int NumSubdomains() const { return LogU() + 1; }

  void Validate() const {
    budget.Validate();
    if (n < 1) throw ConfigError("n must be >= 1");
    if (domain_U < 1) throw ConfigError("domain U must be >= 1");
  }

  BaseParams SubdomainParams(int j) const {
    BaseParams b;
    b.epsilon = budget.epsilon;
    b.delta = budget.delta;
    b.n = n;
    b.domain_U = int64_t{1} << j;
    b.lambda = lambda;
    b.zeta = zeta;
    b.rounding = rounding;
    b.noiseless_mode = noiseless_mode;
    b.flood_constant = flood_constant;
    return b;
  }
};

struct SubdomainEstimates {
  std::vector<double> per_j;
};

struct ThresholdDecision {
  int64_t tau = 0;
  std::vector<double> bar_per_j;
  std::vector<bool> passed;

  // log2(tau), or -1 when tau = 0.
  int LogTau() const { return tau == 0 ? -1 : CeilLog2(tau); }
};

struct SumResult {
  double estimate = 0;
  SubdomainEstimates subdomains;
  ThresholdDecision decision;
};

// 1.3 * 2^j * ln(2 (log U + 1) / beta) / eps.
inline double ThresholdBar(int j, const SumParams& params) {
  return 1.3 * std::ldexp(1.0, j) *
         std::log(2.0 * (params.LogU() + 1) / params.budget.beta) /
         params.budget.epsilon;
}

inline ThresholdDecision SelectThreshold(const SubdomainEstimates& estimates,
                                         const SumParams& params) {
  if (static_cast<int>(estimates.per_j.size()) != params.NumSubdomains()) {
    throw ProtocolError("expected " + std::to_string(params.NumSubdomains()) +
                        " sub-domain estimates");
  }
  ThresholdDecision d;
  for (int j = 0; j < params.NumSubdomains(); ++j) {
    d.bar_per_j.push_back(ThresholdBar(j, params));
    d.passed.push_back(estimates.per_j[j] > d.bar_per_j.back());
    if (d.passed.back()) d.tau = int64_t{1} << j;
  }
  return d;
}

// c_e * Max(D) * ln((log U + 2) / beta) / eps.
inline double ErrorBoundSum(const SumParams& params, int64_t max_d, double c_e = 8.0) {
  return c_e * static_cast<double>(max_d) *
         std::log((params.LogU() + 2) / params.budget.beta) / params.budget.epsilon;
}

// The log U + 1 base instances of one SumDP run. Several cores can share a
// registry, distinguished by the (protocol, k, sign) fields of their tags.
class SumDpCore {
 public:
  SumDpCore(const SumParams& params, const InstanceTag& group_tag) : params_(params) {
    params_.Validate();
    for (int j = 0; j < params_.NumSubdomains(); ++j) {
      InstanceTag tag = group_tag;
      tag.subdomain_j = j;
      specs_.push_back(MakeBaseInstance(params_.SubdomainParams(j), tag));
    }
  }

  void RegisterInto(InstanceRegistry& registry) {
    offset_ = registry.size();
    for (const auto& s : specs_) registry.Add(s);
  }

  const SumParams& params() const { return params_; }
  std::span<const InstanceSpec> instances() const { return specs_; }
  size_t offset() const { return offset_; }

  template <class URBG, class Emit>
  void EmitData(int64_t x, URBG& gen, Emit&& emit) const {
    if (x < 0 || x > params_.PaddedU()) {
      throw DatasetError("value " + std::to_string(x) + " outside [0, " +
                         std::to_string(params_.PaddedU()) + "]");
    }
    if (x == 0) return;
    const int j = PartitionIndex(x);
    const int64_t payload = BaseDataPayload(specs_[j], x, gen);
    if (payload != 0) emit(offset_ + j, payload);
  }

  SumResult Analyze(std::span<const int64_t> sums) const {
    SumResult r;
    for (int j = 0; j < params_.NumSubdomains(); ++j) {
      r.subdomains.per_j.push_back(AnalyzeBaseSum(sums[offset_ + j], specs_[j]));
    }
    r.decision = SelectThreshold(r.subdomains, params_);
    for (int j = 0; j <= r.decision.LogTau(); ++j) r.estimate += r.subdomains.per_j[j];
    return r;
  }

 private:
  SumParams params_;
  std::vector<InstanceSpec> specs_;
  size_t offset_ = 0;
};

class SumDp {
 public:
  using Input = int64_t;

  explicit SumDp(const SumParams& params) : core_(params, {Protocol::kSum}) {
    if (params.domain_U > params.PaddedU()) throw ConfigError("bad domain");
    core_.RegisterInto(registry_);
  }

  const SumParams& params() const { return core_.params(); }
  const InstanceRegistry& registry() const { return registry_; }
  const SumDpCore& core() const { return core_; }

  template <class URBG, class Emit>
  void EmitData(int64_t x, URBG& gen, Emit&& emit) const {
    if (x > params().domain_U) {
      throw DatasetError("value " + std::to_string(x) + " exceeds U");
    }
    core_.EmitData(x, gen, emit);
  }

  SumResult Analyze(std::span<const int64_t> sums) const { return core_.Analyze(sums); }

  SumResult Analyze(const TagGroups& groups) const {
    return Analyze(SumByInstance(groups, registry_));
  }

  // Each value feeds exactly one sub-domain, all at the full budget.
  EpsDelta ComposedBudget() const {
    std::vector<EpsDelta> parts;
    for (const auto& s : registry_.specs()) parts.push_back(s.budget);
    return ParallelComposition(parts);
  }

 private:
  SumDpCore core_;
  InstanceRegistry registry_;
};

template <class URBG>
MessageBag RandomizeSum(int64_t x, const SumParams& params, URBG& gen) {
  return RandomizeWith(SumDp(params), x, gen);
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_SUM_DP_H_
