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

#ifndef SHUFFLEDP_SPARSE_VEC_H_
#define SHUFFLEDP_SPARSE_VEC_H_

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
#include "shuffledp/sum_dp.h"

namespace shuffledp {

// Per-bucket budget for the counting instances.
//   kRecomposable: largest step whose advanced composition over the 2^j
//                  instances a bucket-j user touches stays within (eps/2, delta/2).
//   kPrinted:      eps / (2 sqrt(2^{j+1} ln(2/delta))), delta / 2^{j+1}.
enum class BudgetRule { kRecomposable, kPrinted };

struct SparseParams {
  PrivacyBudget budget;
  int64_t n = 1;
  int64_t d = 1;
  bool noiseless_mode = false;
  BudgetRule rule = BudgetRule::kRecomposable;
  double lambda = 0.1;
  double flood_constant = 1.0;

  int LogD() const { return CeilLog2(d); }
  int NumBuckets() const { return LogD() + 1; }

  void Validate() const {
    budget.Validate();
    if (n < 1 || d < 1) throw ConfigError("n and d must be >= 1");
  }

  EpsDelta CountBudget() const { return {budget.epsilon / 2, budget.delta / 2}; }

  EpsDelta SumBudget(int j) const {
    const double width = std::ldexp(1.0, j);
    if (rule == BudgetRule::kPrinted) {
      return {budget.epsilon / (2.0 * std::sqrt(2.0 * width * std::log(2.0 / budget.delta))),
              budget.delta / (2.0 * width)};
    }
    return InverseAdvancedComposition({budget.epsilon / 2, budget.delta / 2},
                                      int64_t{1} << j);
  }

  // 1.3 * (2/eps) * ln(2 (log d + 1) / beta).
  double CountBar() const {
    return 1.3 * (2.0 / budget.epsilon) * std::log(2.0 * NumBuckets() / budget.beta);
  }

  BaseParams CounterParams(EpsDelta b) const {
    BaseParams p;
    p.epsilon = b.epsilon;
    p.delta = b.delta;
    p.n = n;
    p.domain_U = 1;
    p.lambda = lambda;
    p.rounding = RoundingPolicy::kNever;
    p.noiseless_mode = noiseless_mode;
    p.flood_constant = flood_constant;
    return p;
  }
};

// The bucket j with 2^{j-1} + 1 <= l1 <= 2^j, or none for the zero vector.
inline std::optional<int> SparsityIndexOfNorm(int64_t l1_norm) {
  if (l1_norm <= 0) return std::nullopt;
  return CeilLog2(l1_norm);
}

inline std::optional<int> SparsityIndex(std::span<const uint8_t> x) {
  int64_t ones = 0;
  for (uint8_t v : x) {
    if (v > 1) throw DatasetError("binary vector entry must be 0 or 1");
    ones += v;
  }
  return SparsityIndexOfNorm(ones);
}

struct SparsityDecision {
  int64_t tau = 0;
  std::vector<double> count_estimates;

  int LogTau() const { return tau == 0 ? -1 : CeilLog2(tau); }
};

inline SparsityDecision SelectSparsityThreshold(std::span<const double> count_estimates,
                                                const SparseParams& params) {
  if (static_cast<int>(count_estimates.size()) != params.NumBuckets()) {
    throw ProtocolError("expected " + std::to_string(params.NumBuckets()) +
                        " bucket counts");
  }
  SparsityDecision d;
  d.count_estimates.assign(count_estimates.begin(), count_estimates.end());
  const double bar = params.CountBar();
  for (int j = 0; j < params.NumBuckets(); ++j) {
    if (count_estimates[j] > bar) d.tau = int64_t{1} << j;
  }
  return d;
}

struct SparseResult {
  std::vector<double> estimate;
  SparsityDecision decision;
};

namespace internal {

// Binary vectors are passed as their sorted, distinct support.
inline void CheckSupport(std::span<const int32_t> ones, int64_t d) {
  for (size_t i = 0; i < ones.size(); ++i) {
    if (ones[i] < 0 || ones[i] >= d) {
      throw DatasetError("coordinate " + std::to_string(ones[i]) + " outside [0, d)");
    }
    if (i > 0 && ones[i] <= ones[i - 1]) {
      throw DatasetError("support must be sorted and distinct");
    }
  }
}

}  // namespace internal

class SparVecSumDp {
 public:
  using Input = std::vector<int32_t>;

  explicit SparVecSumDp(const SparseParams& params) : params_(params) {
    params_.Validate();
    const int buckets = params_.NumBuckets();
    const BaseParams count = params_.CounterParams(params_.CountBudget());
    for (int j = 0; j < buckets; ++j) {
      registry_.Add(MakeBaseInstance(count, {Protocol::kSparseCount, j}));
    }
    for (int j = 0; j < buckets; ++j) {
      InstanceSpec spec = MakeBaseInstance(params_.CounterParams(params_.SumBudget(j)),
                                           {Protocol::kSparseSum, j});
      for (int64_t k = 0; k < params_.d; ++k) {
        spec.tag.dimension_k = static_cast<int32_t>(k);
        registry_.Add(spec);
      }
    }
  }

  const SparseParams& params() const { return params_; }
  const InstanceRegistry& registry() const { return registry_; }

  size_t CountIndex(int j) const { return static_cast<size_t>(j); }
  size_t SumIndex(int j, int64_t k) const {
    return static_cast<size_t>(params_.NumBuckets() + j * params_.d + k);
  }

  template <class URBG, class Emit>
  void EmitData(std::span<const int32_t> ones, URBG&, Emit&& emit) const {
    internal::CheckSupport(ones, params_.d);
    const auto j = SparsityIndexOfNorm(static_cast<int64_t>(ones.size()));
    if (!j) return;
    emit(CountIndex(*j), int64_t{1});
    for (int32_t k : ones) emit(SumIndex(*j, k), int64_t{1});
  }

  template <class URBG, class Emit>
  void EmitData(const Input& ones, URBG& gen, Emit&& emit) const {
    EmitData(std::span<const int32_t>(ones), gen, emit);
  }

  SparseResult Analyze(std::span<const int64_t> sums) const {
    std::vector<double> counts;
    for (int j = 0; j < params_.NumBuckets(); ++j) {
      counts.push_back(static_cast<double>(sums[CountIndex(j)]));
    }
    SparseResult r;
    r.decision = SelectSparsityThreshold(counts, params_);
    r.estimate.assign(static_cast<size_t>(params_.d), 0.0);
    for (int j = 0; j <= r.decision.LogTau(); ++j) {
      for (int64_t k = 0; k < params_.d; ++k) {
        r.estimate[k] += static_cast<double>(sums[SumIndex(j, k)]);
      }
    }
    return r;
  }

  SparseResult Analyze(const TagGroups& groups) const {
    return Analyze(SumByInstance(groups, registry_));
  }

  // A user lives in one bucket (parallel across buckets); inside it they
  // move the counter and at most 2^j sum instances.
  EpsDelta ComposedBudget() const {
    std::vector<EpsDelta> per_bucket;
    for (int j = 0; j < params_.NumBuckets(); ++j) {
      const EpsDelta step = params_.SumBudget(j);
      const double slack = params_.rule == BudgetRule::kPrinted ? params_.budget.delta / 2
                                                                : params_.budget.delta / 4;
      const EpsDelta sums = AdvancedComposition(step.epsilon, step.delta,
                                                int64_t{1} << j, slack);
      const EpsDelta count = params_.CountBudget();
      per_bucket.push_back({count.epsilon + sums.epsilon, count.delta + sums.delta});
    }
    return ParallelComposition(per_bucket);
  }

 private:
  SparseParams params_;
  InstanceRegistry registry_;
};

// Per-dimension counting with the sparsity bound taken as d.
class NaiveVecSumDp {
 public:
  using Input = std::vector<int32_t>;

  explicit NaiveVecSumDp(const SparseParams& params) : params_(params) {
    params_.Validate();
    InstanceSpec spec =
        MakeBaseInstance(params_.CounterParams(StepBudget()), {Protocol::kNaiveVec});
    for (int64_t k = 0; k < params_.d; ++k) {
      spec.tag.dimension_k = static_cast<int32_t>(k);
      registry_.Add(spec);
    }
  }

  EpsDelta StepBudget() const {
    return InverseAdvancedComposition(params_.budget.eps_delta(), params_.d);
  }

  const SparseParams& params() const { return params_; }
  const InstanceRegistry& registry() const { return registry_; }

  template <class URBG, class Emit>
  void EmitData(std::span<const int32_t> ones, URBG&, Emit&& emit) const {
    internal::CheckSupport(ones, params_.d);
    for (int32_t k : ones) emit(static_cast<size_t>(k), int64_t{1});
  }

  template <class URBG, class Emit>
  void EmitData(const Input& ones, URBG& gen, Emit&& emit) const {
    EmitData(std::span<const int32_t>(ones), gen, emit);
  }

  std::vector<double> Analyze(std::span<const int64_t> sums) const {
    return std::vector<double>(sums.begin(), sums.end());
  }

  EpsDelta ComposedBudget() const {
    const EpsDelta step = StepBudget();
    return AdvancedComposition(step.epsilon, step.delta, params_.d,
                               params_.budget.delta / 2);
  }

 private:
  SparseParams params_;
  InstanceRegistry registry_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_SPARSE_VEC_H_
