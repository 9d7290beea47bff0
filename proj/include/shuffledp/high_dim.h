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

#ifndef SHUFFLEDP_HIGH_DIM_H_
#define SHUFFLEDP_HIGH_DIM_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shuffledp/base_sum.h"
#include "shuffledp/budget.h"
#include "shuffledp/errors.h"
#include "shuffledp/message.h"
#include "shuffledp/rng.h"
#include "shuffledp/shuffler.h"
#include "shuffledp/sum_dp.h"

namespace shuffledp {

// In-place unnormalized Walsh-Hadamard transform; size must be a power of 2.
template <class T>
void FastWalshHadamard(std::span<T> v) {
  const size_t n = v.size();
  for (size_t h = 1; h < n; h *= 2) {
    for (size_t i = 0; i < n; i += 2 * h) {
      for (size_t j = i; j < i + h; ++j) {
        const T a = v[j];
        const T b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

// W = H P with H the unnormalized d x d Hadamard matrix and P = diag(signs).
struct RotationDescriptor {
  int64_t d_raw = 1;
  int64_t d = 1;
  std::vector<int8_t> diag_signs;
  RngSeed seed{0};
};

inline RotationDescriptor BuildRotation(int64_t d_raw, const RngSeed& seed) {
  if (d_raw < 1) throw ConfigError("dimension must be >= 1");
  RotationDescriptor desc;
  desc.d_raw = d_raw;
  desc.d = NextPowerOfTwo(d_raw);
  desc.seed = seed;
  Engine gen = seed.MakeEngine();
  std::bernoulli_distribution coin(0.5);
  desc.diag_signs.resize(static_cast<size_t>(desc.d));
  for (auto& s : desc.diag_signs) s = coin(gen) ? 1 : -1;
  return desc;
}

// H (P x), with x zero-padded to length d.
inline std::vector<int64_t> ApplyRotation(const RotationDescriptor& desc,
                                          std::span<const int64_t> x) {
  if (static_cast<int64_t>(x.size()) > desc.d) {
    throw ConfigError("vector longer than rotation dimension");
  }
  std::vector<int64_t> y(static_cast<size_t>(desc.d), 0);
  for (size_t k = 0; k < x.size(); ++k) y[k] = desc.diag_signs[k] * x[k];
  FastWalshHadamard(std::span<int64_t>(y));
  return y;
}

// (1/d) P H y.
inline std::vector<double> InvertRotation(const RotationDescriptor& desc,
                                          std::span<const double> y) {
  if (static_cast<int64_t>(y.size()) != desc.d) {
    throw ConfigError("inverse rotation needs a length-d vector");
  }
  std::vector<double> x(y.begin(), y.end());
  FastWalshHadamard(std::span<double>(x));
  const double inv_d = 1.0 / static_cast<double>(desc.d);
  for (size_t k = 0; k < x.size(); ++k) x[k] *= inv_d * desc.diag_signs[k];
  return x;
}

struct PosNegSplit {
  std::vector<int64_t> plus;
  std::vector<int64_t> minus;
};

inline PosNegSplit SplitPosNeg(std::span<const int64_t> y, int64_t clip_bound) {
  PosNegSplit out;
  out.plus.resize(y.size(), 0);
  out.minus.resize(y.size(), 0);
  for (size_t k = 0; k < y.size(); ++k) {
    if (y[k] > 0) out.plus[k] = std::min(y[k], clip_bound);
    if (y[k] < 0) out.minus[k] = std::min(-y[k], clip_bound);
  }
  return out;
}

struct HighDimParams {
  PrivacyBudget budget;
  int64_t n = 1;
  int64_t d = 1;
  int64_t u_l2 = 1;
  bool noiseless_mode = false;
  double lambda = 0.1;
  RoundingPolicy rounding = RoundingPolicy::kAuto;
  double flood_constant = 1.0;

  int64_t PaddedD() const { return NextPowerOfTwo(d); }

  // ceil(U_l2 sqrt(2 ln(8 n d / beta))).
  int64_t ClipBound() const {
    const double dd = static_cast<double>(PaddedD());
    return static_cast<int64_t>(std::ceil(
        static_cast<double>(u_l2) *
        std::sqrt(2.0 * std::log(8.0 * static_cast<double>(n) * dd / budget.beta))));
  }

  // (eps / (4 sqrt(d ln(2/delta))), delta / (4d)).
  EpsDelta StepBudget() const {
    const double dd = static_cast<double>(PaddedD());
    return {budget.epsilon / (4.0 * std::sqrt(dd * std::log(2.0 / budget.delta))),
            budget.delta / (4.0 * dd)};
  }

  double StepBeta() const { return budget.beta / (2.0 * static_cast<double>(PaddedD())); }

  void Validate() const {
    budget.Validate();
    if (n < 1 || d < 1 || u_l2 < 1) throw ConfigError("n, d and U_l2 must be >= 1");
  }

  SumParams InnerSumParams() const {
    const EpsDelta step = StepBudget();
    SumParams s;
    s.budget = PrivacyBudget::Make(step.epsilon, step.delta, StepBeta());
    s.n = n;
    s.domain_U = ClipBound();
    s.noiseless_mode = noiseless_mode;
    s.lambda = lambda;
    s.rounding = rounding;
    s.flood_constant = flood_constant;
    return s;
  }
};

struct HighDimResult {
  std::vector<double> estimate;  // length d_raw
  std::vector<int64_t> tau_plus;
  std::vector<int64_t> tau_minus;
};

namespace internal {

inline int64_t SquaredNorm(std::span<const int64_t> x) {
  int64_t s = 0;
  for (int64_t v : x) s += v * v;
  return s;
}

// 2 * dims SumDP cores, one per (dimension, sign), sharing one registry.
class SignedSumBank {
 public:
  SignedSumBank(const SumParams& inner, Protocol protocol, int64_t dims) {
    cores_.reserve(static_cast<size_t>(2 * dims));
    for (int64_t k = 0; k < dims; ++k) {
      for (Sign s : {Sign::kPlus, Sign::kMinus}) {
        cores_.emplace_back(inner, InstanceTag{protocol, -1, static_cast<int32_t>(k), s});
        cores_.back().RegisterInto(registry_);
      }
    }
  }

  const InstanceRegistry& registry() const { return registry_; }
  const SumDpCore& plus(size_t k) const { return cores_[2 * k]; }
  const SumDpCore& minus(size_t k) const { return cores_[2 * k + 1]; }
  size_t dims() const { return cores_.size() / 2; }

  template <class URBG, class Emit>
  void EmitSplit(std::span<const int64_t> y, int64_t clip, URBG& gen, Emit&& emit) const {
    for (size_t k = 0; k < y.size(); ++k) {
      if (y[k] > 0) plus(k).EmitData(std::min(y[k], clip), gen, emit);
      if (y[k] < 0) minus(k).EmitData(std::min(-y[k], clip), gen, emit);
    }
  }

  std::vector<double> AnalyzeSplit(std::span<const int64_t> sums,
                                   std::vector<int64_t>* tau_plus,
                                   std::vector<int64_t>* tau_minus) const {
    std::vector<double> y(dims(), 0.0);
    for (size_t k = 0; k < dims(); ++k) {
      const SumResult p = plus(k).Analyze(sums);
      const SumResult m = minus(k).Analyze(sums);
      y[k] = p.estimate - m.estimate;
      tau_plus->push_back(p.decision.tau);
      tau_minus->push_back(m.decision.tau);
    }
    return y;
  }

 private:
  std::vector<SumDpCore> cores_;
  InstanceRegistry registry_;
};

}  // namespace internal

class HighDimSumDp {
 public:
  using Input = std::vector<int64_t>;

  HighDimSumDp(const HighDimParams& params, RotationDescriptor rotation)
      : params_(params),
        rotation_(std::move(rotation)),
        clip_(params.ClipBound()),
        bank_((params.Validate(), params.InnerSumParams()), Protocol::kHighDim,
              params.PaddedD()) {
    if (rotation_.d != params_.PaddedD() || rotation_.d_raw != params_.d) {
      throw ConfigError("rotation dimension does not match parameters");
    }
  }

  const HighDimParams& params() const { return params_; }
  const RotationDescriptor& rotation() const { return rotation_; }
  const InstanceRegistry& registry() const { return bank_.registry(); }
  int64_t clip_bound() const { return clip_; }

  template <class URBG, class Emit>
  void EmitData(std::span<const int64_t> x, URBG& gen, Emit&& emit) const {
    if (static_cast<int64_t>(x.size()) != params_.d) {
      throw DatasetError("vector has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(params_.d));
    }
    if (internal::SquaredNorm(x) > params_.u_l2 * params_.u_l2) {
      throw DatasetError("vector l2 norm exceeds U_l2");
    }
    const std::vector<int64_t> y = ApplyRotation(rotation_, x);
    bank_.EmitSplit(y, clip_, gen, emit);
  }

  template <class URBG, class Emit>
  void EmitData(const Input& x, URBG& gen, Emit&& emit) const {
    EmitData(std::span<const int64_t>(x), gen, emit);
  }

  HighDimResult Analyze(std::span<const int64_t> sums) const {
    HighDimResult r;
    const std::vector<double> y = bank_.AnalyzeSplit(sums, &r.tau_plus, &r.tau_minus);
    r.estimate = InvertRotation(rotation_, y);
    r.estimate.resize(static_cast<size_t>(params_.d));
    return r;
  }

  HighDimResult Analyze(const TagGroups& groups) const {
    return Analyze(SumByInstance(groups, registry()));
  }

  // Each user moves the 2d (dimension, sign) SumDP runs; within a run the
  // sub-domains compose in parallel.
  EpsDelta ComposedBudget() const {
    const EpsDelta step = params_.StepBudget();
    return AdvancedComposition(step.epsilon, step.delta, 2 * params_.PaddedD(),
                               params_.budget.delta / 2);
  }

 private:
  HighDimParams params_;
  RotationDescriptor rotation_;
  int64_t clip_;
  internal::SignedSumBank bank_;
};

// Per-dimension SumDP on the raw coordinates, no rotation. Comparator only.
class NaiveHighDimSumDp {
 public:
  using Input = std::vector<int64_t>;

  explicit NaiveHighDimSumDp(const HighDimParams& params)
      : params_(params), bank_((params.Validate(), InnerParams(params)),
                               Protocol::kNaiveHighDim, params.d) {}

  static EpsDelta StepBudget(const HighDimParams& p) {
    return InverseAdvancedComposition(p.budget.eps_delta(), 2 * p.d);
  }

  static SumParams InnerParams(const HighDimParams& p) {
    const EpsDelta step = StepBudget(p);
    SumParams s;
    s.budget = PrivacyBudget::Make(step.epsilon, step.delta,
                                   p.budget.beta / (2.0 * static_cast<double>(p.d)));
    s.n = p.n;
    s.domain_U = p.u_l2;
    s.noiseless_mode = p.noiseless_mode;
    s.lambda = p.lambda;
    s.rounding = p.rounding;
    s.flood_constant = p.flood_constant;
    return s;
  }

  const HighDimParams& params() const { return params_; }
  const InstanceRegistry& registry() const { return bank_.registry(); }

  template <class URBG, class Emit>
  void EmitData(std::span<const int64_t> x, URBG& gen, Emit&& emit) const {
    if (static_cast<int64_t>(x.size()) != params_.d) {
      throw DatasetError("vector length does not match d");
    }
    if (internal::SquaredNorm(x) > params_.u_l2 * params_.u_l2) {
      throw DatasetError("vector l2 norm exceeds U_l2");
    }
    bank_.EmitSplit(x, params_.u_l2, gen, emit);
  }

  template <class URBG, class Emit>
  void EmitData(const Input& x, URBG& gen, Emit&& emit) const {
    EmitData(std::span<const int64_t>(x), gen, emit);
  }

  HighDimResult Analyze(std::span<const int64_t> sums) const {
    HighDimResult r;
    r.estimate = bank_.AnalyzeSplit(sums, &r.tau_plus, &r.tau_minus);
    return r;
  }

  EpsDelta ComposedBudget() const {
    const EpsDelta step = StepBudget(params_);
    return AdvancedComposition(step.epsilon, step.delta, 2 * params_.d,
                               params_.budget.delta / 2);
  }

 private:
  HighDimParams params_;
  internal::SignedSumBank bank_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_HIGH_DIM_H_
