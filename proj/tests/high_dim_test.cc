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

#include "shuffledp/high_dim.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "shuffledp/errors.h"
#include "shuffledp/rng.h"
#include "shuffledp/shuffler.h"

namespace shuffledp {
namespace {

HighDimParams Params(int64_t n, int64_t d, int64_t u_l2, double eps = 1.0,
                     double delta = 1e-6) {
  HighDimParams p;
  p.budget = PrivacyBudget::Make(eps, delta, 0.1);
  p.n = n;
  p.d = d;
  p.u_l2 = u_l2;
  return p;
}

TEST(FastWalshHadamardTest, SmallCases) {
  std::vector<int64_t> v{1, 0};
  FastWalshHadamard(std::span<int64_t>(v));
  EXPECT_EQ(v, (std::vector<int64_t>{1, 1}));
  std::vector<int64_t> w{1, 2, 3, 4};
  FastWalshHadamard(std::span<int64_t>(w));
  EXPECT_EQ(w, (std::vector<int64_t>{10, -2, -4, 0}));
}

TEST(FastWalshHadamardTest, NormAndInvolution) {
  Engine gen = RngSeed(5).MakeEngine();
  std::uniform_int_distribution<int64_t> coord(-1000, 1000);
  for (int64_t d : {1, 2, 8, 64, 1024}) {
    std::vector<int64_t> x(static_cast<size_t>(d));
    for (auto& c : x) c = coord(gen);
    std::vector<int64_t> y = x;
    FastWalshHadamard(std::span<int64_t>(y));
    int64_t nx = 0, ny = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      nx += x[i] * x[i];
      ny += y[i] * y[i];
    }
    EXPECT_EQ(ny, d * nx);
    FastWalshHadamard(std::span<int64_t>(y));
    for (size_t i = 0; i < x.size(); ++i) ASSERT_EQ(y[i], d * x[i]);
  }
}

TEST(RotationTest, PadsAndIsDeterministic) {
  const RotationDescriptor r = BuildRotation(3, RngSeed(9));
  EXPECT_EQ(r.d_raw, 3);
  EXPECT_EQ(r.d, 4);
  ASSERT_EQ(r.diag_signs.size(), 4u);
  for (int8_t s : r.diag_signs) EXPECT_TRUE(s == 1 || s == -1);
  EXPECT_EQ(BuildRotation(3, RngSeed(9)).diag_signs, r.diag_signs);
  EXPECT_THROW(BuildRotation(0, RngSeed(9)), ConfigError);
}

TEST(RotationTest, RoundTripIsExact) {
  Engine gen = RngSeed(6).MakeEngine();
  std::uniform_int_distribution<int64_t> coord(-5000, 5000);
  for (int64_t d_raw : {1, 3, 17, 100, 1024}) {
    const RotationDescriptor r = BuildRotation(d_raw, RngSeed(d_raw));
    std::vector<int64_t> x(static_cast<size_t>(d_raw));
    for (auto& c : x) c = coord(gen);
    const std::vector<int64_t> y = ApplyRotation(r, x);
    ASSERT_EQ(static_cast<int64_t>(y.size()), r.d);
    const std::vector<double> back = InvertRotation(r, std::vector<double>(y.begin(), y.end()));
    for (int64_t k = 0; k < r.d; ++k) {
      ASSERT_EQ(back[k], k < d_raw ? static_cast<double>(x[k]) : 0.0);
    }
  }
  const RotationDescriptor r = BuildRotation(4, RngSeed(1));
  EXPECT_THROW(InvertRotation(r, std::vector<double>(3)), ConfigError);
  EXPECT_THROW(ApplyRotation(r, std::vector<int64_t>(5)), ConfigError);
}

TEST(SplitPosNegTest, Examples) {
  const std::vector<int64_t> y{5, -3, 0, 20, -40};
  const PosNegSplit s = SplitPosNeg(y, 10);
  EXPECT_EQ(s.plus, (std::vector<int64_t>{5, 0, 0, 10, 0}));
  EXPECT_EQ(s.minus, (std::vector<int64_t>{0, 3, 0, 0, 10}));
}

TEST(HighDimParamsTest, DerivedQuantities) {
  const HighDimParams p = Params(10000, 60, 1024, 1.0, 1e-6);
  EXPECT_EQ(p.PaddedD(), 64);
  EXPECT_EQ(p.ClipBound(),
            static_cast<int64_t>(std::ceil(1024 * std::sqrt(2 * std::log(8.0 * 1e4 * 64 / 0.1)))));
  const EpsDelta step = p.StepBudget();
  EXPECT_DOUBLE_EQ(step.epsilon, 1.0 / (4 * std::sqrt(64 * std::log(2e6))));
  EXPECT_DOUBLE_EQ(step.delta, 1e-6 / 256);
  EXPECT_DOUBLE_EQ(p.StepBeta(), 0.1 / 128);
  EXPECT_EQ(p.InnerSumParams().domain_U, p.ClipBound());
}

// Rotated coordinates of an l2-bounded vector stay below the clip bound.
TEST(HighDimTest, RotationSpreadsMass) {
  const HighDimParams p = Params(10000, 64, 1024);
  const int64_t clip = p.ClipBound();
  Engine gen = RngSeed(3).MakeEngine();
  int64_t clipped = 0;
  int64_t max_abs = 0;
  for (int t = 0; t < 500; ++t) {
    // Norm exactly 1024: sixteen coordinates of 256.
    std::vector<int64_t> x(64, 0);
    for (int i = 0; i < 16; ++i) x[(i * 4 + t) % 64] = 256;
    const RotationDescriptor r = BuildRotation(64, RngSeed(static_cast<uint64_t>(t)));
    for (int64_t v : ApplyRotation(r, x)) {
      clipped += std::abs(v) > clip;
      max_abs = std::max(max_abs, std::abs(v));
    }
  }
  EXPECT_EQ(clipped, 0);
  EXPECT_LT(max_abs, clip);
  // A one-hot vector maps to equal-magnitude coordinates.
  const RotationDescriptor r = BuildRotation(64, RngSeed(1));
  std::vector<int64_t> e(64, 0);
  e[7] = 1024;
  for (int64_t v : ApplyRotation(r, e)) EXPECT_EQ(std::abs(v), 1024);
  (void)gen;
}

TEST(HighDimTest, NoiselessEmitExample) {
  HighDimParams p = Params(10, 2, 4);
  p.noiseless_mode = true;
  p.rounding = RoundingPolicy::kNever;
  const RotationDescriptor r = BuildRotation(2, RngSeed(4));
  const HighDimSumDp protocol(p, r);
  Engine gen = RngSeed(1).MakeEngine();
  const MessageBag bag = RandomizeWith(protocol, std::vector<int64_t>{3, 0}, gen);
  // H P (3, 0) = (3 s0, 3 s0).
  ASSERT_EQ(bag.size(), 2u);
  const Sign want = r.diag_signs[0] > 0 ? Sign::kPlus : Sign::kMinus;
  for (size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(bag[k].tag.protocol, Protocol::kHighDim);
    EXPECT_EQ(bag[k].tag.dimension_k, static_cast<int32_t>(k));
    EXPECT_EQ(bag[k].tag.sign, want);
    EXPECT_EQ(bag[k].tag.subdomain_j, 2);
    EXPECT_EQ(bag[k].payload, 3);
  }
}

TEST(HighDimTest, RejectsBadInputs) {
  const HighDimParams p = Params(10, 4, 10);
  const HighDimSumDp protocol(p, BuildRotation(4, RngSeed(1)));
  Engine gen = RngSeed(1).MakeEngine();
  EXPECT_THROW(RandomizeWith(protocol, std::vector<int64_t>{1, 2, 3}, gen), DatasetError);
  EXPECT_THROW(RandomizeWith(protocol, std::vector<int64_t>{10, 1, 0, 0}, gen), DatasetError);
  EXPECT_NO_THROW(RandomizeWith(protocol, std::vector<int64_t>{6, 8, 0, 0}, gen));
  EXPECT_THROW(HighDimSumDp(p, BuildRotation(8, RngSeed(1))), ConfigError);
}

TEST(HighDimTest, NoiselessRecoversSum) {
  Engine gen = RngSeed(8).MakeEngine();
  for (int64_t d : {1, 3, 8, 20}) {
    const int64_t n = 50;
    HighDimParams p = Params(n, d, 100, 1e5);
    p.noiseless_mode = true;
    p.rounding = RoundingPolicy::kNever;
    const HighDimSumDp protocol(p, BuildRotation(d, RngSeed(d)));
    std::vector<std::vector<int64_t>> data;
    std::vector<double> truth(static_cast<size_t>(d), 0.0);
    const auto r_max = static_cast<int64_t>(100 / std::sqrt(static_cast<double>(d)));
    std::uniform_int_distribution<int64_t> coord(-r_max, r_max);
    while (static_cast<int64_t>(data.size()) < n) {
      std::vector<int64_t> x(static_cast<size_t>(d));
      for (auto& c : x) c = coord(gen);
      if (internal::SquaredNorm(x) > 100 * 100) continue;
      for (int64_t k = 0; k < d; ++k) truth[k] += static_cast<double>(x[k]);
      data.push_back(std::move(x));
    }
    const ShuffledRound round =
        RunMessageRound(protocol, std::span<const std::vector<int64_t>>(data), RngSeed(d));
    const HighDimResult r = protocol.Analyze(GroupByTag(round.shuffled, protocol.registry()));
    ASSERT_EQ(static_cast<int64_t>(r.estimate.size()), d);
    for (int64_t k = 0; k < d; ++k) EXPECT_NEAR(r.estimate[k], truth[k], 1e-9) << d;
  }
}

TEST(HighDimTest, ComposedBudgetWithinTotal) {
  for (int64_t d : {1, 4, 64, 1024}) {
    for (double eps : {0.5, 1.0, 4.0}) {
      const HighDimParams p = Params(1000, d, 100, eps, 1e-6);
      const HighDimSumDp protocol(p, BuildRotation(d, RngSeed(1)));
      EXPECT_TRUE(WithinBudget(protocol.ComposedBudget(), p.budget.eps_delta(), 1e-9))
          << d << " " << eps;
      const NaiveHighDimSumDp naive(p);
      EXPECT_TRUE(WithinBudget(naive.ComposedBudget(), p.budget.eps_delta(), 1e-6))
          << d << " " << eps;
    }
  }
}

TEST(HighDimTest, InstancesAreDistinct) {
  const HighDimParams p = Params(1000, 8, 100);
  const HighDimSumDp protocol(p, BuildRotation(8, RngSeed(1)));
  const int64_t subdomains = p.InnerSumParams().NumSubdomains();
  EXPECT_EQ(static_cast<int64_t>(protocol.registry().size()), 2 * 8 * subdomains);
}

TEST(NaiveHighDimTest, NoiselessRecoversSum) {
  // The step budget saturates near 7.7 for huge eps, so a lone value cannot
  // clear its sub-domain bar; repeating each row four times does.
  HighDimParams p = Params(12, 3, 10, 1e5);
  p.noiseless_mode = true;
  p.rounding = RoundingPolicy::kNever;
  const NaiveHighDimSumDp protocol(p);
  std::vector<std::vector<int64_t>> data;
  for (int i = 0; i < 4; ++i) {
    data.push_back({3, -4, 0});
    data.push_back({-6, 8, 0});
    data.push_back({1, 1, 1});
  }
  const ShuffledRound round =
      RunMessageRound(protocol, std::span<const std::vector<int64_t>>(data), RngSeed(1));
  const HighDimResult r = protocol.Analyze(SumByInstance(
      GroupByTag(round.shuffled, protocol.registry()), protocol.registry()));
  EXPECT_EQ(r.estimate, (std::vector<double>{-8, 20, 4}));
}

}  // namespace
}  // namespace shuffledp
