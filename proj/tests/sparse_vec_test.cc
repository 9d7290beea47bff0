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

#include "shuffledp/sparse_vec.h"

#include <algorithm>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "shuffledp/errors.h"
#include "shuffledp/rng.h"
#include "shuffledp/shuffler.h"

namespace shuffledp {
namespace {

using Support = std::vector<int32_t>;

SparseParams Params(int64_t n, int64_t d, double eps = 1.0) {
  SparseParams p;
  p.budget = PrivacyBudget::Make(eps, 1e-6, 0.1);
  p.n = n;
  p.d = d;
  return p;
}

std::vector<double> RunNoiseless(const SparVecSumDp& protocol, const std::vector<Support>& data,
                                 SparsityDecision* decision = nullptr) {
  const ShuffledRound round =
      RunMessageRound(protocol, std::span<const Support>(data), RngSeed(1));
  const SparseResult r = protocol.Analyze(GroupByTag(round.shuffled, protocol.registry()));
  if (decision != nullptr) *decision = r.decision;
  return r.estimate;
}

TEST(SparsityIndexTest, Examples) {
  EXPECT_FALSE(SparsityIndexOfNorm(0).has_value());
  EXPECT_EQ(SparsityIndexOfNorm(1), 0);
  EXPECT_EQ(SparsityIndexOfNorm(2), 1);
  EXPECT_EQ(SparsityIndexOfNorm(3), 2);
  EXPECT_EQ(SparsityIndexOfNorm(4), 2);
  EXPECT_EQ(SparsityIndexOfNorm(5), 3);
  const std::vector<uint8_t> x{0, 1, 1, 0, 1};
  EXPECT_EQ(SparsityIndex(x), 2);
  const std::vector<uint8_t> bad{0, 2};
  EXPECT_THROW(SparsityIndex(bad), DatasetError);
}

TEST(SparseParamsTest, BarAndBuckets) {
  const SparseParams p = Params(100, 8);
  EXPECT_EQ(p.NumBuckets(), 4);
  EXPECT_NEAR(p.CountBar(), 11.393269250152091, 1e-12);
  EXPECT_EQ(Params(100, 1000).NumBuckets(), 11);
}

TEST(SelectSparsityThresholdTest, Examples) {
  const SparseParams p = Params(100, 8);
  EXPECT_EQ(SelectSparsityThreshold(std::vector<double>{0, 20, 0, 0}, p).tau, 2);
  EXPECT_EQ(SelectSparsityThreshold(std::vector<double>{20, 0, 0, 15}, p).tau, 8);
  EXPECT_EQ(SelectSparsityThreshold(std::vector<double>{11, 11, 0, 0}, p).tau, 0);
  EXPECT_EQ(SelectSparsityThreshold(std::vector<double>{11, 11, 0, 0}, p).LogTau(), -1);
  EXPECT_THROW(SelectSparsityThreshold(std::vector<double>{1, 2}, p), ProtocolError);
}

TEST(SparVecTest, NoiselessExample) {
  SparseParams p = Params(20, 8);
  p.noiseless_mode = true;
  const SparVecSumDp protocol(p);
  const std::vector<Support> data(20, Support{2, 5});
  SparsityDecision decision;
  const std::vector<double> est = RunNoiseless(protocol, data, &decision);
  EXPECT_EQ(decision.tau, 2);
  EXPECT_EQ(est, (std::vector<double>{0, 0, 20, 0, 0, 20, 0, 0}));
}

TEST(SparVecTest, EmitsOneCountAndOneSumPerCoordinate) {
  SparseParams p = Params(20, 16);
  p.noiseless_mode = true;
  const SparVecSumDp protocol(p);
  Engine gen = RngSeed(1).MakeEngine();
  const MessageBag bag = RandomizeWith(protocol, Support{1, 4, 9}, gen);
  ASSERT_EQ(bag.size(), 4u);
  EXPECT_EQ(bag[0].tag, (InstanceTag{Protocol::kSparseCount, 2}));
  for (size_t i = 1; i < 4; ++i) {
    EXPECT_EQ(bag[i].tag.protocol, Protocol::kSparseSum);
    EXPECT_EQ(bag[i].tag.subdomain_j, 2);
    EXPECT_EQ(bag[i].payload, 1);
  }
  EXPECT_TRUE(RandomizeWith(protocol, Support{}, gen).empty());
  EXPECT_THROW(RandomizeWith(protocol, Support{3, 3}, gen), DatasetError);
  EXPECT_THROW(RandomizeWith(protocol, Support{5, 2}, gen), DatasetError);
  EXPECT_THROW(RandomizeWith(protocol, Support{16}, gen), DatasetError);
}

// Noiseless runs match the sum of all vectors whose bucket is at most log tau.
TEST(SparVecTest, NoiselessMatchesBucketOracle) {
  Engine gen = RngSeed(4).MakeEngine();
  for (int t = 0; t < 30; ++t) {
    const int64_t d = std::uniform_int_distribution<int64_t>(1, 40)(gen);
    const int64_t n = std::uniform_int_distribution<int64_t>(1, 300)(gen);
    SparseParams p = Params(n, d, std::uniform_real_distribution<double>(0.5, 5.0)(gen));
    p.noiseless_mode = true;
    const SparVecSumDp protocol(p);
    std::vector<Support> data;
    std::vector<int64_t> bucket_count(static_cast<size_t>(p.NumBuckets()), 0);
    std::vector<int32_t> all(static_cast<size_t>(d));
    for (int32_t k = 0; k < d; ++k) all[k] = k;
    for (int64_t i = 0; i < n; ++i) {
      const auto norm = std::uniform_int_distribution<int64_t>(0, std::min<int64_t>(d, 5))(gen);
      Support s;
      std::sample(all.begin(), all.end(), std::back_inserter(s), norm, gen);
      if (norm > 0) ++bucket_count[*SparsityIndexOfNorm(norm)];
      data.push_back(std::move(s));
    }
    int log_tau = -1;
    for (int j = 0; j < p.NumBuckets(); ++j) {
      if (static_cast<double>(bucket_count[j]) > p.CountBar()) log_tau = j;
    }
    std::vector<double> oracle(static_cast<size_t>(d), 0.0);
    for (const Support& s : data) {
      if (s.empty() || *SparsityIndexOfNorm(static_cast<int64_t>(s.size())) > log_tau) continue;
      for (int32_t k : s) oracle[k] += 1;
    }
    EXPECT_EQ(RunNoiseless(protocol, data), oracle) << "case " << t;
  }
}

TEST(SparVecTest, RecomposableRuleFitsBudget) {
  for (int64_t d : {1, 8, 1024}) {
    for (double eps : {0.5, 1.0, 4.0}) {
      const SparVecSumDp protocol(Params(1000, d, eps));
      const EpsDelta used = protocol.ComposedBudget();
      EXPECT_TRUE(WithinBudget(used, {eps, 1e-6}, 1e-6)) << d << " " << eps;
    }
  }
}

TEST(SparVecTest, PrintedRuleOverspendsDelta) {
  SparseParams p = Params(1000, 1024);
  p.rule = BudgetRule::kPrinted;
  const SparVecSumDp protocol(p);
  EXPECT_GT(protocol.ComposedBudget().delta, 1e-6);
  EXPECT_FALSE(WithinBudget(protocol.ComposedBudget(), {1.0, 1e-6}, 1e-6));
}

TEST(NaiveVecTest, NoiselessCountsAndBudget) {
  SparseParams p = Params(3, 4);
  p.noiseless_mode = true;
  const NaiveVecSumDp protocol(p);
  const std::vector<Support> data{{0, 2}, {2}, {1, 2, 3}};
  const ShuffledRound round = RunMessageRound(protocol, std::span<const Support>(data), RngSeed(1));
  const std::vector<double> est =
      protocol.Analyze(SumByInstance(GroupByTag(round.shuffled, protocol.registry()),
                                     protocol.registry()));
  EXPECT_EQ(est, (std::vector<double>{1, 1, 3, 1}));
  for (int64_t d : {1, 64, 1024}) {
    const NaiveVecSumDp naive(Params(1000, d));
    EXPECT_TRUE(WithinBudget(naive.ComposedBudget(), {1.0, 1e-6}, 1e-6)) << d;
  }
}

}  // namespace
}  // namespace shuffledp
