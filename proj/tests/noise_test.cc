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

#include "shuffledp/noise.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "gtest/gtest.h"
#include "shuffledp/rng.h"
#include "stat_util.h"

namespace shuffledp {
namespace {

using ::shuffledp::testing::DlapPmf;
using ::shuffledp::testing::KsDistanceInteger;
using ::shuffledp::testing::Mean;
using ::shuffledp::testing::Variance;

TEST(DiscreteLaplaceTest, TinyScaleIsZero) {
  Engine gen = RngSeed(1).MakeEngine();
  for (int i = 0; i < 10000; ++i) {
    EXPECT_EQ(SampleDiscreteLaplace({1e-3}, gen), 0);
  }
}

TEST(DiscreteLaplaceTest, RejectsNonPositiveScale) {
  Engine gen = RngSeed(1).MakeEngine();
  EXPECT_THROW(SampleDiscreteLaplace({0.0}, gen), ConfigError);
}

TEST(DiscreteLaplaceTest, MomentsAtScaleFive) {
  double analytic_var = 0;
  for (int64_t k = -3000; k <= 3000; ++k) analytic_var += k * k * DlapPmf(5, k);
  EXPECT_NEAR(DiscreteLaplaceVariance({5.0}), analytic_var, 1e-9);
  EXPECT_NEAR(analytic_var, 49.833666138305894, 1e-9);

  Engine gen = RngSeed(2).MakeEngine();
  std::vector<double> draws;
  for (int i = 0; i < 1'000'000; ++i) {
    draws.push_back(static_cast<double>(SampleDiscreteLaplace({5.0}, gen)));
  }
  EXPECT_NEAR(Mean(draws), 0.0, 0.05);
  EXPECT_NEAR(Variance(draws), analytic_var, 0.03 * analytic_var);
}

TEST(DiscreteLaplaceTest, CdfMatchesPmfSums) {
  for (double s : {0.5, 1.0, 5.0, 50.0}) {
    double acc = 0;
    for (int64_t k = -20000; k <= 40; ++k) {
      acc += DlapPmf(s, k);
      if (k >= -40) {
        EXPECT_NEAR(DiscreteLaplaceCdf({s}, k), acc, 1e-9) << s << " " << k;
      }
    }
  }
}

TEST(DiscreteLaplaceTest, SeedOverloadIsDeterministic) {
  EXPECT_EQ(SampleDiscreteLaplace({50.0}, RngSeed(5)),
            SampleDiscreteLaplace({50.0}, RngSeed(5)));
}

TEST(DlapShareTest, SingleParticipantIsDiscreteLaplace) {
  Engine gen = RngSeed(3).MakeEngine();
  std::vector<int64_t> draws;
  for (int i = 0; i < 100000; ++i) draws.push_back(SampleDlapShare({1, 5.0, 8}, gen));
  EXPECT_LT(KsDistanceInteger(draws, [](int64_t k) { return DiscreteLaplaceCdf({5.0}, k); }),
            0.01);
}

TEST(DlapShareTest, HundredSharesSumToDiscreteLaplaceVariance) {
  Engine gen = RngSeed(4).MakeEngine();
  const NoiseShareSpec spec{100, 5.0, 8};
  std::vector<double> sums;
  for (int t = 0; t < 100000; ++t) {
    int64_t s = 0;
    for (int i = 0; i < 100; ++i) s += SampleDlapShare(spec, gen);
    sums.push_back(static_cast<double>(s));
  }
  const double target = DiscreteLaplaceVariance({5.0});
  EXPECT_NEAR(Variance(sums), target, 0.05 * target);
}

TEST(DlapShareTest, ShareMeanIsZero) {
  Engine gen = RngSeed(5).MakeEngine();
  std::vector<double> draws;
  for (int i = 0; i < 1'000'000; ++i) {
    draws.push_back(static_cast<double>(SampleDlapShare({10, 5.0, 8}, gen)));
  }
  EXPECT_NEAR(Mean(draws), 0.0, 0.05);
}

TEST(DlapShareTest, TenShareSumKs) {
  Engine gen = RngSeed(6).MakeEngine();
  std::vector<int64_t> sums;
  for (int t = 0; t < 100000; ++t) {
    int64_t s = 0;
    for (int i = 0; i < 10; ++i) s += SampleDlapShare({10, 5.0, 8}, gen);
    sums.push_back(s);
  }
  EXPECT_LT(KsDistanceInteger(sums, [](int64_t k) { return DiscreteLaplaceCdf({5.0}, k); }),
            0.01);
}

TEST(LogarithmicTest, MatchesPmf) {
  const double p = 0.9;
  Engine gen = RngSeed(7).MakeEngine();
  const int draws = 400000;
  std::vector<int> counts(8, 0);
  for (int i = 0; i < draws; ++i) {
    const int64_t k = SampleLogarithmic(p, gen);
    ASSERT_GE(k, 1);
    if (k < 8) ++counts[k];
  }
  for (int k = 1; k < 8; ++k) {
    const double pk = -std::pow(p, k) / (k * std::log(1 - p));
    const double se = std::sqrt(pk * (1 - pk) / draws);
    EXPECT_NEAR(counts[k] / static_cast<double>(draws), pk, 4 * se) << k;
  }
}

TEST(AggregateSharesTest, TotalIsDiscreteLaplace) {
  for (double s : {1.0, 5.0, 50.0}) {
    Engine gen = RngSeed(8).MakeEngine();
    std::vector<int64_t> totals;
    for (int t = 0; t < 100000; ++t) {
      totals.push_back(SampleAggregateShares({1000, s, 8}, gen).total);
    }
    EXPECT_LT(KsDistanceInteger(totals, [s](int64_t k) { return DiscreteLaplaceCdf({s}, k); }),
              0.01)
        << s;
  }
}

TEST(AggregateSharesTest, MessageCountMatchesPerUserDraws) {
  const NoiseShareSpec spec{50, 20.0, 4};
  Engine gen = RngSeed(9).MakeEngine();
  double joint = 0;
  double per_user = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    joint += static_cast<double>(SampleAggregateShares(spec, gen).messages);
    for (int i = 0; i < spec.participants; ++i) {
      per_user += static_cast<double>(
          EncodeShareAsMessages(SampleDlapShare(spec, gen), spec.domain_bound).size());
    }
  }
  joint /= trials;
  per_user /= trials;
  EXPECT_NEAR(joint, per_user, 0.03 * per_user);
  // The analytic figure is an upper bound, and not a loose one.
  const double bound = ExpectedShareMessagesPerUser(spec) * spec.participants;
  EXPECT_GE(bound, per_user * 0.97);
  EXPECT_LE(bound, per_user * 1.5);
}

TEST(EncodeShareTest, Examples) {
  EXPECT_TRUE(EncodeShareAsMessages(0, 8).empty());
  const MessageBag five = EncodeShareAsMessages(5, 8);
  ASSERT_EQ(five.size(), 1u);
  EXPECT_EQ(five[0].payload, 5);
  const MessageBag neg = EncodeShareAsMessages(-11, 8);
  ASSERT_EQ(neg.size(), 2u);
  EXPECT_EQ(neg[0].payload, -8);
  EXPECT_EQ(neg[1].payload, -3);
  EXPECT_THROW(EncodeShareAsMessages(3, 0), ConfigError);
}

TEST(EncodeShareTest, RoundTripsWithinBounds) {
  Engine gen = RngSeed(10).MakeEngine();
  std::uniform_int_distribution<int64_t> share_dist(-1'000'000, 1'000'000);
  for (int64_t bound : {1, 8, 1000}) {
    std::vector<int64_t> shares = {-1'000'000, -1, 0, 1, 1'000'000, bound, -bound,
                                   bound + 1};
    for (int i = 0; i < (bound == 1 ? 200 : 5000); ++i) shares.push_back(share_dist(gen));
    for (int64_t share : shares) {
      const MessageBag bag = EncodeShareAsMessages(share, bound);
      int64_t sum = 0;
      for (const Message& m : bag) {
        ASSERT_NE(m.payload, 0);
        ASSERT_LE(std::abs(m.payload), bound);
        sum += m.payload;
      }
      ASSERT_EQ(sum, share);
      ASSERT_EQ(static_cast<int64_t>(bag.size()), (std::abs(share) + bound - 1) / bound);
    }
  }
}

TEST(FloodingTest, ZeroRateIsEmpty) {
  Engine gen = RngSeed(11).MakeEngine();
  EXPECT_TRUE(SampleFloodingPairs(0.0, 8, gen).empty());
  EXPECT_THROW(SampleFloodingPairs(-1.0, 8, gen), ConfigError);
}

TEST(FloodingTest, BagsCancelAndMeanSizeIsTwiceRate) {
  Engine gen = RngSeed(12).MakeEngine();
  double total = 0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const MessageBag bag = SampleFloodingPairs(3.0, 8, gen);
    int64_t sum = 0;
    for (const Message& m : bag) {
      ASSERT_GE(std::abs(m.payload), 1);
      ASSERT_LE(std::abs(m.payload), 8);
      sum += m.payload;
    }
    ASSERT_EQ(sum, 0);
    total += static_cast<double>(bag.size());
  }
  EXPECT_NEAR(total / trials, 6.0, 0.12);
}

TEST(FloodingRateTest, ClosedForms) {
  EXPECT_NEAR(FloodingRateRounded(10000, 1.0, 1e-12, 0.1, 0.1, 1.0), 2225.7270895068286,
              1e-6);
  EXPECT_NEAR(FloodingRateUnrounded(10000, 1.0, 1e-12, 1024, 1.0), 617.8242144027085, 1e-8);
  // With a one-value domain this is log(1/delta)/(eps n).
  EXPECT_NEAR(FloodingRateUnrounded(10000, 1.0, 1e-12, 1, 1.0), 0.0039863137138648344,
              1e-12);
  EXPECT_DOUBLE_EQ(FloodingRateRounded(10000, 1.0, 1e-12, 0.1, 0.1, 2.0),
                   2 * FloodingRateRounded(10000, 1.0, 1e-12, 0.1, 0.1, 1.0));
}

TEST(FloodingRateTest, RoundedRateVanishesWithN) {
  double prev = 1e300;
  for (int64_t n = 10000; n <= int64_t{100000000000000}; n *= 100) {
    const double mu = FloodingRateRounded(n, 1.0, 1e-12, 0.1, 0.1, 1.0);
    EXPECT_LT(mu, prev);
    prev = mu;
  }
  EXPECT_LT(prev, 1.0);
}

}  // namespace
}  // namespace shuffledp
