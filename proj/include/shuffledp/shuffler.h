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

#ifndef SHUFFLEDP_SHUFFLER_H_
#define SHUFFLEDP_SHUFFLER_H_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shuffledp/budget.h"
#include "shuffledp/errors.h"
#include "shuffledp/message.h"
#include "shuffledp/noise.h"
#include "shuffledp/rng.h"

namespace shuffledp {

// Stream identifiers below the master seed.
inline constexpr uint64_t kUserStream = 1;
inline constexpr uint64_t kShuffleStream = 2;
inline constexpr uint64_t kDataStream = 3;
inline constexpr uint64_t kNoiseStream = 4;

// Everything the harness needs to know about one summation sub-instance.
struct InstanceSpec {
  InstanceTag tag;
  int64_t participants = 1;
  int64_t domain_bound = 1;     // U, largest data value accepted
  int64_t rounding_factor = 1;  // B
  int64_t message_bound = 1;    // U', largest message magnitude
  bool rounding = false;
  double noise_scale = 1.0;
  double flood_rate = 0.0;
  EpsDelta budget;
  bool noiseless = false;

  NoiseShareSpec share_spec() const {
    return {participants, noise_scale, message_bound};
  }
};

class InstanceRegistry {
 public:
  size_t Add(InstanceSpec spec) {
    auto [it, inserted] = index_.emplace(spec.tag, specs_.size());
    if (!inserted) {
      throw ProtocolError("duplicate instance tag " + spec.tag.DebugString());
    }
    specs_.push_back(std::move(spec));
    return it->second;
  }

  size_t size() const { return specs_.size(); }
  bool empty() const { return specs_.empty(); }
  const InstanceSpec& operator[](size_t i) const { return specs_[i]; }
  std::span<const InstanceSpec> specs() const { return specs_; }

  std::optional<size_t> Find(const InstanceTag& tag) const {
    auto it = index_.find(tag);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  size_t IndexOf(const InstanceTag& tag) const {
    auto idx = Find(tag);
    if (!idx) throw ProtocolError("undeclared instance tag " + tag.DebugString());
    return *idx;
  }

  int64_t MaxMessageBound() const {
    int64_t m = 1;
    for (const auto& s : specs_) m = std::max(m, s.message_bound);
    return m;
  }

  // ceil(log2(2 U' + 1)) payload bits plus ceil(log2(#instances)) tag bits.
  int BitsPerMessage() const {
    const uint64_t values = 2 * static_cast<uint64_t>(MaxMessageBound()) + 1;
    const int payload = std::bit_width(values - 1);
    const int tag = specs_.size() <= 1 ? 0 : std::bit_width(specs_.size() - 1);
    return payload + tag;
  }

 private:
  std::vector<InstanceSpec> specs_;
  std::unordered_map<InstanceTag, size_t, InstanceTagHash> index_;
};

inline CommStats MakeCommStats(const InstanceRegistry& registry,
                               std::span<const int64_t> counts, int64_t users) {
  CommStats stats;
  for (size_t i = 0; i < counts.size(); ++i) {
    stats.total_messages += counts[i];
    stats.per_instance_counts[registry[i].tag] = counts[i];
  }
  stats.messages_per_user =
      users > 0 ? static_cast<double>(stats.total_messages) / static_cast<double>(users) : 0;
  stats.bits_per_message = registry.BitsPerMessage();
  return stats;
}

// Appends one user's noise for an instance: the encoded share plus flooding.
template <class URBG>
void AppendNoiseMessages(const InstanceSpec& spec, URBG& gen, MessageBag& bag) {
  if (spec.noiseless) return;
  const MessageBag share = EncodeShareAsMessages(
      SampleDlapShare(spec.share_spec(), gen), spec.message_bound, spec.tag);
  bag.insert(bag.end(), share.begin(), share.end());
  AppendFloodingPairs(spec.flood_rate, spec.message_bound, spec.tag, gen, bag);
}

struct ShuffledRound {
  MessageBag shuffled;
  CommStats stats;
};

// Runs randomizer(input, user_index, engine) -> MessageBag for every user on
// its own stream, checks every message against its instance bound, and
// returns the uniformly permuted union.
template <class Input, class Randomizer>
ShuffledRound RunRound(std::span<const Input> dataset, Randomizer&& randomizer,
                       const InstanceRegistry& registry, const RngSeed& seed) {
  if (dataset.empty()) throw DatasetError("dataset is empty");
  ShuffledRound round;
  std::vector<int64_t> counts(registry.size(), 0);
  const RngSeed users = seed.Derive(kUserStream);
  for (size_t i = 0; i < dataset.size(); ++i) {
    Engine gen = users.Derive(i).MakeEngine();
    MessageBag bag = randomizer(dataset[i], static_cast<int64_t>(i), gen);
    for (const Message& m : bag) {
      const size_t idx = registry.IndexOf(m.tag);
      if (std::abs(m.payload) > registry[idx].message_bound) {
        throw ProtocolError("payload " + std::to_string(m.payload) +
                            " exceeds bound of " + m.tag.DebugString());
      }
      ++counts[idx];
    }
    round.shuffled.insert(round.shuffled.end(), bag.begin(), bag.end());
  }
  Engine shuffle_gen = seed.Derive(kShuffleStream).MakeEngine();
  std::shuffle(round.shuffled.begin(), round.shuffled.end(), shuffle_gen);
  round.stats = MakeCommStats(registry, counts, static_cast<int64_t>(dataset.size()));
  return round;
}

using TagGroups = std::map<InstanceTag, MessageBag>;

inline TagGroups GroupByTag(const MessageBag& shuffled) {
  TagGroups groups;
  for (const Message& m : shuffled) groups[m.tag].push_back(m);
  return groups;
}

// Every declared instance gets a (possibly empty) group; undeclared tags are
// a protocol violation.
inline TagGroups GroupByTag(const MessageBag& shuffled, const InstanceRegistry& registry) {
  TagGroups groups;
  for (const auto& spec : registry.specs()) groups[spec.tag];
  for (const Message& m : shuffled) {
    auto it = groups.find(m.tag);
    if (it == groups.end()) {
      throw ProtocolError("message for undeclared instance " + m.tag.DebugString());
    }
    it->second.push_back(m);
  }
  return groups;
}

inline int64_t SumPayloads(const MessageBag& bag) {
  int64_t s = 0;
  for (const Message& m : bag) s += m.payload;
  return s;
}

// Payload sums in registry order.
inline std::vector<int64_t> SumByInstance(const TagGroups& groups,
                                          const InstanceRegistry& registry) {
  std::vector<int64_t> sums(registry.size(), 0);
  for (size_t i = 0; i < registry.size(); ++i) {
    auto it = groups.find(registry[i].tag);
    if (it == groups.end()) {
      throw ProtocolError("missing group for " + registry[i].tag.DebugString());
    }
    sums[i] = SumPayloads(it->second);
  }
  return sums;
}

// A protocol P exposes
//   const InstanceRegistry& registry() const;
//   template <class URBG, class Emit>
//   void EmitData(const Input&, URBG&, Emit&& emit) const;  // emit(index, payload)
//   Result Analyze(std::span<const int64_t> instance_sums) const;

template <class P, class Input, class URBG>
MessageBag RandomizeWith(const P& protocol, const Input& x, URBG& gen) {
  const InstanceRegistry& registry = protocol.registry();
  MessageBag bag;
  protocol.EmitData(x, gen, [&](size_t idx, int64_t payload) {
    bag.push_back({registry[idx].tag, payload});
  });
  for (const auto& spec : registry.specs()) AppendNoiseMessages(spec, gen, bag);
  return bag;
}

template <class P, class Input>
ShuffledRound RunMessageRound(const P& protocol, std::span<const Input> dataset,
                              const RngSeed& seed) {
  return RunRound(
      dataset,
      [&](const Input& x, int64_t, Engine& gen) { return RandomizeWith(protocol, x, gen); },
      protocol.registry(), seed);
}

struct InstanceRound {
  std::vector<int64_t> sums;
  CommStats stats;
};

// Draws the analyzer-side view directly: exact data sums plus, per instance,
// the joint draw of all n shares and a Poisson(n mu) count of flooding pairs.
// Same distribution of sums and message counts as the message path.
template <class P, class Input>
InstanceRound RunAggregateRound(const P& protocol, std::span<const Input> dataset,
                                const RngSeed& seed) {
  if (dataset.empty()) throw DatasetError("dataset is empty");
  const InstanceRegistry& registry = protocol.registry();
  InstanceRound round;
  round.sums.assign(registry.size(), 0);
  std::vector<int64_t> counts(registry.size(), 0);
  Engine data_gen = seed.Derive(kDataStream).MakeEngine();
  for (const Input& x : dataset) {
    protocol.EmitData(x, data_gen, [&](size_t idx, int64_t payload) {
      round.sums[idx] += payload;
      ++counts[idx];
    });
  }
  const RngSeed noise = seed.Derive(kNoiseStream);
  const int64_t n = static_cast<int64_t>(dataset.size());
  for (size_t i = 0; i < registry.size(); ++i) {
    const InstanceSpec& spec = registry[i];
    if (spec.noiseless) continue;
    Engine gen = noise.Derive(i).MakeEngine();
    NoiseShareSpec share = spec.share_spec();
    share.participants = n;
    const AggregateNoise agg = SampleAggregateShares(share, gen);
    round.sums[i] += agg.total;
    counts[i] += agg.messages +
                 2 * internal::SamplePoisson(spec.flood_rate * static_cast<double>(n), gen);
  }
  round.stats = MakeCommStats(registry, counts, n);
  return round;
}

enum class EngineKind { kMessage, kAggregate };

template <class P, class Input>
InstanceRound Simulate(const P& protocol, std::span<const Input> dataset,
                       const RngSeed& seed, EngineKind engine) {
  if (engine == EngineKind::kAggregate) return RunAggregateRound(protocol, dataset, seed);
  ShuffledRound shuffled = RunMessageRound(protocol, dataset, seed);
  InstanceRound round;
  round.sums = SumByInstance(GroupByTag(shuffled.shuffled, protocol.registry()),
                             protocol.registry());
  round.stats = std::move(shuffled.stats);
  return round;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_SHUFFLER_H_
