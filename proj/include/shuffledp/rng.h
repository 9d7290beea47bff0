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

#ifndef SHUFFLEDP_RNG_H_
#define SHUFFLEDP_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace shuffledp {

// All randomness in the library flows through this engine type. It is not
// cryptographically secure; the simulation only needs reproducibility.
using Engine = std::mt19937_64;

inline constexpr uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// A position in the tree of random streams: the master seed plus a path of
// stream identifiers (user index, protocol instance, role, ...). Identical
// (master_seed, path) pairs always yield identical engines.
class RngSeed {
 public:
  explicit RngSeed(uint64_t master_seed)
      : master_seed_(master_seed), key_(SplitMix64(master_seed)) {}

  uint64_t master_seed() const { return master_seed_; }
  uint64_t key() const { return key_; }

  RngSeed Derive(uint64_t stream_id) const {
    RngSeed child = *this;
    child.key_ = SplitMix64(key_ ^ SplitMix64(stream_id + 0x632be59bd9b4e019ULL));
    return child;
  }

  RngSeed Derive(std::initializer_list<uint64_t> path) const {
    RngSeed child = *this;
    for (uint64_t id : path) child = child.Derive(id);
    return child;
  }

  // Labels are hashed with FNV-1a so call sites can name their streams.
  RngSeed Derive(std::string_view label) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return Derive(h);
  }

  Engine MakeEngine() const {
    std::seed_seq seq{static_cast<uint32_t>(key_), static_cast<uint32_t>(key_ >> 32),
                      static_cast<uint32_t>(master_seed_),
                      static_cast<uint32_t>(master_seed_ >> 32)};
    return Engine(seq);
  }

  friend bool operator==(const RngSeed&, const RngSeed&) = default;

 private:
  uint64_t master_seed_;
  uint64_t key_;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_RNG_H_
