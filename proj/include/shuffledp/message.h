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

#ifndef SHUFFLEDP_MESSAGE_H_
#define SHUFFLEDP_MESSAGE_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace shuffledp {

enum class Protocol : uint8_t {
  kBase,
  kSum,
  kHighDim,
  kSparseCount,
  kSparseSum,
  kNaiveHighDim,
  kNaiveVec,
};

enum class Sign : uint8_t { kNone, kPlus, kMinus };

inline const char* ProtocolName(Protocol p) {
  switch (p) {
    case Protocol::kBase: return "base";
    case Protocol::kSum: return "sum";
    case Protocol::kHighDim: return "highdim";
    case Protocol::kSparseCount: return "sparse_count";
    case Protocol::kSparseSum: return "sparse_sum";
    case Protocol::kNaiveHighDim: return "naive_highdim";
    case Protocol::kNaiveVec: return "naive_vec";
  }
  return "unknown";
}

// Identifies the analyzer sub-instance a message belongs to. Unused fields
// keep their defaults (subdomain_j = -1, dimension_k = 0, sign = kNone).
struct InstanceTag {
  Protocol protocol = Protocol::kBase;
  int32_t subdomain_j = -1;
  int32_t dimension_k = 0;
  Sign sign = Sign::kNone;

  friend auto operator<=>(const InstanceTag&, const InstanceTag&) = default;
  friend bool operator==(const InstanceTag&, const InstanceTag&) = default;

  std::string DebugString() const {
    std::string s = ProtocolName(protocol);
    s += "/j=" + std::to_string(subdomain_j);
    s += "/k=" + std::to_string(dimension_k);
    s += sign == Sign::kPlus ? "/+" : sign == Sign::kMinus ? "/-" : "";
    return s;
  }
};

struct InstanceTagHash {
  size_t operator()(const InstanceTag& t) const {
    uint64_t h = static_cast<uint64_t>(t.protocol);
    h = h * 0x9e3779b97f4a7c15ULL + static_cast<uint32_t>(t.subdomain_j);
    h = h * 0x9e3779b97f4a7c15ULL + static_cast<uint32_t>(t.dimension_k);
    h = h * 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(t.sign);
    return std::hash<uint64_t>{}(h ^ (h >> 29));
  }
};

struct Message {
  InstanceTag tag;
  int64_t payload = 0;

  friend auto operator<=>(const Message&, const Message&) = default;
  friend bool operator==(const Message&, const Message&) = default;
};

// Multiset semantics: order is meaningless once shuffled.
using MessageBag = std::vector<Message>;

struct CommStats {
  int64_t total_messages = 0;
  double messages_per_user = 0;
  int bits_per_message = 1;
  std::map<InstanceTag, int64_t> per_instance_counts;
};

}  // namespace shuffledp

#endif  // SHUFFLEDP_MESSAGE_H_
