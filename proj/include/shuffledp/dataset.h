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

#ifndef SHUFFLEDP_DATASET_H_
#define SHUFFLEDP_DATASET_H_

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "shuffledp/errors.h"
#include "shuffledp/rng.h"

namespace shuffledp {

struct ScalarDataset {
  std::vector<int64_t> values;
  int64_t domain_U = 1;
  int64_t clamped = 0;  // ingest only
  int64_t skipped = 0;  // ingest only

  int64_t n() const { return static_cast<int64_t>(values.size()); }
  int64_t Sum() const {
    int64_t s = 0;
    for (int64_t v : values) s += v;
    return s;
  }
  int64_t Max() const {
    int64_t m = 0;
    for (int64_t v : values) m = std::max(m, v);
    return m;
  }
};

struct VectorDataset {
  std::vector<std::vector<int64_t>> vectors;
  int64_t d = 1;
  int64_t u_l2 = 1;

  int64_t n() const { return static_cast<int64_t>(vectors.size()); }
  std::vector<double> Sum() const {
    std::vector<double> s(static_cast<size_t>(d), 0.0);
    for (const auto& v : vectors) {
      for (size_t k = 0; k < v.size(); ++k) s[k] += static_cast<double>(v[k]);
    }
    return s;
  }
  double MaxL2() const {
    double m = 0;
    for (const auto& v : vectors) {
      double s = 0;
      for (int64_t x : v) s += static_cast<double>(x) * static_cast<double>(x);
      m = std::max(m, std::sqrt(s));
    }
    return m;
  }
};

// Binary vectors stored as sorted supports.
struct BinaryDataset {
  std::vector<std::vector<int32_t>> supports;
  int64_t d = 1;

  int64_t n() const { return static_cast<int64_t>(supports.size()); }
  std::vector<double> Sum() const {
    std::vector<double> s(static_cast<size_t>(d), 0.0);
    for (const auto& v : supports) {
      for (int32_t k : v) s[k] += 1.0;
    }
    return s;
  }
  int64_t MaxL1() const {
    size_t m = 0;
    for (const auto& v : supports) m = std::max(m, v.size());
    return static_cast<int64_t>(m);
  }
};

using Dataset = std::variant<ScalarDataset, VectorDataset, BinaryDataset>;

enum class GeneratorKind { kZipf, kGauss, kBinarySparse, kConstant, kSpikyVector };

inline const char* GeneratorName(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::kZipf: return "zipf";
    case GeneratorKind::kGauss: return "gauss";
    case GeneratorKind::kBinarySparse: return "binary_sparse";
    case GeneratorKind::kConstant: return "constant";
    case GeneratorKind::kSpikyVector: return "spiky_vector";
  }
  return "unknown";
}

inline GeneratorKind ParseGeneratorKind(const std::string& s) {
  for (GeneratorKind k : {GeneratorKind::kZipf, GeneratorKind::kGauss,
                          GeneratorKind::kBinarySparse, GeneratorKind::kConstant,
                          GeneratorKind::kSpikyVector}) {
    if (s == GeneratorName(k)) return k;
  }
  throw ConfigError("unknown generator '" + s + "'");
}

// Parameters by kind (defaults in parentheses):
//   zipf a (1), b (3); gauss mu (50), sigma (50); constant value (1);
//   binary_sparse min_l1 (1), max_l1 (4), skew (1.1);
//   spiky_vector min_value (1), max_value (16).
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kGauss;
  std::map<std::string, double> params;
  int64_t n = 10000;
  int64_t domain_U = 100000;
  int64_t d = 64;
  int64_t u_l2 = 1024;

  double Param(const std::string& name, double fallback) const {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
  }

  bool IsScalar() const {
    return kind == GeneratorKind::kZipf || kind == GeneratorKind::kGauss ||
           kind == GeneratorKind::kConstant;
  }
};

// Inverse-CDF sampler for pmf(x) proportional to (x + a)^{-b} on {1..U}. The
// first 2^20 values are tabulated; beyond that a continuous power-law tail
// stands in for the remaining mass.
class ZipfSampler {
 public:
  ZipfSampler(double a, double b, int64_t domain_U) : a_(a), b_(b), u_(domain_U) {
    if (!(b > 0) || !(a > -1) || domain_U < 1) {
      throw ConfigError("zipf needs b > 0, a > -1, U >= 1");
    }
    head_ = std::min<int64_t>(domain_U, int64_t{1} << 20);
    cdf_.reserve(static_cast<size_t>(head_));
    double acc = 0;
    for (int64_t x = 1; x <= head_; ++x) {
      acc += std::pow(static_cast<double>(x) + a, -b);
      cdf_.push_back(acc);
    }
    tail_ = head_ < u_ ? TailIntegral(static_cast<double>(head_) + 0.5,
                                      static_cast<double>(u_) + 0.5)
                       : 0.0;
    total_ = acc + tail_;
  }

  double Pmf(int64_t x) const {
    if (x < 1 || x > u_) return 0;
    return std::pow(static_cast<double>(x) + a_, -b_) / total_;
  }

  // P(X > x).
  double Survival(int64_t x) const {
    if (x < 1) return 1;
    if (x >= u_) return 0;
    if (x < head_) return (cdf_.back() - cdf_[x - 1] + tail_) / total_;
    return TailIntegral(static_cast<double>(x) + 0.5, static_cast<double>(u_) + 0.5) /
           total_;
  }

  template <class URBG>
  int64_t operator()(URBG& gen) const {
    const double r = std::generate_canonical<double, 53>(gen) * total_;
    if (r < cdf_.back() || tail_ == 0) {
      auto it = std::upper_bound(cdf_.begin(), cdf_.end(), r);
      return std::min<int64_t>(static_cast<int64_t>(it - cdf_.begin()) + 1, head_);
    }
    // Invert the tail integral from head + 0.5.
    const double lo = static_cast<double>(head_) + 0.5 + a_;
    const double target = r - cdf_.back();
    double y;
    if (std::abs(b_ - 1.0) < 1e-12) {
      y = lo * std::exp(target);
    } else {
      y = std::pow(std::pow(lo, 1.0 - b_) + target * (1.0 - b_), 1.0 / (1.0 - b_));
    }
    const int64_t x = static_cast<int64_t>(std::llround(y - a_));
    return std::clamp<int64_t>(x, head_ + 1, u_);
  }

 private:
  double TailIntegral(double from, double to) const {
    const double f = from + a_;
    const double t = to + a_;
    if (std::abs(b_ - 1.0) < 1e-12) return std::log(t / f);
    return (std::pow(t, 1.0 - b_) - std::pow(f, 1.0 - b_)) / (1.0 - b_);
  }

  double a_, b_;
  int64_t u_;
  int64_t head_ = 0;
  std::vector<double> cdf_;
  double tail_ = 0;
  double total_ = 0;
};

inline ScalarDataset GenerateScalar(const GeneratorSpec& spec, const RngSeed& seed) {
  if (spec.n < 1 || spec.domain_U < 1) throw ConfigError("n and U must be >= 1");
  ScalarDataset ds;
  ds.domain_U = spec.domain_U;
  ds.values.reserve(static_cast<size_t>(spec.n));
  Engine gen = seed.MakeEngine();
  switch (spec.kind) {
    case GeneratorKind::kConstant: {
      const double v = spec.Param("value", 1);
      if (v < 0 || v > static_cast<double>(spec.domain_U) || v != std::floor(v)) {
        throw ConfigError("constant value must be an integer in [0, U]");
      }
      ds.values.assign(static_cast<size_t>(spec.n), static_cast<int64_t>(v));
      break;
    }
    case GeneratorKind::kGauss: {
      const double sigma = spec.Param("sigma", 50);
      if (!(sigma >= 0)) throw ConfigError("gauss sigma must be >= 0");
      std::normal_distribution<double> normal(spec.Param("mu", 50), sigma);
      for (int64_t i = 0; i < spec.n; ++i) {
        const double x = std::round(sigma == 0 ? spec.Param("mu", 50) : normal(gen));
        ds.values.push_back(static_cast<int64_t>(
            std::clamp(x, 0.0, static_cast<double>(spec.domain_U))));
      }
      break;
    }
    case GeneratorKind::kZipf: {
      const ZipfSampler zipf(spec.Param("a", 1), spec.Param("b", 3), spec.domain_U);
      for (int64_t i = 0; i < spec.n; ++i) ds.values.push_back(zipf(gen));
      break;
    }
    default:
      throw ConfigError(std::string("generator ") + GeneratorName(spec.kind) +
                        " does not produce scalars");
  }
  return ds;
}

// One nonzero coordinate per user, uniform position, value uniform in
// [min_value, max_value].
inline VectorDataset GenerateVectors(const GeneratorSpec& spec, const RngSeed& seed) {
  if (spec.kind != GeneratorKind::kSpikyVector) {
    throw ConfigError("vector protocols need the spiky_vector generator");
  }
  const auto lo = static_cast<int64_t>(spec.Param("min_value", 1));
  const auto hi = static_cast<int64_t>(spec.Param("max_value", 16));
  if (spec.n < 1 || spec.d < 1 || lo < 0 || hi < lo || hi > spec.u_l2) {
    throw ConfigError("spiky_vector needs 0 <= min_value <= max_value <= U_l2");
  }
  VectorDataset ds;
  ds.d = spec.d;
  ds.u_l2 = spec.u_l2;
  Engine gen = seed.MakeEngine();
  std::uniform_int_distribution<int64_t> coord(0, spec.d - 1);
  std::uniform_int_distribution<int64_t> value(lo, hi);
  for (int64_t i = 0; i < spec.n; ++i) {
    std::vector<int64_t> v(static_cast<size_t>(spec.d), 0);
    const int64_t k = coord(gen);
    v[k] = value(gen);
    ds.vectors.push_back(std::move(v));
  }
  return ds;
}

// ||x||_1 uniform in [min_l1, max_l1]; coordinates drawn without replacement
// with popularity proportional to (k + 1)^{-skew}.
inline BinaryDataset GenerateBinary(const GeneratorSpec& spec, const RngSeed& seed) {
  if (spec.kind != GeneratorKind::kBinarySparse) {
    throw ConfigError("sparse protocols need the binary_sparse generator");
  }
  const auto lo = static_cast<int64_t>(spec.Param("min_l1", 1));
  const auto hi = static_cast<int64_t>(spec.Param("max_l1", 4));
  const double skew = spec.Param("skew", 1.1);
  if (spec.n < 1 || spec.d < 1 || lo < 0 || hi < lo || hi > spec.d || skew < 0) {
    throw ConfigError("binary_sparse needs 0 <= min_l1 <= max_l1 <= d, skew >= 0");
  }
  std::vector<double> weights;
  for (int64_t k = 0; k < spec.d; ++k) {
    weights.push_back(std::pow(static_cast<double>(k + 1), -skew));
  }
  std::discrete_distribution<int32_t> popular(weights.begin(), weights.end());
  std::uniform_int_distribution<int64_t> norm(lo, hi);
  std::uniform_int_distribution<int32_t> any(0, static_cast<int32_t>(spec.d - 1));
  BinaryDataset ds;
  ds.d = spec.d;
  Engine gen = seed.MakeEngine();
  for (int64_t i = 0; i < spec.n; ++i) {
    const int64_t ones = norm(gen);
    std::vector<int32_t> s;
    int attempts = 0;
    while (static_cast<int64_t>(s.size()) < ones) {
      // Fall back to uniform picks if the popular head keeps colliding.
      const int32_t k = attempts++ < 64 ? popular(gen) : any(gen);
      if (std::find(s.begin(), s.end(), k) == s.end()) s.push_back(k);
    }
    std::sort(s.begin(), s.end());
    ds.supports.push_back(std::move(s));
  }
  return ds;
}

inline Dataset Generate(const GeneratorSpec& spec, const RngSeed& seed) {
  switch (spec.kind) {
    case GeneratorKind::kSpikyVector: return GenerateVectors(spec, seed);
    case GeneratorKind::kBinarySparse: return GenerateBinary(spec, seed);
    default: return GenerateScalar(spec, seed);
  }
}

namespace internal {

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return fields;
}

inline bool ParseNumber(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno != 0 || !std::isfinite(v)) return false;
  *out = v;
  return true;
}

}  // namespace internal

// Reads one numeric column. `column` is a 0-based index or a header name.
// Values are rounded, clamped to [0, U] (counted in `clamped`); rows whose
// field is missing or non-numeric are skipped (counted in `skipped`).
inline ScalarDataset IngestCsv(const std::string& path, const std::string& column,
                               int64_t domain_U) {
  if (domain_U < 1) throw ConfigError("U must be >= 1");
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot read " + path);

  double as_index = 0;
  const bool by_index = internal::ParseNumber(column, &as_index) && as_index >= 0 &&
                        as_index == std::floor(as_index);
  size_t col = by_index ? static_cast<size_t>(as_index) : 0;

  ScalarDataset ds;
  ds.domain_U = domain_U;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = internal::SplitCsvLine(line);
    if (first) {
      first = false;
      if (!by_index) {
        auto it = std::find(fields.begin(), fields.end(), column);
        if (it == fields.end()) throw DatasetError("no column named '" + column + "'");
        col = static_cast<size_t>(it - fields.begin());
        continue;
      }
      double probe;
      if (col < fields.size() && !internal::ParseNumber(fields[col], &probe)) continue;
    }
    double v;
    if (col >= fields.size() || !internal::ParseNumber(fields[col], &v)) {
      ++ds.skipped;
      continue;
    }
    double r = std::round(v);
    if (r < 0 || r > static_cast<double>(domain_U)) {
      ++ds.clamped;
      r = std::clamp(r, 0.0, static_cast<double>(domain_U));
    }
    ds.values.push_back(static_cast<int64_t>(r));
  }
  if (ds.values.empty()) throw DatasetError("no numeric rows in " + path);
  return ds;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_DATASET_H_
