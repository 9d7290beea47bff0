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

#ifndef SHUFFLEDP_EXPERIMENT_H_
#define SHUFFLEDP_EXPERIMENT_H_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "shuffledp/base_sum.h"
#include "shuffledp/baselines.h"
#include "shuffledp/budget.h"
#include "shuffledp/dataset.h"
#include "shuffledp/errors.h"
#include "shuffledp/high_dim.h"
#include "shuffledp/rng.h"
#include "shuffledp/shuffler.h"
#include "shuffledp/sparse_vec.h"
#include "shuffledp/sum_dp.h"

namespace shuffledp {

enum class ProtocolKind {
  kBase,
  kSum,
  kHighDim,
  kSparse,
  kCentralLaplace,
  kCentralClip,
  kNaiveVec,
  kNaiveHighDim,
};

inline const char* ProtocolKindName(ProtocolKind p) {
  switch (p) {
    case ProtocolKind::kBase: return "base";
    case ProtocolKind::kSum: return "sum";
    case ProtocolKind::kHighDim: return "highdim";
    case ProtocolKind::kSparse: return "sparse";
    case ProtocolKind::kCentralLaplace: return "central_laplace";
    case ProtocolKind::kCentralClip: return "central_clip";
    case ProtocolKind::kNaiveVec: return "naive_vec";
    case ProtocolKind::kNaiveHighDim: return "naive_highdim";
  }
  return "unknown";
}

inline ProtocolKind ParseProtocolKind(const std::string& s) {
  for (ProtocolKind p :
       {ProtocolKind::kBase, ProtocolKind::kSum, ProtocolKind::kHighDim,
        ProtocolKind::kSparse, ProtocolKind::kCentralLaplace, ProtocolKind::kCentralClip,
        ProtocolKind::kNaiveVec, ProtocolKind::kNaiveHighDim}) {
    if (s == ProtocolKindName(p)) return p;
  }
  throw ConfigError("unknown protocol '" + s + "'");
}

enum class SweepAxis { kN, kU, kSigma, kEpsilon };

inline SweepAxis ParseSweepAxis(const std::string& s) {
  if (s == "n") return SweepAxis::kN;
  if (s == "U") return SweepAxis::kU;
  if (s == "sigma") return SweepAxis::kSigma;
  if (s == "epsilon") return SweepAxis::kEpsilon;
  throw ConfigError("unknown sweep axis '" + s + "'");
}

inline const char* SweepAxisName(SweepAxis a) {
  switch (a) {
    case SweepAxis::kN: return "n";
    case SweepAxis::kU: return "U";
    case SweepAxis::kSigma: return "sigma";
    case SweepAxis::kEpsilon: return "epsilon";
  }
  return "unknown";
}

struct ExperimentConfig {
  ProtocolKind protocol = ProtocolKind::kSum;
  PrivacyBudget budget{1.0, 1e-12, 0.1};
  GeneratorSpec generator;
  std::optional<std::string> csv_path;
  std::string csv_column = "0";
  int trials = 50;
  int trim = 10;
  uint64_t master_seed = 1;
  bool noiseless = false;
  double flood_constant = 1.0;
  EngineKind engine = EngineKind::kAggregate;

  bool VectorProtocol() const {
    return protocol == ProtocolKind::kHighDim || protocol == ProtocolKind::kNaiveHighDim;
  }
  bool BinaryProtocol() const {
    return protocol == ProtocolKind::kSparse || protocol == ProtocolKind::kNaiveVec;
  }

  void Validate() const {
    budget.Validate();
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (trim < 0 || trials <= 2 * trim) throw ConfigError("need trials > 2 * trim");
    if (flood_constant < 0) throw ConfigError("flood constant must be >= 0");
    if (csv_path && (VectorProtocol() || BinaryProtocol())) {
      throw ConfigError("CSV ingest provides scalar data only");
    }
    if (!csv_path) {
      if (VectorProtocol() && generator.kind != GeneratorKind::kSpikyVector) {
        throw ConfigError("protocol needs the spiky_vector generator");
      }
      if (BinaryProtocol() && generator.kind != GeneratorKind::kBinarySparse) {
        throw ConfigError("protocol needs the binary_sparse generator");
      }
      if (!VectorProtocol() && !BinaryProtocol() && !generator.IsScalar()) {
        throw ConfigError("scalar protocol needs a scalar generator");
      }
    }
  }
};

struct TrialReport {
  int trial = 0;
  std::vector<double> estimate;
  double error = 0;           // |.| for scalars, l2 or l-infinity for vectors
  double relative_error = 0;  // error / |truth|
  double l2_error = 0;
  double linf_error = 0;
  int64_t tau = -1;  // scalar threshold protocols only
  double messages_per_user = 0;
  int bits_per_message = 0;
  double wall_ms = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::optional<double> axis_value;
  int64_t n = 0;
  double max_value = 0;  // Max(D), Max_l2(D) or Max_l1(D)
  std::vector<double> truth;
  double truth_norm = 0;
  std::vector<TrialReport> trials;
  int retained = 0;
  double trimmed_mean_error = 0;
  double re_percent = 0;
  double messages_per_user = 0;
  int bits_per_message = 0;
};

// Mean after dropping the `trim` largest and `trim` smallest values.
inline double TrimmedMean(std::vector<double> values, int trim) {
  if (trim < 0 || static_cast<int>(values.size()) <= 2 * trim) {
    throw ConfigError("need more values than 2 * trim");
  }
  std::sort(values.begin(), values.end());
  double s = 0;
  for (size_t i = trim; i < values.size() - trim; ++i) s += values[i];
  return s / static_cast<double>(values.size() - 2 * trim);
}

inline double L2Distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double LinfDistance(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Dataset LoadDataset(const ExperimentConfig& config) {
  if (config.csv_path) {
    return IngestCsv(*config.csv_path, config.csv_column, config.generator.domain_U);
  }
  return Generate(config.generator, RngSeed(config.master_seed).Derive("dataset"));
}

namespace internal {

inline void FillErrors(const ExperimentConfig& config, std::span<const double> truth,
                       double truth_norm, TrialReport& t) {
  t.l2_error = L2Distance(t.estimate, truth);
  t.linf_error = LinfDistance(t.estimate, truth);
  if (config.VectorProtocol()) {
    t.error = t.l2_error;
  } else {
    t.error = t.linf_error;  // also |estimate - truth| for scalars
  }
  t.relative_error = truth_norm > 0 ? t.error / truth_norm : 0;
}

inline void FillComm(const CommStats& stats, TrialReport& t) {
  t.messages_per_user = stats.messages_per_user;
  t.bits_per_message = stats.bits_per_message;
}

inline TrialReport RunScalarTrial(const ExperimentConfig& config, const ScalarDataset& ds,
                                  const RngSeed& seed) {
  TrialReport t;
  const int64_t padded = NextPowerOfTwo(ds.domain_U);
  std::span<const int64_t> values(ds.values);
  Engine gen = seed.Derive("central").MakeEngine();
  switch (config.protocol) {
    case ProtocolKind::kBase: {
      BaseParams p;
      p.epsilon = config.budget.epsilon;
      p.delta = config.budget.delta;
      p.n = ds.n();
      p.domain_U = ds.domain_U;
      p.noiseless_mode = config.noiseless;
      p.flood_constant = config.flood_constant;
      const BaseSumDp protocol(p);
      const InstanceRound r = Simulate(protocol, values, seed, config.engine);
      t.estimate = {protocol.Analyze(r.sums)};
      FillComm(r.stats, t);
      break;
    }
    case ProtocolKind::kSum: {
      SumParams p;
      p.budget = config.budget;
      p.n = ds.n();
      p.domain_U = padded;
      p.noiseless_mode = config.noiseless;
      p.flood_constant = config.flood_constant;
      const SumDp protocol(p);
      const InstanceRound r = Simulate(protocol, values, seed, config.engine);
      const SumResult res = protocol.Analyze(r.sums);
      t.estimate = {res.estimate};
      t.tau = res.decision.tau;
      FillComm(r.stats, t);
      break;
    }
    case ProtocolKind::kCentralLaplace:
      t.estimate = {CentralLaplace(values, ds.domain_U, config.budget.epsilon, gen,
                                   config.noiseless)};
      break;
    case ProtocolKind::kCentralClip:
      t.estimate = {CentralClippingReference(values, config.budget.epsilon, gen,
                                             config.noiseless)};
      break;
    default:
      throw ConfigError("protocol does not take scalar data");
  }
  return t;
}

inline HighDimParams MakeHighDimParams(const ExperimentConfig& config,
                                       const VectorDataset& ds) {
  HighDimParams p;
  p.budget = config.budget;
  p.n = ds.n();
  p.d = ds.d;
  p.u_l2 = ds.u_l2;
  p.noiseless_mode = config.noiseless;
  p.flood_constant = config.flood_constant;
  return p;
}

inline SparseParams MakeSparseParams(const ExperimentConfig& config,
                                     const BinaryDataset& ds) {
  SparseParams p;
  p.budget = config.budget;
  p.n = ds.n();
  p.d = ds.d;
  p.noiseless_mode = config.noiseless;
  p.flood_constant = config.flood_constant;
  return p;
}

}  // namespace internal

inline ExperimentReport RunExperiment(const ExperimentConfig& config) {
  config.Validate();
  ExperimentReport report;
  report.config = config;
  const Dataset dataset = LoadDataset(config);
  const RngSeed trial_root = RngSeed(config.master_seed).Derive("trial");

  // Protocol objects that do not depend on per-trial randomness.
  std::optional<SparVecSumDp> sparse;
  std::optional<NaiveVecSumDp> naive_vec;
  std::optional<NaiveHighDimSumDp> naive_highdim;

  if (const auto* ds = std::get_if<ScalarDataset>(&dataset)) {
    report.n = ds->n();
    report.truth = {static_cast<double>(ds->Sum())};
    report.max_value = static_cast<double>(ds->Max());
  } else if (const auto* ds = std::get_if<VectorDataset>(&dataset)) {
    report.n = ds->n();
    report.truth = ds->Sum();
    report.max_value = ds->MaxL2();
    if (config.protocol == ProtocolKind::kNaiveHighDim) {
      naive_highdim.emplace(internal::MakeHighDimParams(config, *ds));
    }
  } else if (const auto* ds = std::get_if<BinaryDataset>(&dataset)) {
    report.n = ds->n();
    report.truth = ds->Sum();
    report.max_value = static_cast<double>(ds->MaxL1());
    if (config.protocol == ProtocolKind::kSparse) {
      sparse.emplace(internal::MakeSparseParams(config, *ds));
    } else {
      naive_vec.emplace(internal::MakeSparseParams(config, *ds));
    }
  }
  if (config.VectorProtocol()) {
    double s = 0;
    for (double v : report.truth) s += v * v;
    report.truth_norm = std::sqrt(s);
  } else {
    for (double v : report.truth) report.truth_norm = std::max(report.truth_norm, std::abs(v));
  }

  for (int trial = 0; trial < config.trials; ++trial) {
    const RngSeed seed = trial_root.Derive(static_cast<uint64_t>(trial));
    const auto start = std::chrono::steady_clock::now();
    TrialReport t;
    if (const auto* ds = std::get_if<ScalarDataset>(&dataset)) {
      t = internal::RunScalarTrial(config, *ds, seed);
    } else if (const auto* ds = std::get_if<VectorDataset>(&dataset)) {
      const std::span<const std::vector<int64_t>> data(ds->vectors);
      HighDimResult res;
      InstanceRound r;
      if (config.protocol == ProtocolKind::kHighDim) {
        const HighDimSumDp protocol(internal::MakeHighDimParams(config, *ds),
                                    BuildRotation(ds->d, seed.Derive("rotation")));
        r = Simulate(protocol, data, seed, config.engine);
        res = protocol.Analyze(r.sums);
      } else {
        r = Simulate(*naive_highdim, data, seed, config.engine);
        res = naive_highdim->Analyze(r.sums);
      }
      t.estimate = std::move(res.estimate);
      internal::FillComm(r.stats, t);
    } else if (const auto* ds = std::get_if<BinaryDataset>(&dataset)) {
      const std::span<const std::vector<int32_t>> data(ds->supports);
      if (sparse) {
        const InstanceRound r = Simulate(*sparse, data, seed, config.engine);
        SparseResult res = sparse->Analyze(r.sums);
        t.estimate = std::move(res.estimate);
        t.tau = res.decision.tau;
        internal::FillComm(r.stats, t);
      } else {
        const InstanceRound r = Simulate(*naive_vec, data, seed, config.engine);
        t.estimate = naive_vec->Analyze(r.sums);
        internal::FillComm(r.stats, t);
      }
    }
    t.trial = trial;
    internal::FillErrors(config, report.truth, report.truth_norm, t);
    t.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    report.trials.push_back(std::move(t));
  }

  std::vector<double> errors;
  double msgs = 0;
  for (const auto& t : report.trials) {
    errors.push_back(t.error);
    msgs += t.messages_per_user;
    report.bits_per_message = std::max(report.bits_per_message, t.bits_per_message);
  }
  report.retained = config.trials - 2 * config.trim;
  report.trimmed_mean_error = TrimmedMean(errors, config.trim);
  report.re_percent =
      report.truth_norm > 0 ? 100.0 * report.trimmed_mean_error / report.truth_norm : 0;
  report.messages_per_user = msgs / static_cast<double>(config.trials);
  return report;
}

inline ExperimentConfig ApplyAxis(ExperimentConfig config, SweepAxis axis, double value) {
  const auto as_int = [&](const char* what) {
    if (value < 1 || value != std::floor(value)) {
      throw ConfigError(std::string(what) + " values must be positive integers");
    }
    return static_cast<int64_t>(value);
  };
  switch (axis) {
    case SweepAxis::kN:
      if (config.csv_path) throw ConfigError("cannot sweep n over a CSV dataset");
      config.generator.n = as_int("n");
      break;
    case SweepAxis::kU:
      if (config.VectorProtocol()) {
        config.generator.u_l2 = as_int("U");
      } else {
        config.generator.domain_U = as_int("U");
      }
      break;
    case SweepAxis::kSigma:
      if (config.csv_path || config.generator.kind != GeneratorKind::kGauss) {
        throw ConfigError("sigma sweeps need the gauss generator");
      }
      config.generator.params["sigma"] = value;
      break;
    case SweepAxis::kEpsilon:
      config.budget.epsilon = value;
      break;
  }
  return config;
}

// One report per value; every point reuses the same master seed.
inline std::vector<ExperimentReport> Sweep(const ExperimentConfig& config, SweepAxis axis,
                                           std::span<const double> values) {
  std::vector<ExperimentReport> out;
  for (double v : values) {
    ExperimentReport r = RunExperiment(ApplyAxis(config, axis, v));
    r.axis_value = v;
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline void WriteCsv(std::span<const ExperimentReport> reports, std::ostream& out) {
  out << "axis_value,protocol,trimmed_mean_error,re_percent,messages_per_user,"
         "bits_per_message\n";
  for (const auto& r : reports) {
    out << (r.axis_value ? FormatDouble(*r.axis_value) : "") << ','
        << ProtocolKindName(r.config.protocol) << ',' << FormatDouble(r.trimmed_mean_error)
        << ',' << FormatDouble(r.re_percent) << ',' << FormatDouble(r.messages_per_user)
        << ',' << r.bits_per_message << '\n';
  }
}

inline nlohmann::json ConfigToJson(const ExperimentConfig& c) {
  nlohmann::json j;
  j["protocol"] = ProtocolKindName(c.protocol);
  j["epsilon"] = c.budget.epsilon;
  j["delta"] = c.budget.delta;
  j["beta"] = c.budget.beta;
  j["trials"] = c.trials;
  j["trim"] = c.trim;
  j["seed"] = c.master_seed;
  j["noiseless"] = c.noiseless;
  j["flood_constant"] = c.flood_constant;
  j["engine"] = c.engine == EngineKind::kAggregate ? "aggregate" : "message";
  if (c.csv_path) {
    j["dataset"] = {{"csv", *c.csv_path}, {"column", c.csv_column},
                    {"U", c.generator.domain_U}};
  } else {
    j["dataset"] = {{"generator", GeneratorName(c.generator.kind)},
                    {"params", c.generator.params},
                    {"n", c.generator.n},
                    {"U", c.generator.domain_U},
                    {"d", c.generator.d},
                    {"U_l2", c.generator.u_l2}};
  }
  return j;
}

inline nlohmann::json ReportToJson(const ExperimentReport& r) {
  nlohmann::json j;
  j["config"] = ConfigToJson(r.config);
  if (r.axis_value) j["axis_value"] = *r.axis_value;
  j["n"] = r.n;
  j["max_value"] = r.max_value;
  j["truth_norm"] = r.truth_norm;
  if (r.truth.size() == 1) j["true_sum"] = r.truth[0];
  j["aggregate"] = {{"retained", r.retained},
                    {"trimmed_mean_error", r.trimmed_mean_error},
                    {"re_percent", r.re_percent},
                    {"messages_per_user", r.messages_per_user},
                    {"bits_per_message", r.bits_per_message}};
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    nlohmann::json tj;
    tj["trial"] = t.trial;
    if (t.estimate.size() == 1) {
      tj["estimate"] = t.estimate[0];
    } else {
      tj["estimate"] = t.estimate;
    }
    tj["error"] = t.error;
    tj["relative_error"] = t.relative_error;
    tj["l2_error"] = t.l2_error;
    tj["linf_error"] = t.linf_error;
    if (t.tau >= 0) tj["tau"] = t.tau;
    tj["messages_per_user"] = t.messages_per_user;
    tj["bits_per_message"] = t.bits_per_message;
    tj["wall_ms"] = t.wall_ms;
    trials.push_back(std::move(tj));
  }
  j["trials"] = std::move(trials);
  return j;
}

inline nlohmann::json ReportsToJson(std::span<const ExperimentReport> reports,
                                    std::optional<SweepAxis> axis) {
  nlohmann::json j;
  if (axis) j["sweep_axis"] = SweepAxisName(*axis);
  j["reports"] = nlohmann::json::array();
  for (const auto& r : reports) j["reports"].push_back(ReportToJson(r));
  return j;
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_EXPERIMENT_H_
