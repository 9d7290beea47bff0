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

#ifndef SHUFFLEDP_CLI_H_
#define SHUFFLEDP_CLI_H_

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shuffledp/errors.h"
#include "shuffledp/experiment.h"

namespace shuffledp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDatasetError = 3;

namespace internal {

// Accepts "100000", "1e5" and "2^17".
inline int64_t ParsePositiveCount(const std::string& flag, const std::string& s) {
  double v = 0;
  const auto caret = s.find('^');
  if (caret != std::string::npos) {
    double base = 0;
    double exp = 0;
    if (!ParseNumber(s.substr(0, caret), &base) || !ParseNumber(s.substr(caret + 1), &exp)) {
      throw ConfigError(flag + ": cannot parse '" + s + "'");
    }
    v = std::pow(base, exp);
  } else if (!ParseNumber(s, &v)) {
    throw ConfigError(flag + ": cannot parse '" + s + "'");
  }
  if (v < 1 || v != std::floor(v) || v > 9.0e18) {
    throw ConfigError(flag + " must be a positive integer, got '" + s + "'");
  }
  return static_cast<int64_t>(v);
}

inline std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::map<std::string, double> ParseGenParams(const std::string& s) {
  std::map<std::string, double> out;
  for (const auto& kv : SplitList(s)) {
    const auto eq = kv.find('=');
    double v = 0;
    if (eq == std::string::npos || !ParseNumber(kv.substr(eq + 1), &v)) {
      throw ConfigError("--gen-params expects k=v pairs, got '" + kv + "'");
    }
    out[kv.substr(0, eq)] = v;
  }
  return out;
}

inline std::vector<double> ParseValues(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : SplitList(s)) {
    const auto caret = item.find('^');
    double v = 0;
    if (caret != std::string::npos) {
      v = static_cast<double>(ParsePositiveCount("--values", item));
    } else if (!ParseNumber(item, &v)) {
      throw ConfigError("--values: cannot parse '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--values is empty");
  return out;
}

}  // namespace internal

// Runs the benchmark and returns the process exit code.
inline int RunBenchCli(int argc, char** argv, std::ostream& out = std::cout,
                       std::ostream& err = std::cerr) {
  CLI::App app{"Shuffle-model DP summation benchmark"};
  std::string protocol = "sum";
  double epsilon = 1.0;
  double delta = 1e-12;
  double beta = 0.1;
  std::string n = "10000";
  std::string domain_u = "100000";
  std::string d = "64";
  std::string u_l2 = "1024";
  std::string generator = "gauss";
  std::string gen_params;
  std::string csv_path;
  std::string column = "0";
  int trials = 50;
  int trim = 10;
  uint64_t seed = 1;
  std::string sweep;
  std::string values;
  bool noiseless = false;
  std::string out_json;
  std::string out_csv;
  double flood_constant = 1.0;
  std::string engine = "aggregate";

  app.add_option("--protocol", protocol,
                 "base|sum|highdim|sparse|central_laplace|central_clip|naive_vec|"
                 "naive_highdim");
  app.add_option("--epsilon", epsilon);
  app.add_option("--delta", delta);
  app.add_option("--beta", beta);
  app.add_option("--n", n, "number of users (accepts 1e5, 2^17)");
  app.add_option("--U", domain_u, "scalar domain bound");
  app.add_option("--d", d, "dimension");
  app.add_option("--U-l2", u_l2, "l2 norm bound for vectors");
  app.add_option("--generator", generator, "zipf|gauss|constant|binary_sparse|spiky_vector");
  app.add_option("--gen-params", gen_params, "k=v,... e.g. a=1,b=3 or mu=50,sigma=50");
  app.add_option("--csv", csv_path, "read scalar values from a CSV file");
  app.add_option("--column", column, "CSV column index or header name");
  app.add_option("--trials", trials);
  app.add_option("--trim", trim);
  app.add_option("--seed", seed, "master seed; SHUFFLEDP_SEED overrides");
  app.add_option("--sweep", sweep, "n|U|sigma|epsilon");
  app.add_option("--values", values, "comma-separated sweep values");
  app.add_flag("--noiseless", noiseless, "disable all noise (testing)");
  app.add_option("--out-json", out_json);
  app.add_option("--out-csv", out_csv);
  app.add_option("--flood-constant", flood_constant, "flooding rate constant c_f");
  app.add_option("--engine", engine, "aggregate|message");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    ExperimentConfig config;
    config.protocol = ParseProtocolKind(protocol);
    config.budget = PrivacyBudget::Make(epsilon, delta, beta);
    config.generator.kind = ParseGeneratorKind(generator);
    config.generator.params = internal::ParseGenParams(gen_params);
    config.generator.n = internal::ParsePositiveCount("--n", n);
    config.generator.domain_U = internal::ParsePositiveCount("--U", domain_u);
    config.generator.d = internal::ParsePositiveCount("--d", d);
    config.generator.u_l2 = internal::ParsePositiveCount("--U-l2", u_l2);
    if (!csv_path.empty()) config.csv_path = csv_path;
    config.csv_column = column;
    config.trials = trials;
    config.trim = trim;
    config.master_seed = seed;
    if (const char* env = std::getenv("SHUFFLEDP_SEED"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (*end != '\0') throw ConfigError("SHUFFLEDP_SEED must be an unsigned integer");
      config.master_seed = v;
    }
    config.noiseless = noiseless;
    config.flood_constant = flood_constant;
    if (engine == "aggregate") {
      config.engine = EngineKind::kAggregate;
    } else if (engine == "message") {
      config.engine = EngineKind::kMessage;
    } else {
      throw ConfigError("unknown engine '" + engine + "'");
    }
    config.Validate();

    std::vector<ExperimentReport> reports;
    std::optional<SweepAxis> axis;
    if (!sweep.empty()) {
      axis = ParseSweepAxis(sweep);
      const std::vector<double> vals = internal::ParseValues(values);
      reports = Sweep(config, *axis, vals);
    } else {
      if (!values.empty()) throw ConfigError("--values needs --sweep");
      reports.push_back(RunExperiment(config));
    }

    if (!out_json.empty()) {
      std::ofstream f(out_json);
      if (!f) throw ConfigError("cannot write " + out_json);
      f << ReportsToJson(reports, axis).dump(2) << '\n';
    }
    if (!out_csv.empty()) {
      std::ofstream f(out_csv);
      if (!f) throw ConfigError("cannot write " + out_csv);
      WriteCsv(reports, f);
    }
    if (out_csv.empty()) WriteCsv(reports, out);
    for (const auto& r : reports) {
      err << ProtocolKindName(r.config.protocol) << " n=" << r.n
          << " max=" << FormatDouble(r.max_value)
          << (r.axis_value ? " axis=" + FormatDouble(*r.axis_value) : "")
          << " trimmed_error=" << FormatDouble(r.trimmed_mean_error)
          << " re%=" << FormatDouble(r.re_percent)
          << " msgs/user=" << FormatDouble(r.messages_per_user) << '\n';
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DatasetError& e) {
    err << "dataset error: " << e.what() << '\n';
    return kExitDatasetError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace shuffledp

#endif  // SHUFFLEDP_CLI_H_
