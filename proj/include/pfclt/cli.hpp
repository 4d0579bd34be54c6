/*
 * Copyright 2026 The pfclt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pfclt/discretize.hpp"
#include "pfclt/kernels.hpp"

namespace pfclt::cli {

inline constexpr const char* kArtifactVersion = "0.1.0";

enum class Command { CorrelationEval, VarianceScan, CumulantScan, FrcpCheck, McClt };
enum class Format { Csv, Json };

std::string to_string(Command c);

struct RunConfig {
  Command command = Command::VarianceScan;
  KernelVariant kernel = KernelVariant::Sine4;
  std::vector<double> Ls;
  double grid_density = kDefaultDensity;
  int n_max = 5;
  int k_max = 4;
  std::uint64_t seed = 20260101;
  int samples = 10000;
  int matrix_size = 2000;
  int nodes = 1024;
  std::optional<StepFunction> step;
  std::vector<std::vector<double>> point_sets;
  std::string out;
  Format format = Format::Csv;

  /// Throws ValidationError on an inconsistent configuration.
  void validate() const;
};

/// Default L list of a command when --L is not given.
std::vector<double> default_Ls(Command c);

using Cell = std::variant<double, long long, std::string>;

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Check> checks;

  bool all_pass() const;
};

/// One point set per non-empty line, values separated by commas or
/// whitespace; '#' starts a comment. Throws ParseError with the line number.
std::vector<std::vector<double>> parse_points(std::istream& in);

Table cmd_correlation_eval(const RunConfig& config);
Table cmd_variance_scan(const RunConfig& config);
Table cmd_cumulant_scan(const RunConfig& config);
Table cmd_frcp_check(const RunConfig& config);
Table cmd_mc_clt(const RunConfig& config);
Table run_command(const RunConfig& config);

/// ISO-8601 UTC timestamp of the current time.
std::string timestamp_now();
void write_csv(const Table& t, std::ostream& out, const std::string& timestamp);
void write_json(const Table& t, std::ostream& out, const std::string& timestamp);

/// Full command-line entry point. Returns 0 iff every check passed, 1 when
/// a check failed and 2 on usage or input errors.
int run(int argc, char** argv);

}  // namespace pfclt::cli
