// Copyright 2026 The sqrl-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/// \file cli.hpp
/// Command-line front end of sqrl_sim: argument parsing, the CSV/JSON
/// writers and the command dispatcher. Data files never carry timestamps;
/// run metadata goes to a `<output>.meta.json` sidecar.

#include "sqrl/engine.hpp"
#include "sqrl/harness.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

enum class Command { Run, Batch, Compare, Qst };
enum class OutputFormat { Csv, Json };

struct CliConfig {
  Command command = Command::Run;
  std::string env_preset = "e1";  ///< "e1", "e2", "e3" or "custom"
  double theta = 0.0;
  double phi = 0.0;
  std::vector<double> epsilons = {0.8};
  int iterations = 50;
  int runs = 20;
  std::uint64_t seed = 0;
  double delta_init = kTwoPi;
  double noise_p = 0.0;
  int qst_every = 3;
  double delta_f = 0.02;
  bool physical = false;
  bool golden = false;
  std::string output = "-";  ///< "-" is stdout
  OutputFormat format = OutputFormat::Csv;

  bool operator==(const CliConfig&) const = default;
};

/// Thrown for anything the user has to fix on the command line. exit_code is
/// 2, or 0 when help was requested.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& message, int exit_code = kExitUsage)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

/// Named target states: e1 = (pi/2, 0), e2 = (pi/2, pi/4),
/// e3 = (2 arccos 0.948, 0.890). Returns {theta, phi}.
std::optional<std::pair<double, double>> preset_angles(const std::string& name);

/// argv[0] is the program name. Throws UsageError.
CliConfig parse_args(int argc, const char* const* argv);
CliConfig parse_args(const std::vector<std::string>& args);

nlohmann::json config_to_json(const CliConfig& config);
CliConfig config_from_json(const nlohmann::json& j);

EpisodeConfig episode_config(const CliConfig& config);
BatchConfig batch_config(const CliConfig& config);

/// Thread cap from SQRL_SIM_THREADS (0 when unset or unparsable).
unsigned threads_from_env();

/// Twelve significant digits, '.' decimal point regardless of locale.
std::string format_number(double value);

struct TrajectoryRow {
  int run_id = 0;
  int k = 0;
  int m = 0;
  std::optional<double> theta;
  std::optional<double> phi;
  double delta = 0.0;
  double fidelity = 0.0;
};

std::vector<TrajectoryRow> trajectory_rows(int run_id, const std::vector<StepRecord>& records);

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRow>& rows, OutputFormat format);
void write_aggregate(std::ostream& out, const AggregateCurve& curve, std::span<const int> ks,
                     OutputFormat format);
void write_comparison(std::ostream& out, const ComparisonTable& table, OutputFormat format);

/// File variants; throw std::runtime_error when the file cannot be written.
void emit_trajectory(const std::vector<TrajectoryRow>& rows, OutputFormat format, const std::string& path);
void emit_comparison(const ComparisonTable& table, OutputFormat format, const std::string& path);

/// Output path used when a command writes one file per epsilon: "out.csv" -> "out_eps0.65.csv".
std::string per_epsilon_path(const std::string& path, double epsilon);

/// Executes the command, writing data to config.output (or `out` for "-").
/// Returns the process exit code.
int run_command(const CliConfig& config, std::ostream& out);

/// Full main(): parse, run, map errors to exit codes.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sqrl::cli
