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

#include "sqrl/cli.hpp"

#include "sqrl/tomography.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

namespace sqrl::cli {

namespace {

constexpr const char* kToolVersion = "1.0.0";

using json = nlohmann::json;

const char* command_name(Command c) {
  switch (c) {
    case Command::Run:
      return "run";
    case Command::Batch:
      return "batch";
    case Command::Compare:
      return "compare";
    case Command::Qst:
      return "qst";
  }
  return "?";
}

Command command_from_name(const std::string& name) {
  if (name == "run") return Command::Run;
  if (name == "batch") return Command::Batch;
  if (name == "compare") return Command::Compare;
  if (name == "qst") return Command::Qst;
  throw std::invalid_argument("unknown command: " + name);
}

// JSON numbers carry the same 12 significant digits as the CSV.
double rounded(double value) { return std::strtod(format_number(value).c_str(), nullptr); }

json optional_number(const std::optional<double>& v) {
  return v ? json(rounded(*v)) : json(nullptr);
}

std::string optional_field(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

SeedScheme seed_scheme(const CliConfig& config) {
  return config.golden ? SeedScheme::V1 : kCurrentSeedScheme;
}

// Writes through `writer` to stdout ("-") or to a file.
void write_to(const std::string& path, std::ostream& out,
              const std::function<void(std::ostream&)>& writer) {
  if (path == "-") {
    writer(out);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open output file " + path);
  writer(file);
  file.flush();
  if (!file) throw std::runtime_error("failed writing output file " + path);
}

std::vector<int> budget_steps(int qst_every, int iterations) {
  std::vector<int> ks;
  for (int k = qst_every; k <= iterations; k += qst_every) ks.push_back(k);
  return ks;
}

std::vector<int> all_steps(int iterations) {
  std::vector<int> ks(static_cast<std::size_t>(iterations));
  for (int k = 1; k <= iterations; ++k) ks[static_cast<std::size_t>(k - 1)] = k;
  return ks;
}

json ledger_json(const ResourceLedger& l) {
  return {{"iterations", l.iterations},
          {"env_copies_consumed", l.env_copies_consumed},
          {"expected_raw_pairs", l.expected_raw_pairs},
          {"qst_photons_consumed", l.qst_photons_consumed}};
}

// Emits one block per epsilon: separate files when writing to disk,
// "# epsilon=" separated sections on stdout.
void write_per_epsilon(const CliConfig& config, std::ostream& out, const std::vector<double>& epsilons,
                       const std::function<void(std::ostream&, std::size_t)>& writer,
                       std::vector<std::string>& written) {
  const bool several = epsilons.size() > 1;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    if (config.output == "-") {
      if (several) out << "# epsilon=" << format_number(epsilons[e]) << '\n';
      writer(out, e);
      continue;
    }
    const std::string path = several ? per_epsilon_path(config.output, epsilons[e]) : config.output;
    write_to(path, out, [&](std::ostream& o) { writer(o, e); });
    written.push_back(path);
  }
}

void write_sidecar(const CliConfig& config, json summary, const std::vector<std::string>& written) {
  if (config.output == "-") return;
  json meta;
  meta["tool"] = "sqrl_sim";
  meta["version"] = kToolVersion;
  meta["seed_scheme"] = static_cast<int>(seed_scheme(config));
  meta["config"] = config_to_json(config);
  meta["outputs"] = written;
  meta["summary"] = std::move(summary);
  std::ofstream file(config.output + ".meta.json", std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write metadata sidecar for " + config.output);
  file << meta.dump(2) << '\n';
}

}  // namespace

std::optional<std::pair<double, double>> preset_angles(const std::string& name) {
  if (name == "e1") return std::make_pair(std::numbers::pi / 2, 0.0);
  if (name == "e2") return std::make_pair(std::numbers::pi / 2, std::numbers::pi / 4);
  if (name == "e3") return std::make_pair(2.0 * std::acos(0.948), 0.890);
  return std::nullopt;
}

CliConfig parse_args(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

CliConfig parse_args(int argc, const char* const* argv) {
  CLI::App app{"Measurement-feedback qubit learning simulator and tomography baseline", "sqrl_sim"};
  app.require_subcommand(1);

  CliConfig config;
  std::string env_name;
  double theta = 0.0;
  double phi = 0.0;
  std::string format = "csv";

  const auto open_unit = CLI::Validator(
      [](std::string& s) -> std::string {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0') return "not a number: " + s;
        if (!(v > 0.0 && v < 1.0)) return "epsilon must lie strictly inside (0, 1), got " + s;
        return {};
      },
      "EPS in (0,1)");

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"run", "run single learning episodes and emit their trajectories"},
      {"batch", "run many seeds per epsilon and emit mean/std fidelity curves"},
      {"compare", "compare learning against tomography at matched photon budgets"},
      {"qst", "emit the tomography baseline fidelity at budgets qst-every, 2*qst-every, ..."},
  };

  std::vector<CLI::App*> commands;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    auto* env_opt = sub->add_option("--env", env_name, "target state preset")
                        ->check(CLI::IsMember({"e1", "e2", "e3"}));
    auto* theta_opt = sub->add_option("--theta", theta, "target polar angle in radians, [0, pi]")
                          ->check(CLI::Range(0.0, std::numbers::pi));
    sub->add_option("--phi", phi, "target azimuth in radians")->needs(theta_opt);
    env_opt->excludes(theta_opt);
    sub->add_option("--epsilon", config.epsilons, "reward ratio(s), comma separated")
        ->delimiter(',')
        ->check(open_unit);
    sub->add_option("--iterations", config.iterations, "iterations per episode")
        ->check(CLI::Range(1, 1000000));
    sub->add_option("--runs", config.runs, "runs per epsilon")->check(CLI::Range(1, 100000000));
    sub->add_option("--seed", config.seed, "base seed");
    sub->add_option("--delta-init", config.delta_init, "initial exploration window in radians")
        ->check(CLI::Range(0.0, kTwoPi));
    sub->add_option("--noise-p", config.noise_p, "depolarizing probability per copy")
        ->check(CLI::Range(0.0, 1.0));
    sub->add_option("--qst-every", config.qst_every, "tomography budget step (multiple of 3)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--delta-f", config.delta_f, "convergence band for the summary")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--physical", config.physical, "charge the post-selected CNOT in the ledger");
    sub->add_flag("--golden", config.golden, "pin the seed-derivation scheme (v1)");
    sub->add_option("-o,--output", config.output, "output path, '-' for stdout");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    commands.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = app.exit(e, out, err);
    throw UsageError(out.str() + err.str(), code == 0 ? kExitOk : kExitUsage);
  }

  CLI::App* chosen = nullptr;
  for (CLI::App* sub : commands) {
    if (sub->parsed()) chosen = sub;
  }
  config.command = command_from_name(chosen->get_name());
  config.format = format == "json" ? OutputFormat::Json : OutputFormat::Csv;

  if (chosen->count("--theta") > 0) {
    config.env_preset = "custom";
    config.theta = theta;
    config.phi = phi;
  } else {
    config.env_preset = env_name.empty() ? "e1" : env_name;
    std::tie(config.theta, config.phi) = *preset_angles(config.env_preset);
  }

  if (config.epsilons.empty()) throw UsageError("--epsilon needs at least one value");
  if (config.command == Command::Run) {
    if (config.epsilons.size() != 1) throw UsageError("run takes exactly one --epsilon");
    if (chosen->count("--runs") == 0) config.runs = 1;
  }
  if (config.command == Command::Compare || config.command == Command::Qst) {
    if (config.qst_every < 3 || config.qst_every % 3 != 0) {
      throw UsageError("--qst-every must be a positive multiple of 3 for " +
                       std::string(command_name(config.command)));
    }
  }
  return config;
}

json config_to_json(const CliConfig& config) {
  return {{"command", command_name(config.command)},
          {"env", config.env_preset},
          {"theta", config.theta},
          {"phi", config.phi},
          {"epsilons", config.epsilons},
          {"iterations", config.iterations},
          {"runs", config.runs},
          {"seed", config.seed},
          {"delta_init", config.delta_init},
          {"noise_p", config.noise_p},
          {"qst_every", config.qst_every},
          {"delta_f", config.delta_f},
          {"physical", config.physical},
          {"golden", config.golden},
          {"output", config.output},
          {"format", config.format == OutputFormat::Json ? "json" : "csv"}};
}

CliConfig config_from_json(const json& j) {
  CliConfig c;
  c.command = command_from_name(j.at("command").get<std::string>());
  c.env_preset = j.at("env").get<std::string>();
  c.theta = j.at("theta").get<double>();
  c.phi = j.at("phi").get<double>();
  c.epsilons = j.at("epsilons").get<std::vector<double>>();
  c.iterations = j.at("iterations").get<int>();
  c.runs = j.at("runs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.delta_init = j.at("delta_init").get<double>();
  c.noise_p = j.at("noise_p").get<double>();
  c.qst_every = j.at("qst_every").get<int>();
  c.delta_f = j.at("delta_f").get<double>();
  c.physical = j.at("physical").get<bool>();
  c.golden = j.at("golden").get<bool>();
  c.output = j.at("output").get<std::string>();
  c.format = j.at("format").get<std::string>() == "json" ? OutputFormat::Json : OutputFormat::Csv;
  return c;
}

EpisodeConfig episode_config(const CliConfig& config) {
  EpisodeConfig e;
  e.env_theta = config.theta;
  e.env_phi = config.phi;
  e.policy = RewardPolicy(config.epsilons.front());
  e.delta_init = config.delta_init;
  e.n_iterations = config.iterations;
  e.seed = config.seed;
  e.noise_p = config.noise_p;
  return e;
}

BatchConfig batch_config(const CliConfig& config) {
  BatchConfig b;
  b.base = episode_config(config);
  b.n_runs = config.runs;
  b.epsilons = config.epsilons;
  b.qst_every = config.qst_every;
  b.seed_scheme = seed_scheme(config);
  b.threads = threads_from_env();
  return b;
}

unsigned threads_from_env() {
  const char* value = std::getenv("SQRL_SIM_THREADS");
  if (value == nullptr || *value == '\0') return 0;
  char* end = nullptr;
  const unsigned long n = std::strtoul(value, &end, 10);
  if (*end != '\0') return 0;
  return static_cast<unsigned>(n);
}

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::vector<TrajectoryRow> trajectory_rows(int run_id, const std::vector<StepRecord>& records) {
  std::vector<TrajectoryRow> rows;
  rows.reserve(records.size());
  for (const StepRecord& r : records) {
    rows.push_back({run_id, r.k, r.m, r.theta, r.phi, r.delta_after, r.fidelity});
  }
  return rows;
}

void write_trajectory(std::ostream& out, const std::vector<TrajectoryRow>& rows, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    out << "run_id,k,m,theta,phi,delta,fidelity\n";
    for (const TrajectoryRow& r : rows) {
      out << r.run_id << ',' << r.k << ',' << r.m << ',' << optional_field(r.theta) << ','
          << optional_field(r.phi) << ',' << format_number(r.delta) << ','
          << format_number(r.fidelity) << '\n';
    }
    return;
  }
  json array = json::array();
  for (const TrajectoryRow& r : rows) {
    array.push_back({{"run_id", r.run_id},
                     {"k", r.k},
                     {"m", r.m},
                     {"theta", optional_number(r.theta)},
                     {"phi", optional_number(r.phi)},
                     {"delta", rounded(r.delta)},
                     {"fidelity", rounded(r.fidelity)}});
  }
  out << array.dump(2) << '\n';
}

void write_aggregate(std::ostream& out, const AggregateCurve& curve, std::span<const int> ks,
                     OutputFormat format) {
  if (static_cast<Eigen::Index>(ks.size()) != curve.mean.size()) {
    throw std::invalid_argument("write_aggregate: step labels do not match the curve length");
  }
  if (format == OutputFormat::Csv) {
    out << "k,mean,std\n";
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      out << ks[i] << ',' << format_number(curve.mean(idx)) << ',' << format_number(curve.std(idx))
          << '\n';
    }
    return;
  }
  json array = json::array();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    array.push_back({{"k", ks[i]}, {"mean", rounded(curve.mean(idx))}, {"std", rounded(curve.std(idx))}});
  }
  out << array.dump(2) << '\n';
}

void write_comparison(std::ostream& out, const ComparisonTable& table, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    out << "k,sqrl_mean,sqrl_std,qst_mean,qst_std\n";
    for (const ComparisonRow& r : table.rows) {
      out << r.k << ',' << format_number(r.sqrl_mean) << ',' << format_number(r.sqrl_std) << ','
          << format_number(r.qst_mean) << ',' << format_number(r.qst_std) << '\n';
    }
    return;
  }
  json array = json::array();
  for (const ComparisonRow& r : table.rows) {
    array.push_back({{"k", r.k},
                     {"sqrl_mean", rounded(r.sqrl_mean)},
                     {"sqrl_std", rounded(r.sqrl_std)},
                     {"qst_mean", rounded(r.qst_mean)},
                     {"qst_std", rounded(r.qst_std)}});
  }
  out << array.dump(2) << '\n';
}

void emit_trajectory(const std::vector<TrajectoryRow>& rows, OutputFormat format, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_trajectory: no records");
  write_to(path, std::cout, [&](std::ostream& o) { write_trajectory(o, rows, format); });
}

void emit_comparison(const ComparisonTable& table, OutputFormat format, const std::string& path) {
  if (table.rows.empty()) throw std::invalid_argument("emit_comparison: empty table");
  write_to(path, std::cout, [&](std::ostream& o) { write_comparison(o, table, format); });
}

std::string per_epsilon_path(const std::string& path, double epsilon) {
  const std::filesystem::path p(path);
  const std::string name = p.stem().string() + "_eps" + format_number(epsilon) + p.extension().string();
  return (p.parent_path() / name).string();
}

int run_command(const CliConfig& config, std::ostream& out) {
  std::vector<std::string> written;
  json summary;

  switch (config.command) {
    case Command::Run: {
      const EpisodeConfig base = episode_config(config);
      std::vector<TrajectoryRow> rows;
      double final_sum = 0.0;
      for (int r = 0; r < config.runs; ++r) {
        EpisodeConfig episode = base;
        episode.seed = episode_seed(config.seed, 0, static_cast<std::size_t>(r), seed_scheme(config));
        const auto records = run_episode(episode);
        final_sum += records.back().fidelity;
        const auto run_rows = trajectory_rows(r, records);
        rows.insert(rows.end(), run_rows.begin(), run_rows.end());
      }
      write_to(config.output, out, [&](std::ostream& o) { write_trajectory(o, rows, config.format); });
      if (config.output != "-") written.push_back(config.output);
      summary["final_fidelity_mean"] = final_sum / config.runs;
      summary["ledger_per_episode"] = ledger_json(resource_ledger(config.iterations, config.physical, 0));
      break;
    }
    case Command::Batch: {
      const BatchConfig batch = batch_config(config);
      const BatchResult result = run_batch(batch);
      const std::vector<int> ks = all_steps(config.iterations);
      write_per_epsilon(
          config, out, config.epsilons,
          [&](std::ostream& o, std::size_t e) {
            write_aggregate(o, result.per_epsilon[e].curve, ks, config.format);
          },
          written);
      summary["per_epsilon"] = json::array();
      for (const EpsilonResult& r : result.per_epsilon) {
        summary["per_epsilon"].push_back(
            {{"epsilon", r.epsilon},
             {"final_mean", r.final_mean},
             {"final_std", r.final_std},
             {"median_convergence_step", median_convergence_step(r.fidelities, config.delta_f)}});
      }
      summary["ledger_per_episode"] = ledger_json(resource_ledger(config.iterations, config.physical, 0));
      break;
    }
    case Command::Compare: {
      const BatchConfig batch = batch_config(config);
      const auto tables = compare_sqrl_qst(batch);
      write_per_epsilon(
          config, out, config.epsilons,
          [&](std::ostream& o, std::size_t e) { write_comparison(o, tables[e], config.format); },
          written);
      summary["per_epsilon"] = json::array();
      for (const ComparisonTable& t : tables) {
        const auto window = dominance_window(t);
        summary["per_epsilon"].push_back(
            {{"epsilon", t.epsilon},
             {"dominance_window", window ? json::array({window->first, window->second}) : json(nullptr)}});
      }
      break;
    }
    case Command::Qst: {
      const std::vector<int> ks = budget_steps(config.qst_every, config.iterations);
      if (ks.empty()) throw std::invalid_argument("no tomography budget fits in --iterations");
      const AggregateCurve curve =
          qst_curve(state_from_angles(config.theta, config.phi), ks, config.runs, config.seed,
                    seed_scheme(config), threads_from_env());
      write_to(config.output, out, [&](std::ostream& o) { write_aggregate(o, curve, ks, config.format); });
      if (config.output != "-") written.push_back(config.output);
      summary["ledger_final"] = ledger_json(resource_ledger(0, config.physical, 3L * (ks.back() / 3)));
      break;
    }
  }
  write_sidecar(config, std::move(summary), written);
  return kExitOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig config;
  try {
    config = parse_args(argc, argv);
  } catch (const UsageError& e) {
    (e.exit_code() == kExitOk ? out : err) << e.what();
    return e.exit_code();
  }
  try {
    return run_command(config, out);
  } catch (const std::exception& e) {
    err << "sqrl_sim: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace sqrl::cli
