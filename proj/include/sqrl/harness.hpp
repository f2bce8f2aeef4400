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

/// \file harness.hpp
/// Many-seed experiments on top of the episode loop: epsilon sweeps,
/// mean/std fidelity curves, convergence detection and the photon-budget
/// matched comparison against tomography.

#include "sqrl/engine.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sqrl {

/// Versioned recipe for turning a base seed into per-run seeds. Pinning a
/// version keeps golden trajectories reproducible if the default changes.
enum class SeedScheme : int { V1 = 1 };

inline constexpr SeedScheme kCurrentSeedScheme = SeedScheme::V1;

/// Seed of run `run` under epsilon number `eps_index`.
std::uint64_t episode_seed(std::uint64_t base, std::size_t eps_index, std::size_t run,
                           SeedScheme scheme = kCurrentSeedScheme);

/// Seed for tomography repetition `rep` at budget k (independent of epsilon).
std::uint64_t qst_seed(std::uint64_t base, long k, std::size_t rep,
                       SeedScheme scheme = kCurrentSeedScheme);

struct BatchConfig {
  EpisodeConfig base;  ///< base.seed and base.policy are overridden per run
  int n_runs = 20;
  std::vector<double> epsilons = {0.8};
  int qst_every = 3;   ///< 0 disables the tomography comparison
  SeedScheme seed_scheme = kCurrentSeedScheme;
  unsigned threads = 0;  ///< 0: hardware concurrency

  void validate() const;
};

struct AggregateCurve {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;  ///< sample standard deviation (0 for a single run)
  int n_runs = 0;
};

/// Mean and sample standard deviation of each column.
AggregateCurve aggregate(const Eigen::MatrixXd& per_run);

struct EpsilonResult {
  double epsilon = 0.0;
  /// n_runs x n_iterations, row r holds run r's fidelity trajectory.
  Eigen::MatrixXd fidelities;
  AggregateCurve curve;
  double final_mean = 0.0;
  double final_std = 0.0;
};

struct BatchResult {
  std::vector<EpsilonResult> per_epsilon;
};

/// Runs n_runs episodes per epsilon. Deterministic for a given config,
/// whatever the thread count.
BatchResult run_batch(const BatchConfig& config);

/// Smallest 1-based k such that every value from k on stays within delta_f
/// of the final value. nullopt when only k = n qualifies.
std::optional<int> convergence_step(std::span<const double> curve, double delta_f);

/// Median of per-run convergence steps; runs that never converge count as
/// n_iterations.
double median_convergence_step(const Eigen::MatrixXd& fidelities, double delta_f);

struct ResourceLedger {
  long iterations = 0;
  long env_copies_consumed = 0;
  double expected_raw_pairs = 0.0;
  long qst_photons_consumed = 0;
};

/// Photon accounting. Physical mode charges the post-selected CNOT's 1/2
/// success probability, doubling the expected raw pairs per copy.
ResourceLedger resource_ledger(long iterations, bool physical_mode, long qst_photons);

struct ComparisonRow {
  int k = 0;
  double sqrl_mean = 0.0;
  double sqrl_std = 0.0;
  double qst_mean = 0.0;
  double qst_std = 0.0;
  ResourceLedger sqrl_budget;
  ResourceLedger qst_budget;
};

struct ComparisonTable {
  double epsilon = 0.0;
  std::vector<ComparisonRow> rows;
};

/// Budget-matched sQRL vs tomography table, one per epsilon. qst_every must
/// be a positive multiple of 3.
std::vector<ComparisonTable> compare_sqrl_qst(const BatchConfig& config);

/// Same, reusing an existing batch result for the learning columns.
std::vector<ComparisonTable> compare_sqrl_qst(const BatchConfig& config, const BatchResult& batch);

/// Mean/std tomography fidelity at each budget k in ks.
AggregateCurve qst_curve(const QubitStated& env, std::span<const int> ks, int n_runs,
                         std::uint64_t base_seed, SeedScheme scheme = kCurrentSeedScheme,
                         unsigned threads = 0);

/// Longest contiguous block of rows with sqrl_mean > qst_mean, as the
/// inclusive k range. nullopt when sQRL is never ahead.
std::optional<std::pair<int, int>> dominance_window(const ComparisonTable& table);

/// Threads to use for `requested` (0 = hardware concurrency, at least 1).
unsigned resolve_threads(unsigned requested);

}  // namespace sqrl
