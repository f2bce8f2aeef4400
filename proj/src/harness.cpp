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

#include "sqrl/harness.hpp"

#include "sqrl/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace sqrl {

namespace {

// Stream tags keep learning and tomography seeds apart.
constexpr std::uint64_t kEpisodeTag = 0x65706973ULL;
constexpr std::uint64_t kQstTag = 0x71737421ULL;

// Runs body(i) for i in [0, n). Each index writes only its own output slot,
// so results do not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::uint64_t episode_seed(std::uint64_t base, std::size_t eps_index, std::size_t run,
                           SeedScheme scheme) {
  switch (scheme) {
    case SeedScheme::V1:
      return derive_seed(base, kEpisodeTag, eps_index, run);
  }
  throw std::invalid_argument("unknown seed scheme");
}

std::uint64_t qst_seed(std::uint64_t base, long k, std::size_t rep, SeedScheme scheme) {
  switch (scheme) {
    case SeedScheme::V1:
      return derive_seed(base, kQstTag, static_cast<std::uint64_t>(k), rep);
  }
  throw std::invalid_argument("unknown seed scheme");
}

void BatchConfig::validate() const {
  base.validate();
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  if (epsilons.empty()) throw std::invalid_argument("at least one epsilon is required");
  for (double eps : epsilons) RewardPolicy{eps};
  if (qst_every < 0) throw std::invalid_argument("qst_every must be >= 0");
}

AggregateCurve aggregate(const Eigen::MatrixXd& per_run) {
  AggregateCurve curve;
  curve.n_runs = static_cast<int>(per_run.rows());
  curve.mean = per_run.colwise().mean().transpose();
  curve.std = Eigen::VectorXd::Zero(per_run.cols());
  if (per_run.rows() > 1) {
    const Eigen::MatrixXd centered = per_run.rowwise() - curve.mean.transpose();
    curve.std = (centered.colwise().squaredNorm() / static_cast<double>(per_run.rows() - 1))
                    .cwiseSqrt()
                    .transpose();
  }
  return curve;
}

BatchResult run_batch(const BatchConfig& config) {
  config.validate();
  const auto n_runs = static_cast<std::size_t>(config.n_runs);
  const Eigen::Index n_iter = config.base.n_iterations;

  BatchResult result;
  for (std::size_t e = 0; e < config.epsilons.size(); ++e) {
    EpsilonResult out;
    out.epsilon = config.epsilons[e];
    out.fidelities.resize(static_cast<Eigen::Index>(n_runs), n_iter);

    parallel_for(n_runs, config.threads, [&](std::size_t r) {
      EpisodeConfig episode = config.base;
      episode.policy = RewardPolicy(out.epsilon);
      episode.seed = episode_seed(config.base.seed, e, r, config.seed_scheme);
      const auto records = run_episode(episode);
      for (Eigen::Index k = 0; k < n_iter; ++k) {
        out.fidelities(static_cast<Eigen::Index>(r), k) = records[static_cast<std::size_t>(k)].fidelity;
      }
    });

    out.curve = aggregate(out.fidelities);
    out.final_mean = out.curve.mean(n_iter - 1);
    out.final_std = out.curve.std(n_iter - 1);
    result.per_epsilon.push_back(std::move(out));
  }
  return result;
}

std::optional<int> convergence_step(std::span<const double> curve, double delta_f) {
  if (!(delta_f > 0.0)) throw std::invalid_argument("delta_f must be positive");
  if (curve.empty()) return std::nullopt;
  const double final_value = curve.back();
  // Walk back from the end while values stay inside the band.
  std::size_t first = curve.size() - 1;
  while (first > 0 && std::abs(curve[first - 1] - final_value) <= delta_f) --first;
  if (first + 1 >= curve.size() && curve.size() > 1) return std::nullopt;
  return static_cast<int>(first) + 1;
}

double median_convergence_step(const Eigen::MatrixXd& fidelities, double delta_f) {
  std::vector<double> steps;
  steps.reserve(static_cast<std::size_t>(fidelities.rows()));
  for (Eigen::Index r = 0; r < fidelities.rows(); ++r) {
    const Eigen::VectorXd row = fidelities.row(r).transpose();
    const auto k = convergence_step(std::span<const double>(row.data(), row.size()), delta_f);
    steps.push_back(k ? *k : static_cast<double>(fidelities.cols()));
  }
  if (steps.empty()) throw std::invalid_argument("median_convergence_step: no runs");
  std::sort(steps.begin(), steps.end());
  const std::size_t n = steps.size();
  return n % 2 == 1 ? steps[n / 2] : 0.5 * (steps[n / 2 - 1] + steps[n / 2]);
}

ResourceLedger resource_ledger(long iterations, bool physical_mode, long qst_photons) {
  if (iterations < 0 || qst_photons < 0) throw std::invalid_argument("resource counts must be >= 0");
  ResourceLedger ledger;
  ledger.iterations = iterations;
  ledger.env_copies_consumed = iterations;
  ledger.expected_raw_pairs = (physical_mode ? 2.0 : 1.0) * static_cast<double>(iterations);
  ledger.qst_photons_consumed = qst_photons;
  return ledger;
}

AggregateCurve qst_curve(const QubitStated& env, std::span<const int> ks, int n_runs,
                         std::uint64_t base_seed, SeedScheme scheme, unsigned threads) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  const auto runs = static_cast<std::size_t>(n_runs);
  Eigen::MatrixXd samples(n_runs, static_cast<Eigen::Index>(ks.size()));
  parallel_for(ks.size() * runs, threads, [&](std::size_t i) {
    const std::size_t col = i / runs;
    const std::size_t rep = i % runs;
    RandomStream rng(qst_seed(base_seed, ks[col], rep, scheme));
    samples(static_cast<Eigen::Index>(rep), static_cast<Eigen::Index>(col)) =
        qst_baseline(env, ks[col], rng);
  });
  return aggregate(samples);
}

std::vector<ComparisonTable> compare_sqrl_qst(const BatchConfig& config) {
  return compare_sqrl_qst(config, run_batch(config));
}

std::vector<ComparisonTable> compare_sqrl_qst(const BatchConfig& config, const BatchResult& batch) {
  config.validate();
  if (config.qst_every < 3 || config.qst_every % 3 != 0) {
    throw std::invalid_argument("qst_every must be a positive multiple of 3");
  }
  std::vector<int> ks;
  for (int k = config.qst_every; k <= config.base.n_iterations; k += config.qst_every) ks.push_back(k);

  const AggregateCurve qst = qst_curve(config.base.environment(), ks, config.n_runs,
                                       config.base.seed, config.seed_scheme, config.threads);

  std::vector<ComparisonTable> tables;
  for (const EpsilonResult& eps : batch.per_epsilon) {
    ComparisonTable table;
    table.epsilon = eps.epsilon;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const int k = ks[i];
      ComparisonRow row;
      row.k = k;
      row.sqrl_mean = eps.curve.mean(k - 1);
      row.sqrl_std = eps.curve.std(k - 1);
      row.qst_mean = qst.mean(static_cast<Eigen::Index>(i));
      row.qst_std = qst.std(static_cast<Eigen::Index>(i));
      row.sqrl_budget = resource_ledger(k, false, 0);
      row.qst_budget = resource_ledger(0, false, 3L * (k / 3));
      table.rows.push_back(row);
    }
    tables.push_back(std::move(table));
  }
  return tables;
}

std::optional<std::pair<int, int>> dominance_window(const ComparisonTable& table) {
  std::optional<std::pair<int, int>> best;
  std::size_t best_len = 0;
  std::size_t i = 0;
  while (i < table.rows.size()) {
    if (!(table.rows[i].sqrl_mean > table.rows[i].qst_mean)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < table.rows.size() && table.rows[j + 1].sqrl_mean > table.rows[j + 1].qst_mean) ++j;
    if (j - i + 1 > best_len) {
      best_len = j - i + 1;
      best = std::make_pair(table.rows[i].k, table.rows[j].k);
    }
    i = j + 1;
  }
  return best;
}

}  // namespace sqrl
