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

/// \file engine.hpp
/// The measurement-feedback learning loop.
///
/// Each iteration consumes one copy of the hidden environment state. The
/// copy is rotated into the agent's frame by the adjoint of the accumulated
/// unitary, entangled with a fresh register through a CNOT, and the register
/// is read once. Outcome 0 is a reward: the agent stays put and the
/// exploration window shrinks by epsilon. Outcome 1 is a punishment: the
/// agent applies a random rotation drawn from the current window, expressed
/// along its own rotated axes, and the window grows by 1/epsilon.
///
/// Random draw order inside one iteration is fixed:
///   noise branch (only when noise_p > 0) [+ 2 draws if the copy is replaced]
///   -> measurement -> theta -> phi (angles only after a punishment).

#include "sqrl/core.hpp"
#include "sqrl/random.hpp"

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace sqrl {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reward/punishment ratio, strictly inside (0, 1).
class RewardPolicy {
 public:
  explicit RewardPolicy(double epsilon);

  double epsilon() const { return epsilon_; }

  /// Multiplier applied to the window after outcome m.
  double factor(int m) const { return m == 0 ? epsilon_ : 1.0 / epsilon_; }

 private:
  double epsilon_;
};

struct ExplorationState {
  double delta = kTwoPi;
  double delta_max = kTwoPi;
  double delta_init = kTwoPi;

  /// Window at the start of an episode. Requires 0 <= delta_init <= delta_max.
  static ExplorationState initial(double delta_init, double delta_max = kTwoPi);
};

/// Accumulated agent unitary. The agent's state is accumulated * |0>.
struct AgentFrame {
  Unitary2d accumulated = Unitary2d::Identity();

  QubitStated agent_state() const { return accumulated.col(0); }
};

struct StepRecord {
  int k = 0;
  int m = 0;
  std::optional<double> theta;  ///< only after a punishment
  std::optional<double> phi;    ///< only after a punishment
  double delta_window = 0.0;    ///< window the angles were drawn from
  double delta_after = 0.0;
  double fidelity = 0.0;

  bool operator==(const StepRecord&) const = default;
};

struct EpisodeConfig {
  double env_theta = std::numbers::pi / 2;
  double env_phi = 0.0;
  RewardPolicy policy{0.8};
  double delta_init = kTwoPi;
  double delta_max = kTwoPi;
  int n_iterations = 50;
  std::uint64_t seed = 0;
  double noise_p = 0.0;
  GeneratorConvention convention = GeneratorConvention::HalfPauli;

  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
  QubitStated environment() const { return state_from_angles(env_theta, env_phi); }
};

/// p(m = 0) for the environment seen through the agent frame.
double outcome_zero_probability(const QubitStated& env, const AgentFrame& frame);

/// One single-shot register readout. Always consumes exactly one draw, also
/// when the outcome is certain.
int measure_single_shot(const QubitStated& env, const AgentFrame& frame, RandomStream& rng);

/// Window for the next iteration: epsilon * delta after a reward,
/// delta / epsilon after a punishment, clamped to delta_max.
ExplorationState exploration_update(const ExplorationState& state, int m_prev,
                                    const RewardPolicy& policy);

struct AgentAction {
  Unitary2d u_a = Unitary2d::Identity();
  AgentFrame frame;
  std::optional<double> theta;
  std::optional<double> phi;
};

/// The agent's rotation for sampled angles: e^{-i S_z' phi} e^{-i S_x' theta}
/// with S' the generators conjugated into the current frame.
AgentAction agent_action(double theta, double phi, const AgentFrame& frame,
                         GeneratorConvention convention = GeneratorConvention::HalfPauli);

/// m = 0: identity, no draws. m = 1: theta then phi uniform on
/// [-delta/2, delta/2], then agent_action().
AgentAction agent_update(int m, const ExplorationState& exploration, const AgentFrame& frame,
                         RandomStream& rng,
                         GeneratorConvention convention = GeneratorConvention::HalfPauli);

/// Haar-uniform pure state (two draws).
QubitStated haar_random_state(RandomStream& rng);

/// Trajectory unravelling of the depolarizing channel: with probability p the
/// copy is replaced by a Haar-random state. One draw, or three on replacement.
QubitStated depolarize(const QubitStated& state, double p, RandomStream& rng);

/// Runs one episode. Identical configs give identical records.
std::vector<StepRecord> run_episode(const EpisodeConfig& config);

}  // namespace sqrl
