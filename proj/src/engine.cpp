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

#include "sqrl/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sqrl {

namespace {

// Frames are re-projected onto the unitary group once drift passes this.
constexpr double kReorthonormalizeAbove = 1e-10;

}  // namespace

RewardPolicy::RewardPolicy(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("reward ratio epsilon must lie strictly inside (0, 1), got " +
                                std::to_string(epsilon));
  }
}

ExplorationState ExplorationState::initial(double delta_init, double delta_max) {
  if (!std::isfinite(delta_init) || !std::isfinite(delta_max) || delta_init < 0.0 ||
      delta_init > delta_max) {
    throw std::invalid_argument("exploration window needs 0 <= delta_init <= delta_max");
  }
  return {delta_init, delta_max, delta_init};
}

void EpisodeConfig::validate() const {
  if (!std::isfinite(env_theta) || env_theta < 0.0 || env_theta > std::numbers::pi) {
    throw std::invalid_argument("env_theta must lie in [0, pi]");
  }
  if (!std::isfinite(env_phi)) throw std::invalid_argument("env_phi must be finite");
  if (n_iterations < 1) throw std::invalid_argument("n_iterations must be >= 1");
  if (!(noise_p >= 0.0 && noise_p <= 1.0)) throw std::invalid_argument("noise_p must lie in [0, 1]");
  ExplorationState::initial(delta_init, delta_max);
}

double outcome_zero_probability(const QubitStated& env, const AgentFrame& frame) {
  const QubitStated rotated = sqrl::apply(adjoint(frame.accumulated), env);
  return register_probability(cnot_with_fresh_register(rotated), 0);
}

int measure_single_shot(const QubitStated& env, const AgentFrame& frame, RandomStream& rng) {
  const double p0 = outcome_zero_probability(env, frame);
  return rng.uniform() < p0 ? 0 : 1;
}

ExplorationState exploration_update(const ExplorationState& state, int m_prev,
                                    const RewardPolicy& policy) {
  ExplorationState next = state;
  next.delta = std::min(state.delta * policy.factor(m_prev), state.delta_max);
  return next;
}

AgentAction agent_action(double theta, double phi, const AgentFrame& frame,
                         GeneratorConvention convention) {
  const Unitary2d& current = frame.accumulated;
  const Matrix2cd sx = conjugate_frame(current, spin_x(convention));
  const Matrix2cd sz = conjugate_frame(current, spin_z(convention));

  AgentAction action;
  action.u_a = compose(exp_hermitian(sz, phi), exp_hermitian(sx, theta));
  action.frame.accumulated = compose(action.u_a, current);
  if (unitarity_defect(action.frame.accumulated) > kReorthonormalizeAbove) {
    action.frame.accumulated = nearest_unitary(action.frame.accumulated);
  }
  action.theta = theta;
  action.phi = phi;
  return action;
}

AgentAction agent_update(int m, const ExplorationState& exploration, const AgentFrame& frame,
                         RandomStream& rng, GeneratorConvention convention) {
  if (m == 0) return {Unitary2d::Identity(), frame, std::nullopt, std::nullopt};
  const double half = exploration.delta / 2.0;
  const double theta = rng.uniform(-half, half);
  const double phi = rng.uniform(-half, half);
  return agent_action(theta, phi, frame, convention);
}

QubitStated haar_random_state(RandomStream& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double azimuth = kTwoPi * rng.uniform();
  return state_from_angles(std::acos(std::clamp(z, -1.0, 1.0)), azimuth);
}

QubitStated depolarize(const QubitStated& state, double p, RandomStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("depolarize: p must lie in [0, 1]");
  if (rng.uniform() < p) return haar_random_state(rng);
  return state;
}

std::vector<StepRecord> run_episode(const EpisodeConfig& config) {
  config.validate();
  const QubitStated env = config.environment();
  RandomStream rng(config.seed);
  ExplorationState exploration = ExplorationState::initial(config.delta_init, config.delta_max);
  AgentFrame frame;

  std::vector<StepRecord> records;
  records.reserve(static_cast<std::size_t>(config.n_iterations));
  for (int k = 1; k <= config.n_iterations; ++k) {
    const QubitStated copy = config.noise_p > 0.0 ? depolarize(env, config.noise_p, rng) : env;
    const int m = measure_single_shot(copy, frame, rng);
    const AgentAction action = agent_update(m, exploration, frame, rng, config.convention);
    const double window = exploration.delta;
    exploration = exploration_update(exploration, m, config.policy);
    frame = action.frame;

    records.push_back({k, m, action.theta, action.phi, window, exploration.delta,
                       fidelity(frame.agent_state(), env)});
  }
  return records;
}

}  // namespace sqrl
