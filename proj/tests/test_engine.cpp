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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqrl/engine.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace sqrl;

namespace {

constexpr double kPi = std::numbers::pi;

double three_sigma(double p, int n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }

EpisodeConfig e1_config(double eps, std::uint64_t seed) {
  EpisodeConfig c;
  c.env_theta = kPi / 2;
  c.env_phi = 0.0;
  c.policy = RewardPolicy(eps);
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("RewardPolicy accepts only (0, 1)") {
  for (double bad : {0.0, 1.0, 1.5, -0.2, std::numeric_limits<double>::quiet_NaN()}) {
    CHECK_THROWS_AS(RewardPolicy{bad}, std::invalid_argument);
  }
  const RewardPolicy p(0.25);
  CHECK(p.factor(0) == 0.25);
  CHECK(p.factor(1) == 4.0);
}

TEST_CASE("ExplorationState::initial validates the window") {
  CHECK_THROWS_AS(ExplorationState::initial(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(ExplorationState::initial(7.0), std::invalid_argument);
  const auto s = ExplorationState::initial(kPi);
  CHECK(s.delta == kPi);
  CHECK(s.delta_max == kTwoPi);
}

TEST_CASE("measure_single_shot on certain outcomes") {
  RandomStream rng(1);
  const AgentFrame identity;
  for (int i = 0; i < 1000; ++i) {
    CHECK(measure_single_shot(basis_state(0), identity, rng) == 0);
    CHECK(measure_single_shot(basis_state(1), identity, rng) == 1);
  }
  // Certain outcomes still consume their draw.
  CHECK(rng.draws() == 2000);
}

TEST_CASE("measure_single_shot frequency on |E1>") {
  RandomStream rng(2);
  const AgentFrame identity;
  const QubitStated e1 = state_from_angles(kPi / 2, 0.0);
  const int n = 100000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += measure_single_shot(e1, identity, rng) == 0;
  CHECK(std::abs(zeros / double(n) - 0.5) <= 0.005);
}

TEST_CASE("measurement sees the environment through the frame adjoint") {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 200; ++i) {
    AgentFrame frame{oracle::random_unitary(gen)};
    const QubitStated env = oracle::random_state(gen);
    // Same as comparing the agent state U|0> with the fixed environment.
    CHECK(std::abs(outcome_zero_probability(env, frame) - fidelity(frame.agent_state(), env)) < 1e-12);
    const TwoQubitStated joint = cnot_with_fresh_register(QubitStated(frame.accumulated.adjoint() * env));
    CHECK(std::abs(register_probability(joint, 0) + register_probability(joint, 1) - 1.0) < 1e-12);
  }
}

TEST_CASE("exploration_update follows the reward rule and clamps") {
  const RewardPolicy half(0.5);
  const auto start = ExplorationState::initial(kPi);
  CHECK(exploration_update(start, 0, half).delta == kPi / 2);
  CHECK(exploration_update(start, 1, half).delta == kTwoPi);

  ExplorationState wide = ExplorationState::initial(1.9 * kPi);
  const auto grown = exploration_update(wide, 1, RewardPolicy(0.8));
  CHECK(grown.delta == kTwoPi);
  CHECK(grown.delta_init == wide.delta_init);

  auto s = ExplorationState::initial(kTwoPi);
  for (int i = 0; i < 5; ++i) s = exploration_update(s, 0, half);
  CHECK(s.delta == doctest::Approx(kTwoPi / 32).epsilon(1e-15));
}

TEST_CASE("agent_update after a reward is the identity and draws nothing") {
  RandomStream rng(5);
  std::mt19937_64 gen(6);
  const AgentFrame frame{oracle::random_unitary(gen)};
  const AgentAction a = agent_update(0, ExplorationState::initial(kTwoPi), frame, rng);
  CHECK(a.u_a == Unitary2d::Identity());
  CHECK(a.frame.accumulated == frame.accumulated);
  CHECK_FALSE(a.theta.has_value());
  CHECK(rng.draws() == 0);
}

TEST_CASE("agent_update with an empty window is exactly the identity") {
  RandomStream rng(7);
  std::mt19937_64 gen(8);
  const AgentFrame frame{oracle::random_unitary(gen)};
  const AgentAction a = agent_update(1, ExplorationState::initial(0.0), frame, rng);
  CHECK(a.u_a == Unitary2d::Identity());
  CHECK(a.frame.accumulated == frame.accumulated);
  CHECK(rng.draws() == 2);
}

TEST_CASE("agent_action in the identity frame is rot_z(phi) rot_x(theta)") {
  const AgentAction a = agent_action(kPi / 2, kPi / 4, AgentFrame{});
  // Oracle: the product written out from the closed forms.
  const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
  Matrix2cd rx;
  rx << c, Complex<double>(0, -s), Complex<double>(0, -s), c;
  Matrix2cd rz = Matrix2cd::Zero();
  rz(0, 0) = std::polar(1.0, -kPi / 8);
  rz(1, 1) = std::polar(1.0, kPi / 8);
  CHECK((a.u_a - rz * rx).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a.frame.accumulated - rz * rx).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("agent_action rotates about the frame's own axes") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 100; ++i) {
    const AgentFrame frame{oracle::random_unitary(gen)};
    const double theta = u(gen), phi = u(gen);
    const AgentAction a = agent_action(theta, phi, frame);
    const Unitary2d& f = frame.accumulated;
    const Matrix2cd expected = f * rot_z(phi) * rot_x(theta) * f.adjoint();
    CHECK((a.u_a - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.frame.accumulated - f * rot_z(phi) * rot_x(theta)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("agent_update draws theta then phi from the window") {
  const std::uint64_t seed = 42;
  const auto window = ExplorationState::initial(kPi);
  RandomStream rng(seed);
  const AgentAction a = agent_update(1, window, AgentFrame{}, rng);

  RandomStream replay(seed);
  const double theta = replay.uniform(-kPi / 2, kPi / 2);
  const double phi = replay.uniform(-kPi / 2, kPi / 2);
  REQUIRE(a.theta.has_value());
  CHECK(*a.theta == theta);
  CHECK(*a.phi == phi);
  CHECK((a.u_a - rot_z(phi) * rot_x(theta)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("episode on |0> is all rewards") {
  for (double eps : {0.8, 0.65, 0.5}) {
    EpisodeConfig c;
    c.env_theta = 0.0;
    c.policy = RewardPolicy(eps);
    c.seed = 99;
    const auto records = run_episode(c);
    REQUIRE(records.size() == 50);
    double delta = c.delta_init;
    for (const StepRecord& r : records) {
      delta *= eps;
      CHECK(r.m == 0);
      CHECK(r.fidelity == 1.0);
      CHECK(r.delta_after == delta);
      CHECK(std::abs(r.delta_after - c.delta_init * std::pow(eps, r.k)) < 1e-12);
      CHECK_FALSE(r.theta.has_value());
    }
  }
}

TEST_CASE("episodes are deterministic in the seed") {
  const auto a = run_episode(e1_config(0.5, 42));
  const auto b = run_episode(e1_config(0.5, 42));
  CHECK(a == b);

  int differing = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = run_episode(e1_config(0.5, 1000 + s));
    const auto y = run_episode(e1_config(0.5, 2000 + s));
    bool same = true;
    for (std::size_t k = 0; k < x.size(); ++k) same = same && x[k].m == y[k].m;
    differing += !same;
  }
  CHECK(differing == 20);
}

TEST_CASE("sampled angles stay inside the window in force") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto records = run_episode(e1_config(0.65, seed));
    double window = kTwoPi;
    for (const StepRecord& r : records) {
      CHECK(r.delta_window == window);
      if (r.m == 1) {
        REQUIRE(r.theta.has_value());
        CHECK(std::abs(*r.theta) <= window / 2);
        CHECK(std::abs(*r.phi) <= window / 2);
      }
      CHECK(r.fidelity >= 0.0);
      CHECK(r.fidelity <= 1.0);
      window = r.delta_after;
    }
  }
}

TEST_CASE("frame picture and agent picture agree step by step") {
  const QubitStated envs[] = {state_from_angles(kPi / 2, 0.0), state_from_angles(kPi / 2, kPi / 4),
                              state_from_angles(2 * std::acos(0.948), 0.890)};
  for (const QubitStated& env : envs) {
    const Eigen::Vector3d b = bloch_vector(env);
    const double theta = std::acos(std::clamp(b.z(), -1.0, 1.0));
    const double phi = std::atan2(b.y(), b.x());
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      EpisodeConfig c;
      c.env_theta = theta;
      c.env_phi = phi;
      c.policy = RewardPolicy(0.65);
      c.seed = seed;
      const auto frame_side = run_episode(c);
      const auto agent_side = oracle::run_agent_picture(env, 0.65, kTwoPi, kTwoPi, 50, seed);
      for (std::size_t k = 0; k < frame_side.size(); ++k) {
        CHECK(frame_side[k].m == agent_side[k].m);
        CHECK(std::abs(frame_side[k].fidelity - agent_side[k].fidelity) < 1e-9);
      }
    }
  }
}

TEST_CASE("accumulated frame stays unitary over long episodes") {
  EpisodeConfig c = e1_config(0.9, 3);
  c.n_iterations = 5000;
  c.env_theta = kPi;  // mostly punishments: many compositions
  RandomStream rng(3);
  ExplorationState expl = ExplorationState::initial(kTwoPi);
  AgentFrame frame;
  for (int k = 0; k < 5000; ++k) {
    const int m = measure_single_shot(c.environment(), frame, rng);
    frame = agent_update(m, expl, frame, rng).frame;
    expl = exploration_update(expl, m, c.policy);
    CHECK(unitarity_defect(frame.accumulated) < 1e-9);
  }
}

TEST_CASE("depolarize") {
  const QubitStated zero = basis_state(0);
  RandomStream rng(10);
  CHECK(depolarize(zero, 0.0, rng) == zero);
  CHECK(rng.draws() == 1);
  CHECK_THROWS_AS(depolarize(zero, 1.5, rng), std::invalid_argument);

  // Haar average of |<psi|phi>|^2 is 1/2.
  const int n = 100000;
  double total = 0.0;
  RandomStream full(11);
  for (int i = 0; i < n; ++i) total += fidelity(depolarize(zero, 1.0, full), zero);
  CHECK(std::abs(total / n - 0.5) < 0.01);
  CHECK(full.draws() == 3ULL * n);

  // Outcome-0 frequency for |0> through the channel is 1 - p/2.
  const double p = 0.1;
  RandomStream noisy(12);
  int zeros = 0;
  for (int i = 0; i < n; ++i) {
    zeros += measure_single_shot(depolarize(zero, p, noisy), AgentFrame{}, noisy) == 0;
  }
  const double expected = 1.0 - p / 2.0;
  CHECK(std::abs(zeros / double(n) - expected) <= three_sigma(expected, n));
}

TEST_CASE("noisy episodes stay valid and deterministic") {
  EpisodeConfig c = e1_config(0.8, 77);
  c.noise_p = 0.2;
  const auto a = run_episode(c);
  CHECK(a == run_episode(c));
  CHECK(a != run_episode(e1_config(0.8, 77)));
  for (const auto& r : a) CHECK((r.fidelity >= 0.0 && r.fidelity <= 1.0));
}

TEST_CASE("full-Pauli convention doubles the effective rotation") {
  const AgentAction half = agent_action(0.6, -0.2, AgentFrame{}, GeneratorConvention::HalfPauli);
  const AgentAction doubled = agent_action(0.3, -0.1, AgentFrame{}, GeneratorConvention::FullPauli);
  CHECK((half.u_a - doubled.u_a).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mean fidelity rises over the episode (|E1>, eps 0.5)") {
  const int runs = 1000;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(50);
  for (int s = 0; s < runs; ++s) {
    const auto records = run_episode(e1_config(0.5, 5000 + s));
    for (int k = 0; k < 50; ++k) mean(k) += records[k].fidelity / runs;
  }
  // Block means over windows of five iterations.
  for (int w = 1; w < 10; ++w) {
    CHECK(mean.segment(5 * w, 5).mean() >= mean.segment(5 * (w - 1), 5).mean());
  }
}

TEST_CASE("invalid episode configs are rejected") {
  EpisodeConfig c;
  c.n_iterations = 0;
  CHECK_THROWS_AS(run_episode(c), std::invalid_argument);
  c = EpisodeConfig{};
  c.env_theta = 4.0;
  CHECK_THROWS_AS(run_episode(c), std::invalid_argument);
  c = EpisodeConfig{};
  c.noise_p = -0.1;
  CHECK_THROWS_AS(run_episode(c), std::invalid_argument);
  c = EpisodeConfig{};
  c.delta_init = 10.0;
  CHECK_THROWS_AS(run_episode(c), std::invalid_argument);
}
