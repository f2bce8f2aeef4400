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

#include "sqrl/tomography.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace sqrl;

namespace {

constexpr double kPi = std::numbers::pi;

double min_eigenvalue(const DensityMatrixd& rho) {
  return Eigen::SelfAdjointEigenSolver<Matrix2cd>(rho).eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix2cd& rho) {
  return Eigen::SelfAdjointEigenSolver<Matrix2cd>((rho + rho.adjoint()) / 2.0).eigenvalues().maxCoeff();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("basis vectors") {
  const QubitStated r = basis_plus(MeasurementBasis::Circular);
  CHECK(std::abs(r(1) - Complex<double>(0, 1 / std::sqrt(2.0))) < 1e-15);
  CHECK(fidelity(basis_plus(MeasurementBasis::Diagonal), state_from_angles(kPi / 2, 0.0)) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("simulate_counts on basis and equator states") {
  RandomStream rng(1);
  const BasisCounts h = simulate_counts(basis_state(0), 1000, rng);
  CHECK(h.n_h == 1000);
  CHECK(h.n_v == 0);
  CHECK(h.is_valid());

  const BasisCounts e1 = simulate_counts(state_from_angles(kPi / 2, 0.0), 1000, rng);
  CHECK(e1.n_d == 1000);
  CHECK(e1.total(MeasurementBasis::Circular) == 1000);

  const long n = 100000;
  const BasisCounts e2 = simulate_counts(state_from_angles(kPi / 2, kPi / 4), n, rng);
  const double p = (1 + std::sin(kPi / 4)) / 2;
  CHECK(std::abs(e2.n_r / double(n) - p) <= 3 * std::sqrt(p * (1 - p) / n));
  CHECK(std::abs(e2.n_h / double(n) - 0.5) <= 3 * std::sqrt(0.25 / n));

  CHECK_THROWS_AS(simulate_counts(basis_state(0), 0, rng), std::invalid_argument);
}

TEST_CASE("simulate_counts is seed deterministic") {
  RandomStream a(17), b(17);
  const QubitStated e3 = state_from_angles(2 * std::acos(0.948), 0.890);
  CHECK(simulate_counts(e3, 500, a) == simulate_counts(e3, 500, b));
}

TEST_CASE("linear inversion") {
  BasisCounts c{50, 50, 100, 0, 50, 50};
  Matrix2cd rho = linear_inversion(c);
  CHECK(std::abs(rho(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(rho(0, 1) - 0.5) < 1e-15);

  // All three Stokes components at +1 is outside the Bloch ball.
  BasisCounts corner{1, 0, 1, 0, 1, 0};
  rho = linear_inversion(corner);
  CHECK(max_eigenvalue(rho) == doctest::Approx((1 + std::sqrt(3.0)) / 2).epsilon(1e-12));
  CHECK(min_eigenvalue(rho) < 0.0);

  BasisCounts missing{10, 0, 0, 0, 5, 5};
  CHECK_THROWS_AS(linear_inversion(missing), std::domain_error);
}

TEST_CASE("project_to_physical floors and normalizes") {
  const DensityMatrixd rho = project_to_physical(linear_inversion({1, 0, 1, 0, 1, 0}));
  CHECK(is_density_matrix(rho));
  CHECK(min_eigenvalue(rho) == doctest::Approx(1e-6 / ((1 + std::sqrt(3.0)) / 2 + 1e-6)).epsilon(1e-6));
}

TEST_CASE("Cholesky parametrization round trip") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> g;
  for (int i = 0; i < 1000; ++i) {
    CholeskyParams t(std::abs(g(gen)) + 1e-3, std::abs(g(gen)) + 1e-3, g(gen), g(gen));
    const DensityMatrixd rho = density_from_cholesky(t);
    CHECK(is_density_matrix(rho));
    const CholeskyParams back = cholesky_from_density(rho);
    CHECK((back - t.normalized()).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("log_likelihood edge cases") {
  const DensityMatrixd h = density_from_state(basis_state(0));
  CHECK(log_likelihood(h, {10, 0, 0, 0, 0, 0}) == doctest::Approx(0.0));
  CHECK(std::isinf(log_likelihood(h, {10, 1, 0, 0, 0, 0})));
  const DensityMatrixd mixed = DensityMatrixd::Identity() / 2.0;
  CHECK(log_likelihood(mixed, {3, 3, 3, 3, 3, 3}) == doctest::Approx(18 * std::log(0.5)));
}

TEST_CASE("MLE reaches the truth with many photons") {
  RandomStream rng(5);
  const QubitStated e1 = state_from_angles(kPi / 2, 0.0);
  const BasisCounts counts = simulate_counts(e1, 1000000, rng);
  const ReconstructionResult r = mle_reconstruct(counts, e1);
  CHECK(r.fidelity_vs_truth >= 0.999);
  CHECK(is_density_matrix(r.rho));
}

TEST_CASE("MLE matches a brute-force grid search on a small instance") {
  const BasisCounts counts{2, 0, 2, 0, 1, 1};
  const MleFit fit = mle_fit(counts);
  const DensityMatrixd grid = oracle::grid_mle(counts, 0.02);
  const QubitStated e1 = state_from_angles(kPi / 2, 0.0);
  CHECK(std::abs(fidelity(fit.rho, e1) - fidelity(grid, e1)) < 0.01);
  CHECK((fit.rho - grid).cwiseAbs().maxCoeff() < 0.02);
  CHECK(fit.log_likelihood >= log_likelihood(grid, counts) - 1e-9);
}

TEST_CASE("MLE with only one basis populated") {
  const BasisCounts counts{1000, 0, 0, 0, 0, 0};
  const MleFit fit = mle_fit(counts);
  CHECK(is_density_matrix(fit.rho));
  CHECK(max_eigenvalue(fit.rho) >= 0.99);
  CHECK(fit.rho(0, 0).real() >= 0.99);
  CHECK_THROWS_AS(mle_fit(BasisCounts{}), std::invalid_argument);
  CHECK_THROWS_AS(mle_fit(BasisCounts{-1, 2, 1, 0, 1, 0}), std::invalid_argument);
}

TEST_CASE("MLE is physical and never worse than its start") {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<long> count(0, 40);
  for (int i = 0; i < 200; ++i) {
    const long n = 1 + count(gen);
    std::uniform_int_distribution<long> part(0, n);
    const long h = part(gen), d = part(gen), r = part(gen);
    const BasisCounts c{h, n - h, d, n - d, r, n - r};
    const MleFit fit = mle_fit(c);
    CHECK(is_density_matrix(fit.rho));
    CHECK(fit.log_likelihood >= fit.initial_log_likelihood);
    // The optimum beats the truth-agnostic maximally mixed state too.
    CHECK(fit.log_likelihood >= log_likelihood(DensityMatrixd::Identity() / 2.0, c) - 1e-9);
    CHECK(mle_fit(c).rho == fit.rho);
  }
}

TEST_CASE("MLE fidelity improves with photon number") {
  const QubitStated e3 = state_from_angles(2 * std::acos(0.948), 0.890);
  double previous = 0.0;
  for (long n : {100L, 1000L, 10000L, 100000L}) {
    std::vector<double> f;
    for (int rep = 0; rep < 50; ++rep) {
      RandomStream rng(derive_seed(77, n, rep));
      f.push_back(mle_reconstruct(simulate_counts(e3, n, rng), e3).fidelity_vs_truth);
    }
    const double med = median(f);
    CHECK(med >= previous - 1e-3);
    previous = med;
  }
  CHECK(previous >= 0.999);
}

TEST_CASE("qst_baseline") {
  RandomStream rng(9);
  const QubitStated e1 = state_from_angles(kPi / 2, 0.0);
  const double f = qst_baseline(e1, 3, rng);
  CHECK(f >= 0.0);
  CHECK(f <= 1.0);
  CHECK_THROWS_AS(qst_baseline(e1, 2, rng), std::invalid_argument);

  RandomStream a(10), b(10);
  CHECK(qst_baseline(e1, 48, a) == qst_baseline(e1, 48, b));
}
