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

#include "sqrl/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace sqrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SimplexResult {
  CholeskyParams x;
  double value;
};

// Nelder-Mead minimization on R^4 with the standard coefficients
// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
template <typename Objective>
SimplexResult nelder_mead(const Objective& f, const CholeskyParams& start, double step,
                          int max_iterations, double value_tolerance) {
  constexpr int kDim = 4;
  std::array<CholeskyParams, kDim + 1> points;
  std::array<double, kDim + 1> values;
  points[0] = start;
  for (int i = 0; i < kDim; ++i) {
    points[i + 1] = start;
    points[i + 1](i) += step;
  }
  for (int i = 0; i <= kDim; ++i) values[i] = f(points[i]);

  std::array<int, kDim + 1> order;
  for (int iter = 0; iter < max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
    const int best = order.front();
    const int worst = order.back();
    const int second_worst = order[kDim - 1];

    if (std::isfinite(values[worst]) &&
        values[worst] - values[best] <= value_tolerance * (1.0 + std::abs(values[best]))) {
      break;
    }

    CholeskyParams centroid = CholeskyParams::Zero();
    for (int i = 0; i < kDim; ++i) centroid += points[order[i]];
    centroid /= kDim;

    const CholeskyParams reflected = centroid + (centroid - points[worst]);
    const double f_reflected = f(reflected);
    if (f_reflected < values[best]) {
      const CholeskyParams expanded = centroid + 2.0 * (centroid - points[worst]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        points[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        points[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      points[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < values[worst];
    const CholeskyParams contracted =
        outside ? CholeskyParams(centroid + 0.5 * (reflected - centroid))
                : CholeskyParams(centroid + 0.5 * (points[worst] - centroid));
    const double f_contracted = f(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      points[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }

    for (int i = 0; i <= kDim; ++i) {
      if (i == best) continue;
      points[i] = points[best] + 0.5 * (points[i] - points[best]);
      values[i] = f(points[i]);
    }
  }

  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  return {points[best], values[best]};
}

void require_usable(const BasisCounts& counts) {
  if (std::min({counts.n_h, counts.n_v, counts.n_d, counts.n_a, counts.n_r, counts.n_l}) < 0) {
    throw std::invalid_argument("basis counts must be non-negative");
  }
  if (counts.n_h + counts.n_v + counts.n_d + counts.n_a + counts.n_r + counts.n_l < 1) {
    throw std::invalid_argument("maximum-likelihood fit needs at least one count");
  }
}

// Stokes start for the fit; a basis without counts contributes 0.
Matrix2cd stokes_start(const BasisCounts& counts) {
  const std::array<MeasurementBasis, 3> axes = {
      MeasurementBasis::Diagonal, MeasurementBasis::Circular, MeasurementBasis::Computational};
  BlochVectord stokes = BlochVectord::Zero();
  for (int i = 0; i < 3; ++i) {
    const long total = counts.total(axes[i]);
    if (total > 0) {
      stokes(i) = static_cast<double>(counts.plus(axes[i]) - counts.minus(axes[i])) /
                  static_cast<double>(total);
    }
  }
  return density_from_bloch(stokes);
}

}  // namespace

QubitStated basis_plus(MeasurementBasis basis) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (basis) {
    case MeasurementBasis::Computational:
      return {1.0, 0.0};
    case MeasurementBasis::Diagonal:
      return {r, r};
    case MeasurementBasis::Circular:
      return {Complex<double>(r, 0.0), Complex<double>(0.0, r)};
  }
  throw std::logic_error("unknown basis");
}

long BasisCounts::plus(MeasurementBasis basis) const {
  switch (basis) {
    case MeasurementBasis::Computational:
      return n_h;
    case MeasurementBasis::Diagonal:
      return n_d;
    case MeasurementBasis::Circular:
      return n_r;
  }
  return 0;
}

long BasisCounts::minus(MeasurementBasis basis) const {
  switch (basis) {
    case MeasurementBasis::Computational:
      return n_v;
    case MeasurementBasis::Diagonal:
      return n_a;
    case MeasurementBasis::Circular:
      return n_l;
  }
  return 0;
}

bool BasisCounts::is_valid() const {
  if (std::min({n_h, n_v, n_d, n_a, n_r, n_l}) < 0) return false;
  return n_h + n_v == n_d + n_a && n_d + n_a == n_r + n_l;
}

BasisCounts simulate_counts(const QubitStated& env, long photons_per_basis, RandomStream& rng) {
  if (photons_per_basis < 1) throw std::invalid_argument("photons_per_basis must be >= 1");
  BasisCounts counts;
  std::array<long*, 3> plus = {&counts.n_h, &counts.n_d, &counts.n_r};
  std::array<long*, 3> minus = {&counts.n_v, &counts.n_a, &counts.n_l};
  for (std::size_t b = 0; b < kTomographyBases.size(); ++b) {
    const double p = fidelity(basis_plus(kTomographyBases[b]), env);
    std::binomial_distribution<long> draw(photons_per_basis, p);
    *plus[b] = draw(rng.engine());
    *minus[b] = photons_per_basis - *plus[b];
  }
  return counts;
}

Matrix2cd linear_inversion(const BasisCounts& counts) {
  BlochVectord stokes;
  // Bloch components ordered x, y, z.
  const std::array<MeasurementBasis, 3> axes = {
      MeasurementBasis::Diagonal, MeasurementBasis::Circular, MeasurementBasis::Computational};
  for (int i = 0; i < 3; ++i) {
    const long total = counts.total(axes[i]);
    if (total == 0) throw std::domain_error("linear_inversion: a basis has zero counts");
    stokes(i) = static_cast<double>(counts.plus(axes[i]) - counts.minus(axes[i])) /
                static_cast<double>(total);
  }
  return density_from_bloch(stokes);
}

DensityMatrixd project_to_physical(const Matrix2cd& hermitian, double floor) {
  const Matrix2cd sym = (hermitian + hermitian.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix2cd> eig(sym);
  Eigen::Vector2d values = eig.eigenvalues().cwiseMax(floor);
  values /= values.sum();
  const Matrix2cd& vecs = eig.eigenvectors();
  DensityMatrixd rho = vecs * values.cast<Complex<double>>().asDiagonal() * vecs.adjoint();
  return (rho + rho.adjoint()) / 2.0;
}

double log_likelihood(const DensityMatrixd& rho, const BasisCounts& counts) {
  double total = 0.0;
  for (const auto basis : kTomographyBases) {
    const QubitStated plus = basis_plus(basis);
    const double p = std::clamp((plus.adjoint() * rho * plus)(0, 0).real(), 0.0, 1.0);
    const double q = 1.0 - p;
    const long np = counts.plus(basis);
    const long nm = counts.minus(basis);
    if (np > 0) total += p > 0.0 ? static_cast<double>(np) * std::log(p) : -kInf;
    if (nm > 0) total += q > 0.0 ? static_cast<double>(nm) * std::log(q) : -kInf;
  }
  return total;
}

DensityMatrixd density_from_cholesky(const CholeskyParams& t) {
  const Complex<double> c(t(2), t(3));
  const double norm = t.squaredNorm();
  DensityMatrixd rho;
  rho(0, 0) = t(0) * t(0) + std::norm(c);
  rho(0, 1) = std::conj(c) * t(1);
  rho(1, 0) = c * t(1);
  rho(1, 1) = t(1) * t(1);
  return rho / norm;
}

CholeskyParams cholesky_from_density(const DensityMatrixd& rho) {
  const double t2 = std::sqrt(std::max(0.0, rho(1, 1).real()));
  const Complex<double> c = t2 > 0.0 ? rho(1, 0) / t2 : Complex<double>(0.0);
  const double t1 = std::sqrt(std::max(0.0, rho(0, 0).real() - std::norm(c)));
  CholeskyParams t(t1, t2, c.real(), c.imag());
  return t.normalized();
}

MleFit mle_fit(const BasisCounts& counts, const MleOptions& options) {
  require_usable(counts);

  const auto negative_ll = [&counts](const CholeskyParams& t) {
    if (!(t.squaredNorm() > 1e-300)) return kInf;
    const double ll = log_likelihood(density_from_cholesky(t), counts);
    return std::isnan(ll) ? kInf : -ll;
  };

  const DensityMatrixd start = project_to_physical(stokes_start(counts));
  CholeskyParams best = cholesky_from_density(start);
  double best_value = negative_ll(best);

  MleFit fit;
  fit.initial_log_likelihood = log_likelihood(start, counts);
  int rounds = 0;
  while (rounds < options.max_rounds) {
    ++rounds;
    const SimplexResult round = nelder_mead(negative_ll, best, 0.1, 4000, 1e-14);
    const double gain = best_value - round.value;
    if (round.value < best_value) {
      best = round.x.normalized();
      best_value = round.value;
    }
    if (!(gain >= options.tolerance)) break;
  }

  if (!std::isfinite(best_value)) {
    throw std::runtime_error("maximum-likelihood fit did not reach a finite log-likelihood");
  }
  fit.rho = density_from_cholesky(best);
  fit.log_likelihood = log_likelihood(fit.rho, counts);
  // The round trip through t can cost an ulp; never return less than the start.
  if (!(fit.log_likelihood >= fit.initial_log_likelihood)) {
    fit.rho = start;
    fit.log_likelihood = fit.initial_log_likelihood;
  }
  fit.iterations_used = rounds;
  return fit;
}

ReconstructionResult mle_reconstruct(const BasisCounts& counts, const QubitStated& truth,
                                     const MleOptions& options) {
  const MleFit fit = mle_fit(counts, options);
  return {fit.rho, fidelity(fit.rho, truth), fit.log_likelihood, fit.iterations_used};
}

double qst_baseline(const QubitStated& env, long total_photons, RandomStream& rng) {
  if (total_photons < 3) throw std::invalid_argument("qst_baseline needs at least 3 photons");
  const BasisCounts counts = simulate_counts(env, total_photons / 3, rng);
  return mle_reconstruct(counts, env).fidelity_vs_truth;
}

}  // namespace sqrl
