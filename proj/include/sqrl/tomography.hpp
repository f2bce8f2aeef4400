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

/// \file tomography.hpp
/// Three-basis single-qubit tomography with a maximum-likelihood fit.
///
/// Counts are taken in the H/V, D/A = (H +- V)/sqrt2 and R/L = (H +- iV)/sqrt2
/// bases with an equal photon allocation. The fit maximizes the product of
/// binomial likelihoods over rho(t) = T^dagger T / tr(T^dagger T), where T is
/// lower triangular with real diagonal:
///
///     T = [ t1          0  ]
///         [ t3 + i t4   t2 ]
///
/// so every candidate is a physical density matrix.

#include "sqrl/core.hpp"
#include "sqrl/random.hpp"

#include <array>

namespace sqrl {

enum class MeasurementBasis { Computational, Diagonal, Circular };

inline constexpr std::array<MeasurementBasis, 3> kTomographyBases = {
    MeasurementBasis::Computational, MeasurementBasis::Diagonal, MeasurementBasis::Circular};

/// The "+" eigenvector of a basis: |H>, |D> or |R>.
QubitStated basis_plus(MeasurementBasis basis);

struct BasisCounts {
  long n_h = 0, n_v = 0;
  long n_d = 0, n_a = 0;
  long n_r = 0, n_l = 0;

  long plus(MeasurementBasis basis) const;
  long minus(MeasurementBasis basis) const;
  long total(MeasurementBasis basis) const { return plus(basis) + minus(basis); }

  /// Non-negative counts with the same total in every basis.
  bool is_valid() const;
  bool operator==(const BasisCounts&) const = default;
};

/// One binomial draw per basis, in computational, diagonal, circular order.
BasisCounts simulate_counts(const QubitStated& env, long photons_per_basis, RandomStream& rng);

/// Stokes reconstruction (I + s.sigma)/2. The result may have a negative
/// eigenvalue and is returned anyway. Throws std::domain_error when a basis
/// has no counts.
Matrix2cd linear_inversion(const BasisCounts& counts);

/// Floors eigenvalues at `floor`, then rescales to unit trace.
DensityMatrixd project_to_physical(const Matrix2cd& hermitian, double floor = 1e-6);

/// Sum over bases of n+ log p+ + n- log p-. Terms with zero count are
/// dropped; a positive count against a zero probability gives -inf.
double log_likelihood(const DensityMatrixd& rho, const BasisCounts& counts);

using CholeskyParams = Eigen::Vector4d;

DensityMatrixd density_from_cholesky(const CholeskyParams& t);

/// Inverse of density_from_cholesky for a full-rank rho (unit-norm t).
CholeskyParams cholesky_from_density(const DensityMatrixd& rho);

struct MleOptions {
  /// Stop once an optimizer round gains less log-likelihood than this.
  double tolerance = 1e-10;
  int max_rounds = 10000;
};

struct MleFit {
  DensityMatrixd rho;
  double log_likelihood = 0.0;
  /// Log-likelihood of the projected linear-inversion start.
  double initial_log_likelihood = 0.0;
  int iterations_used = 0;
};

/// Maximum-likelihood density matrix for the counts. Deterministic.
///
/// Starts from the linear-inversion estimate with eigenvalues floored at
/// 1e-6. A basis without counts adds nothing to the likelihood and a zero
/// Stokes component to the start. Throws std::invalid_argument when there are
/// no counts at all and std::runtime_error if the optimum is not finite.
MleFit mle_fit(const BasisCounts& counts, const MleOptions& options = {});

struct ReconstructionResult {
  DensityMatrixd rho;
  double fidelity_vs_truth = 0.0;
  double log_likelihood = 0.0;
  int iterations_used = 0;
};

ReconstructionResult mle_reconstruct(const BasisCounts& counts, const QubitStated& truth,
                                     const MleOptions& options = {});

/// Splits total_photons / 3 photons per basis (remainder discarded), then
/// simulates and reconstructs. Returns the fidelity against env.
double qst_baseline(const QubitStated& env, long total_photons, RandomStream& rng);

}  // namespace sqrl
