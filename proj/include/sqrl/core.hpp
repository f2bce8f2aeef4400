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

/// \file core.hpp
/// Single-qubit linear algebra: pure states, 2x2 unitaries, density
/// matrices and the register-entangling CNOT.
///
/// Everything here is a thin layer over fixed-size Eigen types. States and
/// operators are plain values; global phase is never normalized away, so
/// state comparisons go through fidelity().
///
/// Basis convention: |0> == |H>, |1> == |V>.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqrl {

template <typename Scalar>
using Complex = std::complex<Scalar>;

template <typename Scalar>
using QubitState = Eigen::Matrix<Complex<Scalar>, 2, 1>;

/// Amplitudes in |ER> order: |00>, |01>, |10>, |11>.
template <typename Scalar>
using TwoQubitState = Eigen::Matrix<Complex<Scalar>, 4, 1>;

template <typename Scalar>
using Matrix2c = Eigen::Matrix<Complex<Scalar>, 2, 2>;

template <typename Scalar>
using Unitary2 = Matrix2c<Scalar>;

template <typename Scalar>
using DensityMatrix = Matrix2c<Scalar>;

template <typename Scalar>
using BlochVector = Eigen::Matrix<Scalar, 3, 1>;

using QubitStated = QubitState<double>;
using TwoQubitStated = TwoQubitState<double>;
using Matrix2cd = Matrix2c<double>;
using Unitary2d = Unitary2<double>;
using DensityMatrixd = DensityMatrix<double>;
using BlochVectord = BlochVector<double>;

namespace tol {
/// Algebraic identities on single operations.
inline constexpr double kAlgebraic = 1e-12;
/// Products accumulated over a full episode.
inline constexpr double kAccumulated = 1e-9;
/// Smallest eigenvalue still accepted as positive semidefinite.
inline constexpr double kEigenFloor = 1e-10;
}  // namespace tol

/// Which operator the rotation exponent e^{-i S alpha} uses.
///
/// HalfPauli (S = sigma/2) rotates the Bloch vector by exactly alpha, so an
/// exploration window of 2*pi covers the whole sphere. FullPauli (S = sigma)
/// doubles every effective angle.
enum class GeneratorConvention { HalfPauli, FullPauli };

inline double generator_scale(GeneratorConvention convention) {
  return convention == GeneratorConvention::HalfPauli ? 0.5 : 1.0;
}

// ---------------------------------------------------------------------------
// Construction and validation

template <typename Scalar>
bool is_finite(const Complex<Scalar>& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!is_finite(m(i))) return false;
  }
  return true;
}

template <typename Derived>
bool is_normalized(const Eigen::MatrixBase<Derived>& v,
                   double tolerance = tol::kAlgebraic) {
  return all_finite(v) && std::abs(v.squaredNorm() - 1.0) <= tolerance;
}

/// Largest entrywise deviation of u u^dagger from the identity.
template <typename Scalar>
Scalar unitarity_defect(const Unitary2<Scalar>& u) {
  return (u * u.adjoint() - Matrix2c<Scalar>::Identity()).cwiseAbs().maxCoeff();
}

template <typename Scalar>
bool is_unitary(const Unitary2<Scalar>& u, double tolerance = tol::kAlgebraic) {
  return all_finite(u) && unitarity_defect(u) <= tolerance &&
         std::abs(std::abs(u.determinant()) - 1.0) <= tolerance;
}

template <typename Scalar>
bool is_hermitian(const Matrix2c<Scalar>& h, double tolerance = tol::kAlgebraic) {
  return all_finite(h) && (h - h.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

template <typename Scalar>
bool is_density_matrix(const DensityMatrix<Scalar>& rho,
                       double hermitian_tol = tol::kAlgebraic,
                       double trace_tol = tol::kAlgebraic,
                       double eigen_floor = tol::kEigenFloor) {
  if (!is_hermitian(rho, hermitian_tol)) return false;
  if (std::abs(rho.trace() - Complex<Scalar>(1)) > trace_tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix2c<Scalar>> eig(rho, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -eigen_floor;
}

/// Builds a state from explicit amplitudes. Rejects non-finite input and
/// anything off the unit sphere by more than 1e-12.
template <typename Scalar = double>
QubitState<Scalar> make_state(Complex<Scalar> a0, Complex<Scalar> a1) {
  QubitState<Scalar> s(a0, a1);
  if (!all_finite(s)) throw std::invalid_argument("make_state: non-finite amplitude");
  if (!is_normalized(s)) throw std::invalid_argument("make_state: amplitudes are not unit norm");
  return s;
}

template <typename Scalar = double>
QubitState<Scalar> basis_state(int bit) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("basis_state: bit must be 0 or 1");
  return bit == 0 ? QubitState<Scalar>(1, 0) : QubitState<Scalar>(0, 1);
}

/// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, theta in [0, pi].
template <typename Scalar = double>
QubitState<Scalar> state_from_angles(Scalar theta, Scalar phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw std::domain_error("state_from_angles: non-finite angle");
  }
  if (theta < Scalar(0) || theta > std::numbers::pi_v<Scalar>) {
    throw std::domain_error("state_from_angles: theta outside [0, pi]");
  }
  return QubitState<Scalar>(std::cos(theta / 2),
                            std::polar(std::sin(theta / 2), phi));
}

// ---------------------------------------------------------------------------
// Overlaps

/// |<a|b>|^2, clamped to [0, 1] against rounding.
template <typename Scalar>
Scalar fidelity(const QubitState<Scalar>& a, const QubitState<Scalar>& b) {
  return std::clamp(std::norm(a.dot(b)), Scalar(0), Scalar(1));
}

/// <psi|rho|psi> for a density matrix against a pure reference.
template <typename Scalar>
Scalar fidelity(const DensityMatrix<Scalar>& rho, const QubitState<Scalar>& psi) {
  return std::clamp((psi.adjoint() * rho * psi)(0, 0).real(), Scalar(0), Scalar(1));
}

// ---------------------------------------------------------------------------
// Operators

template <typename Scalar = double>
Matrix2c<Scalar> pauli_x() {
  Matrix2c<Scalar> m;
  m << 0, 1, 1, 0;
  return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> pauli_y() {
  const Complex<Scalar> i(0, 1);
  Matrix2c<Scalar> m;
  m << Scalar(0), -i, i, Scalar(0);
  return m;
}

template <typename Scalar = double>
Matrix2c<Scalar> pauli_z() {
  Matrix2c<Scalar> m;
  m << 1, 0, 0, -1;
  return m;
}

/// The generator S entering e^{-i S alpha}.
template <typename Scalar = double>
Matrix2c<Scalar> spin_x(GeneratorConvention c = GeneratorConvention::HalfPauli) {
  return pauli_x<Scalar>() * Scalar(generator_scale(c));
}

template <typename Scalar = double>
Matrix2c<Scalar> spin_y(GeneratorConvention c = GeneratorConvention::HalfPauli) {
  return pauli_y<Scalar>() * Scalar(generator_scale(c));
}

template <typename Scalar = double>
Matrix2c<Scalar> spin_z(GeneratorConvention c = GeneratorConvention::HalfPauli) {
  return pauli_z<Scalar>() * Scalar(generator_scale(c));
}

/// e^{-i alpha H} for any Hermitian 2x2 H.
///
/// Splits H = (tr H / 2) I + K with K traceless, K^2 = r^2 I, which gives
/// e^{-i alpha H} = e^{-i alpha tr H / 2} (cos(alpha r) I - i sin(alpha r)/r K).
template <typename Scalar>
Unitary2<Scalar> exp_hermitian(const Matrix2c<Scalar>& h, Scalar alpha) {
  const Complex<Scalar> i(0, 1);
  const Scalar half_trace = h.trace().real() / 2;
  const Matrix2c<Scalar> k = h - half_trace * Matrix2c<Scalar>::Identity();
  const Scalar r = std::sqrt(std::max(Scalar(0), -k.determinant().real()));
  // sin(alpha r)/r -> alpha as r -> 0
  const Scalar sinc = r > Scalar(1e-300) ? std::sin(alpha * r) / r : alpha;
  const Unitary2<Scalar> traceless =
      std::cos(alpha * r) * Matrix2c<Scalar>::Identity() - i * sinc * k;
  return std::exp(-i * alpha * half_trace) * traceless;
}

/// e^{-i S_x alpha}: cos(alpha/2) on the diagonal, -i sin(alpha/2) off it
/// (half-Pauli convention).
template <typename Scalar = double>
Unitary2<Scalar> rot_x(Scalar alpha,
                       GeneratorConvention c = GeneratorConvention::HalfPauli) {
  const Scalar a = alpha * Scalar(generator_scale(c));
  const Complex<Scalar> off(0, -std::sin(a));
  Unitary2<Scalar> u;
  u << std::cos(a), off, off, std::cos(a);
  return u;
}

/// e^{-i S_z alpha} = diag(e^{-i alpha/2}, e^{i alpha/2}) (half-Pauli).
template <typename Scalar = double>
Unitary2<Scalar> rot_z(Scalar alpha,
                       GeneratorConvention c = GeneratorConvention::HalfPauli) {
  const Scalar a = alpha * Scalar(generator_scale(c));
  Unitary2<Scalar> u = Unitary2<Scalar>::Zero();
  u(0, 0) = std::polar(Scalar(1), -a);
  u(1, 1) = std::polar(Scalar(1), a);
  return u;
}

template <typename Scalar>
Unitary2<Scalar> compose(const Unitary2<Scalar>& u, const Unitary2<Scalar>& v) {
  return u * v;
}

template <typename Scalar>
Unitary2<Scalar> adjoint(const Unitary2<Scalar>& u) {
  return u.adjoint();
}

template <typename Scalar>
QubitState<Scalar> apply(const Unitary2<Scalar>& u, const QubitState<Scalar>& s) {
  return u * s;
}

/// u g u^dagger: the generator g expressed in the frame carried by u.
template <typename Scalar>
Matrix2c<Scalar> conjugate_frame(const Unitary2<Scalar>& u, const Matrix2c<Scalar>& g) {
  return u * g * u.adjoint();
}

/// Closest unitary in Frobenius norm (polar factor W V^dagger of the SVD).
template <typename Scalar>
Unitary2<Scalar> nearest_unitary(const Matrix2c<Scalar>& m) {
  Eigen::JacobiSVD<Matrix2c<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// ---------------------------------------------------------------------------
// Register interaction

/// CNOT with the environment as control and a register prepared in |0>:
/// a0|0>+a1|1>  ->  a0|00> + a1|11>.
template <typename Scalar>
TwoQubitState<Scalar> cnot_with_fresh_register(const QubitState<Scalar>& env) {
  TwoQubitState<Scalar> joint = TwoQubitState<Scalar>::Zero();
  joint(0) = env(0);
  joint(3) = env(1);
  return joint;
}

/// Born probability of reading the register (second qubit) as m.
template <typename Scalar>
Scalar register_probability(const TwoQubitState<Scalar>& joint, int m) {
  return m == 0 ? std::norm(joint(0)) + std::norm(joint(2))
                : std::norm(joint(1)) + std::norm(joint(3));
}

// ---------------------------------------------------------------------------
// Bloch-sphere helpers

template <typename Scalar>
DensityMatrix<Scalar> density_from_state(const QubitState<Scalar>& s) {
  return s * s.adjoint();
}

template <typename Scalar>
BlochVector<Scalar> bloch_vector(const DensityMatrix<Scalar>& rho) {
  return {2 * rho(1, 0).real(), 2 * rho(1, 0).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

template <typename Scalar>
BlochVector<Scalar> bloch_vector(const QubitState<Scalar>& s) {
  return bloch_vector<Scalar>(density_from_state(s));
}

/// (I + r . sigma) / 2. No physicality check: |r| > 1 is returned as is.
template <typename Scalar>
Matrix2c<Scalar> density_from_bloch(const BlochVector<Scalar>& r) {
  return (Matrix2c<Scalar>::Identity() + r(0) * pauli_x<Scalar>() +
          r(1) * pauli_y<Scalar>() + r(2) * pauli_z<Scalar>()) /
         Scalar(2);
}

}  // namespace sqrl
