// Copyright 2026 The eitent Authors
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

/**
 * @file model.hpp
 * @brief Physical parameters, unit conventions and the twin-beam input state.
 *
 * Units: the excited-state decay rate gamma sets the time unit (gamma = 1
 * after validation) and the coupling density C = N g^2 / c sets the length
 * unit. Quadratures are Y^theta = a e^{-i theta} + a^dag e^{i theta}, so a
 * coherent state has variance 1.
 */
#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "eitent/error.hpp"

namespace eitent {

struct ModelParams {
  double gamma = 1.0;
  // Ground-state relaxation rates. Recorded only: no implemented spectrum
  // depends on them.
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  // Signed Rabi frequencies; the sign is the pi phase of the drive.
  double omega1 = 1.0;
  double omega2 = 1.0;
  double coupling_density = 1.0;
  double r = 1.0;
  double eta = 1.0;
  // 4 m omega_a x^2 / hbar
  double kappa = 1.0;

  bool operator==(const ModelParams&) const = default;
};

/// Checks every invariant and rescales all rates so that gamma == 1.
/// Idempotent on its own output.
inline ModelParams validate_params(const ModelParams& raw) {
  if (!(raw.gamma > 0.0) || !std::isfinite(raw.gamma))
    throw Error(ErrorCode::NonPositiveGamma, "gamma must be > 0");
  if (!(raw.gamma1 >= 0.0) || !(raw.gamma2 >= 0.0))
    throw Error(ErrorCode::NonPositiveGamma, "gamma1, gamma2 must be >= 0");
  if (!(raw.eta >= 0.0 && raw.eta <= 1.0))
    throw Error(ErrorCode::EtaOutOfRange, "eta must lie in [0, 1]");
  if (!std::isfinite(raw.omega1) || !std::isfinite(raw.omega2) ||
      (raw.omega1 == 0.0 && raw.omega2 == 0.0))
    throw Error(ErrorCode::ZeroDrive, "at least one of omega1, omega2 must be nonzero");
  if (!(raw.coupling_density > 0.0) || !std::isfinite(raw.coupling_density))
    throw Error(ErrorCode::NonPositiveCoupling, "coupling density must be > 0");
  if (!(raw.kappa > 0.0) || !std::isfinite(raw.kappa))
    throw Error(ErrorCode::NonPositiveKappa, "kappa must be > 0");
  if (!std::isfinite(raw.r))
    throw Error(ErrorCode::EtaOutOfRange, "r must be finite");

  ModelParams p = raw;
  const double g = raw.gamma;
  p.gamma = 1.0;
  p.gamma1 = raw.gamma1 / g;
  p.gamma2 = raw.gamma2 / g;
  p.omega1 = raw.omega1 / g;
  p.omega2 = raw.omega2 / g;
  p.coupling_density = raw.coupling_density / g;
  return p;
}

/// True when the two drives are equal to relative precision 1e-12.
inline bool equal_rabi(const ModelParams& p) {
  const double scale = std::max(std::abs(p.omega1), std::abs(p.omega2));
  return std::abs(p.omega1 - p.omega2) <= 1e-12 * scale;
}

/// Basis order of every 4-vector and 4x4 matrix in the library.
enum QuadIndex : Eigen::Index {
  kY1Phase0 = 0,
  kY1Phase90 = 1,
  kY2Phase0 = 2,
  kY2Phase90 = 3,
};

/// Symplectic form with [Y^0, Y^{pi/2}] = 2i, i.e. half-commutator entries +-1.
inline Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s(kY1Phase0, kY1Phase90) = 1.0;
  s(kY1Phase90, kY1Phase0) = -1.0;
  s(kY2Phase0, kY2Phase90) = 1.0;
  s(kY2Phase90, kY2Phase0) = -1.0;
  return s;
}

/**
 * Symmetrized quadrature spectral covariance at one (z, delta).
 *
 * `m` is the real symmetric part <dY_a dY_b> in the (Y1^0, Y1^pi/2, Y2^0,
 * Y2^pi/2) basis; vacuum is the identity. Propagation multiplies sideband
 * quadrature amplitudes by complex numbers, so the spectral matrix is in
 * general Hermitian: `k` holds its antisymmetric imaginary part. `k` is zero
 * for the input state and never enters a variance of a real quadrature
 * combination.
 */
struct QuadCovariance {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d k = Eigen::Matrix4d::Zero();

  static QuadCovariance vacuum() { return {}; }

  Eigen::Matrix4cd hermitian() const {
    return m.cast<std::complex<double>>() +
           std::complex<double>(0.0, 1.0) * k.cast<std::complex<double>>();
  }

  static QuadCovariance from_hermitian(const Eigen::Matrix4cd& h) {
    QuadCovariance c;
    const Eigen::Matrix4cd sym = 0.5 * (h + h.adjoint());
    c.m = sym.real();
    c.k = sym.imag();
    return c;
  }

  /// Var(sum_a v_a Y_a) for real coefficients.
  double variance(const Eigen::Vector4d& v) const { return v.dot(m * v); }

  /// Variance with the vacuum value of the same combination removed.
  double normally_ordered_variance(const Eigen::Vector4d& v) const {
    return variance(v) - v.squaredNorm();
  }
};

/**
 * Smallest eigenvalue of H + i Sigma and H - i Sigma. Non-negative (up to
 * rounding) iff the covariance satisfies the uncertainty bound.
 */
inline double uncertainty_margin(const QuadCovariance& cov) {
  const Eigen::Matrix4cd h = cov.hermitian();
  const Eigen::Matrix4cd is =
      std::complex<double>(0.0, 1.0) * symplectic_form().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> plus(h + is, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> minus(h - is, Eigen::EigenvaluesOnly);
  return std::min(plus.eigenvalues().minCoeff(), minus.eigenvalues().minCoeff());
}

inline bool is_physical(const QuadCovariance& cov, double tol = 1e-10) {
  if ((cov.m - cov.m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  if ((cov.m.diagonal().array() < -tol).any()) return false;
  return uncertainty_margin(cov) >= -tol;
}

/// Propagation distance (length units 1/C) and sideband detuning (units of gamma).
struct GridPoint {
  double z = 0.0;
  double delta = 0.0;
};

inline GridPoint validate_grid_point(const GridPoint& g) {
  if (!(g.z >= 0.0) || !std::isfinite(g.z))
    throw Error(ErrorCode::InvalidGridPoint, "z must be finite and >= 0");
  if (!std::isfinite(g.delta))
    throw Error(ErrorCode::InvalidGridPoint, "delta must be finite");
  return g;
}

/**
 * Covariance of the displaced two-mode squeezed input at z = 0, from
 * <da_i^dag da_i> = eta sinh^2 r and <da_1 da_2> = -eta cosh r sinh r.
 */
inline QuadCovariance input_covariance(double r, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw Error(ErrorCode::EtaOutOfRange, "eta must lie in [0, 1]");
  const double diag = 1.0 + 2.0 * eta * std::sinh(r) * std::sinh(r);
  const double cross = eta * std::sinh(2.0 * r);
  QuadCovariance c;
  c.m.diagonal().setConstant(diag);
  c.m(kY1Phase0, kY2Phase0) = c.m(kY2Phase0, kY1Phase0) = -cross;
  c.m(kY1Phase90, kY2Phase90) = c.m(kY2Phase90, kY1Phase90) = cross;
  return c;
}

/// Ground-state coherence <sigma_21> = -O1 O2 / (O1^2 + O2^2) for g1 = g2.
inline double steady_state_coherence(const ModelParams& p) {
  const double norm = p.omega1 * p.omega1 + p.omega2 * p.omega2;
  if (norm == 0.0) throw Error(ErrorCode::ZeroDrive, "no drive present");
  return -p.omega1 * p.omega2 / norm;
}

}  // namespace eitent
