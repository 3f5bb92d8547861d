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
 * @file spectra.hpp
 * @brief Propagation constants, closed-form quadrature spectra and the
 *        conserved/lossy mode transfer model for the full covariance.
 */
#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "eitent/error.hpp"
#include "eitent/model.hpp"

namespace eitent {

struct PropagationConstants {
  double q_a = 0.0;  // absorption rate per unit length, >= 0
  double q_o = 0.0;  // dispersive rotation rate per unit length
};

/// Field 1 is the control, field 2 the probe.
enum class Field { Control = 1, Probe = 2 };
/// Quadrature angle theta = 0 or pi/2.
enum class Phase { Zero, Ninety };

namespace detail {

inline double sq(double x) { return x * x; }

// ((O1 + O2)^2 / 4 - delta^2)^2 + delta^2 gamma^2 / 4
inline double resonance_denominator(const ModelParams& p, double delta) {
  const double d2 = delta * delta;
  return sq(sq(p.omega1 + p.omega2) / 4.0 - d2) + d2 * sq(p.gamma) / 4.0;
}

}  // namespace detail

/**
 * Q_a(delta) = C delta^2 (gamma/2) / [((O1+O2)^2/4 - delta^2)^2 + delta^2 gamma^2/4].
 *
 * When O1 + O2 == 0 the common delta^2 is cancelled analytically, so the
 * carrier value is the finite limit 2C/gamma instead of 0/0.
 */
inline double q_absorption(const ModelParams& p, double delta) {
  const double d2 = delta * delta;
  if (p.omega1 + p.omega2 == 0.0)
    return p.coupling_density * (p.gamma / 2.0) / (d2 + detail::sq(p.gamma) / 4.0);
  if (d2 == 0.0) return 0.0;
  return p.coupling_density * d2 * (p.gamma / 2.0) / detail::resonance_denominator(p, delta);
}

/**
 * Q_o(delta) = C delta (O1^2 + O2^2 - delta^2) / [same denominator as Q_a].
 *
 * For O1 + O2 == 0 the pole at delta = 0 is not removable; the odd-symmetric
 * principal value 0 is returned there.
 */
inline double q_dispersion(const ModelParams& p, double delta) {
  const double d2 = delta * delta;
  const double power = detail::sq(p.omega1) + detail::sq(p.omega2);
  if (delta == 0.0) return 0.0;
  if (p.omega1 + p.omega2 == 0.0)
    return p.coupling_density * (power - d2) / (delta * (d2 + detail::sq(p.gamma) / 4.0));
  return p.coupling_density * delta * (power - d2) / detail::resonance_denominator(p, delta);
}

inline PropagationConstants propagation_constants(const ModelParams& p, double delta) {
  return {q_absorption(p, delta), q_dispersion(p, delta)};
}

namespace detail {

// S_22^{0,0} exactly as the appendix expression, written with explicit drives
// so the label swap and the r -> -r substitution are plain argument changes.
inline double appendix_s22(double o1, double o2, double r, double eta, double qa_z,
                           double qo_z) {
  const double n = o1 * o1 + o2 * o2;
  const double n2 = n * n;
  const double ep = std::exp(2.0 * r);
  const double em = std::exp(-2.0 * r);
  const double constant = -o2 * o2 / n + o2 * o2 * ep * sq(o1 - o2) / (2.0 * n2) +
                          o2 * o2 * em * sq(o1 + o2) / (2.0 * n2);
  const double oscillating = o1 * o2 * em * (o1 * o1 - o2 * o2) / n2 +
                             ep * (o1 * o2 * o2 * o2 - o1 * o1 * o1 * o2) / n2;
  const double decaying = -o1 * o1 / n + o1 * o1 * em * sq(o1 - o2) / (2.0 * n2) +
                          o1 * o1 * ep * sq(o1 + o2) / (2.0 * n2);
  return 1.0 + eta * (constant + std::exp(-qa_z) * std::cos(qo_z) * oscillating +
                      std::exp(-2.0 * qa_z) * decaying);
}

}  // namespace detail

/// Single-field quadrature spectrum S_ii^{theta,theta}(delta, z) from the
/// general closed form; field 1 swaps the drive labels, theta = pi/2 flips r.
inline double full_spectrum(const ModelParams& p, double delta, double z, Field field,
                            Phase theta) {
  const auto [qa, qo] = propagation_constants(p, delta);
  const double r = theta == Phase::Zero ? p.r : -p.r;
  if (field == Field::Probe)
    return detail::appendix_s22(p.omega1, p.omega2, r, p.eta, qa * z, qo * z);
  return detail::appendix_s22(p.omega2, p.omega1, r, p.eta, qa * z, qo * z);
}

inline double full_spectrum_s22(const ModelParams& p, double delta, double z) {
  return full_spectrum(p, delta, z, Field::Probe, Phase::Zero);
}

enum class SpecialCase { StrongControl, Oscillation, EqualRabi, EqualRabiAsymptotic };

/// |O2 / O1| at or below this counts as the strong-control regime.
inline constexpr double kStrongControlRatio = 1e-3;

/**
 * Closed forms for the limiting regimes, used as cross-check targets.
 *
 * StrongControl: control unchanged, probe relaxes as e^{-2 Q_a z}.
 * Oscillation (O2 = O1 (1 +- sqrt 2), Q_a z neglected): the same expression
 * for both fields, as stated for that regime.
 * EqualRabi: theta = 0 squeezes, theta = pi/2 relaxes to its excess.
 * EqualRabiAsymptotic: z -> infinity at delta != 0; z is ignored.
 */
inline double special_case_spectrum(SpecialCase which, const ModelParams& p, double delta,
                                    double z, Phase theta, Field field = Field::Probe) {
  const double r = p.r;
  const double eta = p.eta;
  const double ep = std::exp(2.0 * r);
  const double em = std::exp(-2.0 * r);
  const double qa = q_absorption(p, delta);
  switch (which) {
    case SpecialCase::StrongControl: {
      if (p.omega1 == 0.0 || std::abs(p.omega2 / p.omega1) > kStrongControlRatio)
        throw Error(ErrorCode::CaseMismatch, "strong control requires |omega2/omega1| <= 1e-3");
      const double excess = eta * (em / 2.0 + ep / 2.0 - 1.0);
      if (field == Field::Control) return 1.0 + excess;
      return 1.0 + excess * std::exp(-2.0 * qa * z);
    }
    case SpecialCase::Oscillation: {
      const double ratio = p.omega1 != 0.0 ? p.omega2 / p.omega1 : 0.0;
      const bool minus = std::abs(ratio - (1.0 - std::numbers::sqrt2)) <= 1e-9;
      const bool plus = std::abs(ratio - (1.0 + std::numbers::sqrt2)) <= 1e-9 * (1.0 + std::numbers::sqrt2);
      if (!minus && !plus)
        throw Error(ErrorCode::CaseMismatch, "oscillation requires omega2 = omega1 (1 +- sqrt 2)");
      const double c = std::cos(q_dispersion(p, delta) * z);
      if (theta == Phase::Zero)
        return 1.0 + eta / 4.0 * (1.0 - em) * ((ep + 1.0) * c + ep - 3.0);
      return 1.0 + eta / 4.0 * (1.0 - ep) * ((em + 1.0) * c + em - 3.0);
    }
    case SpecialCase::EqualRabi: {
      if (!equal_rabi(p)) throw Error(ErrorCode::CaseMismatch, "equal Rabi requires omega1 == omega2");
      const double decay = std::exp(-2.0 * qa * z);
      if (theta == Phase::Zero)
        return 1.0 + eta * (0.5 * (ep - 1.0) * decay + 0.5 * (em - 1.0));
      return 1.0 + eta * (0.5 * (ep - 1.0) + 0.5 * (em - 1.0) * decay);
    }
    case SpecialCase::EqualRabiAsymptotic: {
      if (!equal_rabi(p)) throw Error(ErrorCode::CaseMismatch, "equal Rabi requires omega1 == omega2");
      if (!(qa > 0.0)) throw Error(ErrorCode::CaseMismatch, "asymptote requires Q_a(delta) > 0");
      // The asymptotic forms are quoted for a pure input.
      return theta == Phase::Zero ? 0.5 + em / 2.0 : 0.5 + ep / 2.0;
    }
  }
  throw Error(ErrorCode::CaseMismatch, "unknown case");
}

/// Sign s in the lossy-mode amplitude e^{-(q_a + i s q_o) z}. Only the
/// imaginary part of the spectral covariance depends on it.
inline constexpr int kDispersionSign = +1;

/**
 * Conserved mode (O1 a1 + O2 a2)/|O| passes unchanged; the orthogonal lossy
 * mode (-O2 a1 + O1 a2)/|O| is attenuated with amplitude_transfer and
 * refilled with vacuum noise of weight vacuum_fill.
 */
struct TransferModel {
  Eigen::Vector2d conserved_mode;
  Eigen::Vector2d lossy_mode;
  std::complex<double> amplitude_transfer{1.0, 0.0};
  double vacuum_fill = 0.0;

  /// Rows map (Y1^0, Y1^90, Y2^0, Y2^90) to (B^0, B^90, D^0, D^90).
  Eigen::Matrix4d mode_rotation() const {
    Eigen::Matrix4d rot = Eigen::Matrix4d::Zero();
    for (int q = 0; q < 2; ++q) {
      rot(q, kY1Phase0 + q) = conserved_mode(0);
      rot(q, kY2Phase0 + q) = conserved_mode(1);
      rot(2 + q, kY1Phase0 + q) = lossy_mode(0);
      rot(2 + q, kY2Phase0 + q) = lossy_mode(1);
    }
    return rot;
  }
};

inline TransferModel transfer_model(const ModelParams& p, double delta, double z,
                                    int sign = kDispersionSign) {
  validate_grid_point({z, delta});
  const double norm = std::hypot(p.omega1, p.omega2);
  if (norm == 0.0) throw Error(ErrorCode::ZeroDrive, "no drive present");
  const auto [qa, qo] = propagation_constants(p, delta);
  TransferModel tm;
  tm.conserved_mode = Eigen::Vector2d(p.omega1 / norm, p.omega2 / norm);
  tm.lossy_mode = Eigen::Vector2d(-p.omega2 / norm, p.omega1 / norm);
  tm.amplitude_transfer = std::exp(std::complex<double>(-qa * z, -sign * qo * z));
  tm.vacuum_fill = -std::expm1(-2.0 * qa * z);
  return tm;
}

/// Applies the lossy channel to any covariance expressed in the field basis.
inline QuadCovariance apply_transfer(const TransferModel& tm, const QuadCovariance& in) {
  using C = std::complex<double>;
  const Eigen::Matrix4cd rot = tm.mode_rotation().cast<C>();
  Eigen::Matrix4cd modes = rot * in.hermitian() * rot.transpose();
  Eigen::Vector4cd t(1.0, 1.0, tm.amplitude_transfer, tm.amplitude_transfer);
  modes = t.asDiagonal() * modes * t.conjugate().asDiagonal();
  modes(2, 2) += tm.vacuum_fill;
  modes(3, 3) += tm.vacuum_fill;
  return QuadCovariance::from_hermitian(rot.transpose() * modes * rot);
}

/// Full 4x4 field covariance after propagating the twin-beam input to z.
inline QuadCovariance covariance_at(const ModelParams& p, double delta, double z) {
  return apply_transfer(transfer_model(p, delta, z), input_covariance(p.r, p.eta));
}

}  // namespace eitent
