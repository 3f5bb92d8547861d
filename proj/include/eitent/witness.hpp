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
 * @file witness.hpp
 * @brief Tri-partite separability witnesses I1 (field-field), I2 and I3
 *        (field-atom), the genuine-entanglement sum and the field-only
 *        measurement route.
 *
 * Witness values are stored in the normally ordered convention unless a
 * report is explicitly converted. In that convention a value below its
 * threshold certifies entanglement:
 *
 *   I1 < 0,  I2 < 1 - kappa,  I3 < 1 - kappa,  I1 + I2 + I3 < -6 - 2 kappa.
 *
 * The Absolute convention adds the vacuum contributions back; every
 * threshold becomes 4 and the conversion is a fixed per-inequality offset.
 */
#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "eitent/error.hpp"
#include "eitent/model.hpp"
#include "eitent/spectra.hpp"

namespace eitent {

enum class Convention { NormallyOrdered, Absolute };

struct Thresholds {
  double pair = 0.0;
  double hybrid = 0.0;
  double genuine = 0.0;
};

inline Thresholds thresholds(Convention c, double kappa) {
  if (c == Convention::Absolute) return {4.0, 4.0, 4.0};
  return {0.0, 1.0 - kappa, -6.0 - 2.0 * kappa};
}

/// Absolute minus normally ordered value, per inequality.
inline Eigen::Vector3d convention_offsets(double kappa) {
  return {4.0, 3.0 + kappa, 3.0 + kappa};
}

struct WitnessReport {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double sum = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  // Sign applied to h1 (for i3) and h2 (for i2) on the covariance route.
  int h1_sign = 1;
  int h2_sign = 1;
  double kappa = 1.0;
  Convention convention = Convention::NormallyOrdered;
  Thresholds limits;
  bool fields_entangled = false;         // i1 below threshold
  bool control_atom_entangled = false;   // i2 below threshold
  bool probe_atom_entangled = false;     // i3 below threshold
  bool genuine_tripartite = false;       // sum below genuine threshold
};

/// Violations smaller than this are treated as rounding, not entanglement.
inline constexpr double kVerdictMargin = 1e-12;

inline WitnessReport make_report(double i1, double i2, double i3, double h1, double h2,
                                 double kappa, Convention convention = Convention::NormallyOrdered) {
  WitnessReport rep;
  rep.i1 = i1;
  rep.i2 = i2;
  rep.i3 = i3;
  rep.sum = i1 + i2 + i3;
  rep.h1 = h1;
  rep.h2 = h2;
  rep.kappa = kappa;
  rep.convention = convention;
  rep.limits = thresholds(convention, kappa);
  rep.fields_entangled = i1 < rep.limits.pair - kVerdictMargin;
  rep.control_atom_entangled = i2 < rep.limits.hybrid - kVerdictMargin;
  rep.probe_atom_entangled = i3 < rep.limits.hybrid - kVerdictMargin;
  rep.genuine_tripartite = rep.sum < rep.limits.genuine - kVerdictMargin;
  return rep;
}

inline WitnessReport convert(const WitnessReport& rep, Convention to) {
  if (rep.convention == to) return rep;
  const Eigen::Vector3d off = convention_offsets(rep.kappa);
  const double s = to == Convention::Absolute ? 1.0 : -1.0;
  WitnessReport out = make_report(rep.i1 + s * off(0), rep.i2 + s * off(1), rep.i3 + s * off(2),
                                  rep.h1, rep.h2, rep.kappa, to);
  out.h1_sign = rep.h1_sign;
  out.h2_sign = rep.h2_sign;
  return out;
}

inline bool genuine_verdict(const WitnessReport& rep) {
  return rep.sum < rep.limits.genuine - kVerdictMargin;
}

namespace detail {

// Closed-form hybrid witness for gain h at x = z Q_a (equal drives, pure input).
inline double hybrid_closed_form(double r, double x, double h) {
  const double ep = std::exp(2.0 * r);
  const double em = std::exp(-2.0 * r);
  const double c = std::cosh(2.0 * r) - 1.0;
  const double decaying = 0.5 * h * h * ep - 0.5 * h * h + h * ep - h + c;
  const double constant = 0.5 * h * h * em - 0.5 * h * h - h * em + h + c;
  return decaying * std::exp(-2.0 * x) + constant;
}

}  // namespace detail

/**
 * Closed-form witnesses at x = z Q_a for O1 == O2. The expressions describe a
 * pure input, so eta does not enter; h1 and h2 are used as given.
 */
inline WitnessReport witness_closed_form(const ModelParams& p, double x, double h1, double h2) {
  if (!equal_rabi(p)) throw Error(ErrorCode::RegimeError, "closed forms require omega1 == omega2");
  if (!(x >= 0.0)) throw Error(ErrorCode::InvalidGridPoint, "x = z Q_a must be >= 0");
  const double em = std::exp(-2.0 * p.r);
  const double i1 = (2.0 * em - 2.0) * std::exp(-2.0 * x) + 2.0 * em - 2.0;
  return make_report(i1, detail::hybrid_closed_form(p.r, x, h2),
                     detail::hybrid_closed_form(p.r, x, h1), h1, h2, p.kappa);
}

/// Vertex of the closed-form hybrid witness as a quadratic in h. Only defined
/// while the h^2 coefficient is positive (x < r); beyond that the witness is
/// unbounded below in h.
struct GainOptimum {
  bool defined = false;
  double h = 0.0;
  double value = 0.0;
};

inline GainOptimum optimal_gain(const ModelParams& p, double x) {
  if (!equal_rabi(p)) throw Error(ErrorCode::RegimeError, "closed forms require omega1 == omega2");
  const double ep = std::exp(2.0 * p.r);
  const double em = std::exp(-2.0 * p.r);
  const double decay = std::exp(-2.0 * x);
  const double quad = 0.5 * (ep - 1.0) * decay + 0.5 * (em - 1.0);
  const double lin = (ep - 1.0) * decay - (em - 1.0);
  if (!(quad > 1e-12 * (ep + 1.0))) return {};  // flat or concave: no vertex
  const double h = -lin / (2.0 * quad);
  return {true, h, detail::hybrid_closed_form(p.r, x, h)};
}

/**
 * The atomic terms cancel (and the field-only witness forms hold) only if the
 * summed quadratures Y1^0 + Y2^0 and Y1^90 + Y2^90 are unchanged by the
 * propagation. The certificate records that check for one output covariance.
 */
struct ConservationCertificate {
  bool holds = false;
  double tolerance = 0.0;
  double deviation_phase0 = 0.0;
  double deviation_phase90 = 0.0;
  QuadCovariance certified;
};

inline Eigen::Vector4d sum_combination(Phase theta) {
  return theta == Phase::Zero ? Eigen::Vector4d(1, 0, 1, 0) : Eigen::Vector4d(0, 1, 0, 1);
}

inline ConservationCertificate certify_conservation(const QuadCovariance& in,
                                                    const QuadCovariance& out, double tol) {
  ConservationCertificate cert;
  cert.tolerance = tol;
  cert.deviation_phase0 = std::abs(out.variance(sum_combination(Phase::Zero)) -
                                   in.variance(sum_combination(Phase::Zero)));
  cert.deviation_phase90 = std::abs(out.variance(sum_combination(Phase::Ninety)) -
                                    in.variance(sum_combination(Phase::Ninety)));
  cert.holds = cert.deviation_phase0 <= tol && cert.deviation_phase90 <= tol;
  cert.certified = out;
  return cert;
}

inline bool conservation_certificate(const QuadCovariance& in, const QuadCovariance& out,
                                     double tol) {
  return certify_conservation(in, out, tol).holds;
}

/// Quadrature combinations entering the field-only witnesses.
struct WitnessCombinations {
  static Eigen::Vector4d pair_phase90() { return {0, 1, 0, -1}; }
  static Eigen::Vector4d pair_phase0() { return {1, 0, 1, 0}; }
  static Eigen::Vector4d control_phase90() { return {0, 1, 0, 0}; }
  static Eigen::Vector4d probe_phase90() { return {0, 0, 0, 1}; }
  static Eigen::Vector4d control_gain(double h2) { return {1, 0, h2, 0}; }
  static Eigen::Vector4d probe_gain(double h1) { return {h1, 0, 1, 0}; }
};

inline double field_i1(const QuadCovariance& cov) {
  return cov.normally_ordered_variance(WitnessCombinations::pair_phase90()) +
         cov.normally_ordered_variance(WitnessCombinations::pair_phase0());
}

inline double field_i2(const QuadCovariance& cov, double h2) {
  return cov.normally_ordered_variance(WitnessCombinations::control_phase90()) +
         cov.normally_ordered_variance(WitnessCombinations::control_gain(h2));
}

inline double field_i3(const QuadCovariance& cov, double h1) {
  return cov.normally_ordered_variance(WitnessCombinations::probe_phase90()) +
         cov.normally_ordered_variance(WitnessCombinations::probe_gain(h1));
}

/**
 * Witnesses from field observables only. Both signs of each gain are tried
 * and the smaller value is reported with the sign used; separability bounds
 * hold for every real gain, so the minimum is still a valid witness.
 */
inline WitnessReport witness_from_covariance(const ConservationCertificate& cert, double h1,
                                             double h2, double kappa) {
  if (!cert.holds)
    throw Error(ErrorCode::CertificateRequired,
                "summed quadrature variances are not conserved; atomic terms do not cancel");
  const QuadCovariance& cov = cert.certified;
  const double i2_plus = field_i2(cov, h2);
  const double i2_minus = field_i2(cov, -h2);
  const double i3_plus = field_i3(cov, h1);
  const double i3_minus = field_i3(cov, -h1);
  WitnessReport rep = make_report(field_i1(cov), std::min(i2_plus, i2_minus),
                                  std::min(i3_plus, i3_minus), h1, h2, kappa);
  rep.h2_sign = i2_minus < i2_plus ? -1 : 1;
  rep.h1_sign = i3_minus < i3_plus ? -1 : 1;
  return rep;
}

/**
 * Distance beyond which suitable gains violate the genuine-entanglement sum:
 * 2 - cosh 2r + cosh(2 Q_a z) > 0. Zero when the condition already holds at
 * the input (cosh 2r <= 3).
 */
inline double onset_distance(const ModelParams& p, double delta) {
  if (delta == 0.0)
    throw Error(ErrorCode::CarrierFrequency, "Q_a vanishes at the carrier; no entanglement is generated");
  const double qa = q_absorption(p, delta);
  if (!(qa > 0.0)) throw Error(ErrorCode::CarrierFrequency, "Q_a(delta) is zero");
  const double two_r = 2.0 * std::abs(p.r);
  if (two_r > 700.0) return std::abs(p.r) / qa;  // cosh overflows; acosh(cosh u - 2) == u here
  const double arg = std::cosh(two_r) - 2.0;
  if (arg <= 1.0) return 0.0;
  return std::acosh(arg) / (2.0 * qa);
}

/// Normally ordered collective dipole variances (X, P). Both vanish for equal
/// drives; no closed form exists otherwise.
inline std::pair<double, double> collective_dipole_variances(const ModelParams& p) {
  if (!equal_rabi(p))
    throw Error(ErrorCode::NotSupported, "collective dipole variances only known for omega1 == omega2");
  return {0.0, 0.0};
}

}  // namespace eitent
