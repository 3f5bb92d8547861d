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
 * @file oracle.hpp
 * @brief Monte Carlo cascade oracle for the closed-form spectra.
 *
 * Each (delta, z) point is an independent circular complex Gaussian vector of
 * sideband quadrature amplitudes. Samples start from the twin-beam input
 * covariance and cross n_slices thin slabs; every slab multiplies the lossy
 * mode by e^{-(q_a + i s q_o) dz} and adds fresh vacuum noise with weight
 * 1 - e^{-2 q_a dz}. Nothing here calls covariance_at or the closed-form
 * spectra; the only shared physics inputs are Q_a, Q_o and the input state.
 *
 * Reproducibility: sample i of stream (grid index) s on leg l draws from its
 * own std::mt19937_64 seeded by a splitmix64 chain over (seed, s, i, l). The
 * input draw is leg 0; propagation calls use legs >= 1.
 */
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "eitent/error.hpp"
#include "eitent/model.hpp"
#include "eitent/parallel.hpp"
#include "eitent/spectra.hpp"
#include "eitent/witness.hpp"

namespace eitent {

struct OracleConfig {
  std::size_t n_samples = 100000;
  std::size_t n_slices = 64;
  std::uint64_t seed = 42;
  double sigma_bound = 3.0;
  unsigned workers = 0;  // 0: one per hardware thread
};

inline constexpr std::size_t kMinOracleSamples = 1000;
inline constexpr std::size_t kMinOracleSlices = 2;
inline constexpr const char* kOracleGenerator =
    "std::mt19937_64 per (seed, stream, sample, leg) via splitmix64; "
    "std::normal_distribution (libstdc++)";

inline const OracleConfig& validate_config(const OracleConfig& cfg) {
  if (cfg.n_samples < kMinOracleSamples)
    throw Error(ErrorCode::ConfigInvalid, "n_samples must be >= 1000");
  if (cfg.n_slices < kMinOracleSlices)
    throw Error(ErrorCode::ConfigInvalid, "n_slices must be >= 2");
  if (!(cfg.sigma_bound > 0.0) || !std::isfinite(cfg.sigma_bound))
    throw Error(ErrorCode::ConfigInvalid, "sigma_bound must be > 0");
  return cfg;
}

using QuadSample = std::array<std::complex<double>, 4>;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t sample,
                                 std::uint64_t leg) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  h = splitmix64(h ^ sample);
  return splitmix64(h ^ leg);
}

// Circular complex Gaussian with E|w|^2 = 1.
class ComplexNormal {
 public:
  explicit ComplexNormal(std::uint64_t seed) : gen_(seed) {}
  std::complex<double> operator()() {
    const double re = normal_(gen_);
    const double im = normal_(gen_);
    return std::complex<double>(re, im) * std::numbers::sqrt2 * 0.5;
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_;
};

inline constexpr std::size_t kBlock = 4096;

}  // namespace detail

/// Draws samples whose spectral covariance is input_covariance(r, eta).
inline std::vector<QuadSample> draw_input_samples(const ModelParams& p, const OracleConfig& cfg,
                                                  std::uint64_t stream) {
  validate_config(cfg);
  const QuadCovariance in = input_covariance(p.r, p.eta);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(in.m);
  const Eigen::Matrix4d root =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::vector<QuadSample> samples(cfg.n_samples);
  const std::size_t blocks = (cfg.n_samples + detail::kBlock - 1) / detail::kBlock;
  detail::parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(cfg.n_samples, (b + 1) * detail::kBlock);
    for (std::size_t i = b * detail::kBlock; i < end; ++i) {
      detail::ComplexNormal draw(detail::derive_seed(cfg.seed, stream, i, 0));
      Eigen::Vector4cd g;
      for (int a = 0; a < 4; ++a) g(a) = draw();
      const Eigen::Vector4cd y = root.cast<std::complex<double>>() * g;
      for (int a = 0; a < 4; ++a) samples[i][a] = y(a);
    }
  }, cfg.workers);
  return samples;
}

/// Pushes samples through a slab of length z split into cfg.n_slices slices.
inline void propagate_samples(const ModelParams& p, double delta, double z, const OracleConfig& cfg,
                              std::uint64_t stream, std::uint64_t leg, std::span<QuadSample> samples) {
  validate_config(cfg);
  validate_grid_point({z, delta});
  const auto [qa, qo] = propagation_constants(p, delta);
  const double dz = z / static_cast<double>(cfg.n_slices);
  const std::complex<double> t = std::exp(std::complex<double>(-qa * dz, -kDispersionSign * qo * dz));
  const double noise = std::sqrt(-std::expm1(-2.0 * qa * dz));
  const double norm = std::hypot(p.omega1, p.omega2);
  const double c1 = p.omega1 / norm;
  const double c2 = p.omega2 / norm;

  const std::size_t blocks = (samples.size() + detail::kBlock - 1) / detail::kBlock;
  detail::parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(samples.size(), (b + 1) * detail::kBlock);
    for (std::size_t i = b * detail::kBlock; i < end; ++i) {
      detail::ComplexNormal draw(detail::derive_seed(cfg.seed, stream, i, leg));
      QuadSample& y = samples[i];
      for (int q = 0; q < 2; ++q) {
        const std::complex<double> bright = c1 * y[kY1Phase0 + q] + c2 * y[kY2Phase0 + q];
        std::complex<double> dark = -c2 * y[kY1Phase0 + q] + c1 * y[kY2Phase0 + q];
        for (std::size_t s = 0; s < cfg.n_slices; ++s) dark = t * dark + noise * draw();
        y[kY1Phase0 + q] = c1 * bright - c2 * dark;
        y[kY2Phase0 + q] = c2 * bright + c1 * dark;
      }
    }
  }, cfg.workers);
}

/// One Monte Carlo estimate of a scalar spectral quantity.
struct OracleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::string target;
  std::uint64_t seed_used = 0;
};

/// Sample mean and standard error of sum_t |v_t . y|^2 - sum_t |v_t|^2,
/// i.e. a sum of normally ordered variances of real quadrature combinations.
inline OracleEstimate estimate_functional(std::span<const QuadSample> samples,
                                          std::span<const Eigen::Vector4d> combos,
                                          std::string target, std::uint64_t seed) {
  double offset = 0.0;
  for (const auto& v : combos) offset += v.squaredNorm();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& y : samples) {
    double f = 0.0;
    for (const auto& v : combos) {
      std::complex<double> proj = 0.0;
      for (int a = 0; a < 4; ++a) proj += v(a) * y[a];
      f += std::norm(proj);
    }
    sum += f;
    sum_sq += f * f;
  }
  const double n = static_cast<double>(samples.size());
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1.0);
  return {mean - offset, std::sqrt(std::max(var, 0.0) / n), samples.size(), std::move(target), seed};
}

struct CovarianceEstimate {
  QuadCovariance mean;
  Eigen::Matrix4d std_error = Eigen::Matrix4d::Zero();  // of the real part
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Known-zero-mean sample covariance E[y y^H] with per-entry standard errors.
inline CovarianceEstimate estimate_covariance(std::span<const QuadSample> samples, std::uint64_t seed) {
  Eigen::Matrix4d re = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d re_sq = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d im = Eigen::Matrix4d::Zero();
  for (const auto& y : samples) {
    for (int a = 0; a < 4; ++a) {
      for (int b = a; b < 4; ++b) {
        const std::complex<double> prod = y[a] * std::conj(y[b]);
        re(a, b) += prod.real();
        re_sq(a, b) += prod.real() * prod.real();
        im(a, b) += prod.imag();
      }
    }
  }
  const double n = static_cast<double>(samples.size());
  CovarianceEstimate est;
  est.n = samples.size();
  est.seed = seed;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      const double mean = re(a, b) / n;
      const double var = (re_sq(a, b) - n * mean * mean) / (n - 1.0);
      est.mean.m(a, b) = est.mean.m(b, a) = mean;
      est.mean.k(a, b) = im(a, b) / n;
      est.mean.k(b, a) = -est.mean.k(a, b);
      est.std_error(a, b) = est.std_error(b, a) = std::sqrt(std::max(var, 0.0) / n);
    }
    est.mean.k(a, a) = 0.0;
  }
  return est;
}

/// Full cascade from the input plane to z for one grid stream.
inline std::vector<QuadSample> simulate_samples(const ModelParams& p, double delta, double z,
                                                const OracleConfig& cfg, std::uint64_t stream = 0) {
  auto samples = draw_input_samples(p, cfg, stream);
  propagate_samples(p, delta, z, cfg, stream, 1, samples);
  return samples;
}

inline CovarianceEstimate simulate_covariance(const ModelParams& p, double delta, double z,
                                              const OracleConfig& cfg, std::uint64_t stream = 0) {
  const auto samples = simulate_samples(p, delta, z, cfg, stream);
  return estimate_covariance(samples, cfg.seed);
}

// ---------------------------------------------------------------------------
// Grid validation

struct ValidationCase {
  ModelParams params;
  GridPoint point;
  std::string label;
};

struct ValidationEntry {
  std::size_t point = 0;
  std::string kind;    // "covariance" or "witness"
  std::string target;  // e.g. "m[0][2]" or "i2"
  double analytic = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCase> cases;
  std::vector<ValidationEntry> entries;
  OracleConfig config;
  double covariance_pass_fraction = 0.0;
  double witness_pass_fraction = 0.0;  // 1 when no witness entries exist
  double pass_fraction = 0.0;
  double mean_z = 0.0;
  double rms_z = 0.0;
  double max_abs_z = 0.0;
  // |z| in [0,1), [1,2), [2,3), [3,4), [4,inf)
  std::array<std::size_t, 5> abs_z_histogram{};
};

inline const char* kQuadNames[4] = {"y1_0", "y1_p2", "y2_0", "y2_p2"};

inline ValidationReport validate_cases(std::span<const ValidationCase> cases, const OracleConfig& cfg) {
  validate_config(cfg);
  if (cases.empty()) throw Error(ErrorCode::ConfigInvalid, "validation grid is empty");
  ValidationReport rep;
  rep.cases.assign(cases.begin(), cases.end());
  rep.config = cfg;

  auto add = [&](std::size_t point, std::string kind, std::string target, double analytic,
                 double estimate, double se) {
    ValidationEntry e{point, std::move(kind), std::move(target), analytic, estimate, se, 0.0, false};
    e.z_score = se > 0.0 ? (estimate - analytic) / se : (estimate == analytic ? 0.0 : INFINITY);
    e.pass = std::abs(e.z_score) <= cfg.sigma_bound;
    rep.entries.push_back(std::move(e));
  };

  for (std::size_t idx = 0; idx < cases.size(); ++idx) {
    const ModelParams p = validate_params(cases[idx].params);
    const GridPoint g = validate_grid_point(cases[idx].point);
    const auto samples = simulate_samples(p, g.delta, g.z, cfg, idx);
    const CovarianceEstimate est = estimate_covariance(samples, cfg.seed);
    const QuadCovariance exact = covariance_at(p, g.delta, g.z);
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        add(idx, "covariance", std::string("cov_") + kQuadNames[a] + "_" + kQuadNames[b],
            exact.m(a, b), est.mean.m(a, b), est.std_error(a, b));

    if (!equal_rabi(p)) continue;
    const auto cert = certify_conservation(input_covariance(p.r, p.eta), exact, 1e-9);
    if (!cert.holds) continue;
    const WitnessReport w = witness_from_covariance(cert, -3.0, -3.0, p.kappa);
    using WC = WitnessCombinations;
    const std::array<Eigen::Vector4d, 2> c1{WC::pair_phase90(), WC::pair_phase0()};
    const std::array<Eigen::Vector4d, 2> c2{WC::control_phase90(), WC::control_gain(w.h2_sign * w.h2)};
    const std::array<Eigen::Vector4d, 2> c3{WC::probe_phase90(), WC::probe_gain(w.h1_sign * w.h1)};
    const auto e1 = estimate_functional(samples, c1, "i1", cfg.seed);
    const auto e2 = estimate_functional(samples, c2, "i2", cfg.seed);
    const auto e3 = estimate_functional(samples, c3, "i3", cfg.seed);
    add(idx, "witness", "i1", w.i1, e1.mean, e1.std_error);
    add(idx, "witness", "i2", w.i2, e2.mean, e2.std_error);
    add(idx, "witness", "i3", w.i3, e3.mean, e3.std_error);
  }

  std::size_t cov_total = 0, cov_pass = 0, wit_total = 0, wit_pass = 0;
  double sum_z = 0.0, sum_z2 = 0.0;
  for (const auto& e : rep.entries) {
    if (e.kind == "covariance") {
      ++cov_total;
      cov_pass += e.pass;
    } else {
      ++wit_total;
      wit_pass += e.pass;
    }
    sum_z += e.z_score;
    sum_z2 += e.z_score * e.z_score;
    const double az = std::abs(e.z_score);
    rep.max_abs_z = std::max(rep.max_abs_z, az);
    rep.abs_z_histogram[std::min<std::size_t>(4, static_cast<std::size_t>(az))]++;
  }
  const double total = static_cast<double>(rep.entries.size());
  rep.covariance_pass_fraction = static_cast<double>(cov_pass) / static_cast<double>(cov_total);
  rep.witness_pass_fraction = wit_total ? static_cast<double>(wit_pass) / static_cast<double>(wit_total) : 1.0;
  rep.pass_fraction = static_cast<double>(cov_pass + wit_pass) / total;
  rep.mean_z = sum_z / total;
  rep.rms_z = std::sqrt(sum_z2 / total);
  return rep;
}

inline ValidationReport validate_grid(const ModelParams& p, std::span<const GridPoint> grid,
                                      const OracleConfig& cfg) {
  if (grid.empty()) throw Error(ErrorCode::ConfigInvalid, "validation grid is empty");
  std::vector<ValidationCase> cases;
  cases.reserve(grid.size());
  for (const auto& g : grid) cases.push_back({p, g, ""});
  return validate_cases(cases, cfg);
}

/**
 * Twenty points: ten equal-drive points across z Q_a and detuning, and ten on
 * the O2 = O1 (1 - sqrt 2) oscillation branch, including one deep in the
 * negligible-absorption regime at cos(Q_o z) = -1. r = 1, eta = 1.
 */
inline std::vector<ValidationCase> default_validation_preset() {
  std::vector<ValidationCase> cases;
  ModelParams equal;
  equal.r = 1.0;
  equal.eta = 1.0;
  const std::array<std::pair<double, double>, 10> equal_points{{
      {1.0, 0.0}, {1.0, 0.25}, {1.0, 0.5}, {1.0, 1.0}, {1.0, 1.5},
      {1.0, 2.5}, {0.5, 1.0}, {-1.0, 0.75}, {2.0, 2.0}, {-0.3, 4.0}}};
  for (const auto& [delta, zqa] : equal_points)
    cases.push_back({equal, {zqa / q_absorption(equal, delta), delta}, "equal_rabi"});

  ModelParams osc = equal;
  osc.omega2 = 1.0 - std::numbers::sqrt2;
  const std::array<std::pair<double, double>, 9> osc_points{{
      {0.1, 0.1}, {0.1, 0.5}, {0.2, 1.0}, {0.3, 0.3}, {-0.2, 0.8},
      {0.5, 1.5}, {1.0, 0.4}, {0.05, 2.0}, {-0.05, 0.2}}};
  for (const auto& [delta, zqa] : osc_points)
    cases.push_back({osc, {zqa / q_absorption(osc, delta), delta}, "oscillation"});
  const double delta = 5e-4;
  cases.push_back({osc, {std::numbers::pi / q_dispersion(osc, delta), delta}, "oscillation_min"});
  return cases;
}

inline nlohmann::json to_json(const ValidationReport& rep) {
  using nlohmann::json;
  json j;
  j["config"] = {{"n_samples", rep.config.n_samples},
                 {"n_slices", rep.config.n_slices},
                 {"seed", rep.config.seed},
                 {"sigma_bound", rep.config.sigma_bound},
                 {"generator", kOracleGenerator}};
  json pts = json::array();
  for (const auto& c : rep.cases)
    pts.push_back({{"label", c.label}, {"omega1", c.params.omega1}, {"omega2", c.params.omega2},
                   {"r", c.params.r}, {"eta", c.params.eta}, {"delta", c.point.delta}, {"z", c.point.z}});
  j["grid"] = pts;
  json entries = json::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"point", e.point}, {"kind", e.kind}, {"target", e.target},
                       {"analytic", e.analytic}, {"estimate", e.estimate}, {"stderr", e.std_error},
                       {"z_score", e.z_score}, {"pass", e.pass}});
  j["entries"] = entries;
  j["summary"] = {{"covariance_pass_fraction", rep.covariance_pass_fraction},
                  {"witness_pass_fraction", rep.witness_pass_fraction},
                  {"pass_fraction", rep.pass_fraction},
                  {"mean_z", rep.mean_z},
                  {"rms_z", rep.rms_z},
                  {"max_abs_z", rep.max_abs_z},
                  {"abs_z_histogram", rep.abs_z_histogram}};
  return j;
}

}  // namespace eitent
