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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "eitent/oracle.hpp"

using Catch::Approx;
using eitent::ModelParams;
using eitent::OracleConfig;

namespace {

ModelParams drives(double o1, double o2, double r = 1.0, double eta = 1.0) {
  ModelParams p;
  p.omega1 = o1;
  p.omega2 = o2;
  p.r = r;
  p.eta = eta;
  return eitent::validate_params(p);
}

OracleConfig config(std::size_t n, std::size_t slices = 64, std::uint64_t seed = 42) {
  OracleConfig c;
  c.n_samples = n;
  c.n_slices = slices;
  c.seed = seed;
  return c;
}

bool within(double estimate, double target, double se, double bound = 3.0) {
  return std::abs(estimate - target) <= bound * se;
}

// Two-sample Kolmogorov-Smirnov statistic and its asymptotic p-value.
double ks_pvalue(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double q = 0.0;
  for (int k = 1; k <= 100; ++k)
    q += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(q, 0.0, 1.0);
}

}  // namespace

TEST_CASE("oracle config bounds") {
  auto code = [](const OracleConfig& c) {
    try {
      eitent::validate_config(c);
    } catch (const eitent::Error& e) {
      return e.code();
    }
    return eitent::ErrorCode::NotSupported;
  };
  CHECK(code(config(10)) == eitent::ErrorCode::ConfigInvalid);
  CHECK(code(config(999)) == eitent::ErrorCode::ConfigInvalid);
  CHECK(code(config(1000, 1)) == eitent::ErrorCode::ConfigInvalid);
  auto c = config(1000, 2);
  CHECK_NOTHROW(eitent::validate_config(c));
  c.sigma_bound = 0.0;
  CHECK(code(c) == eitent::ErrorCode::ConfigInvalid);
}

TEST_CASE("KS helper separates different distributions") {
  std::vector<double> a, b, c;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(i / 2000.0);
    b.push_back((i + 0.5) / 2000.0);
    c.push_back(0.3 + i / 2000.0);
  }
  CHECK(ks_pvalue(a, b) > 0.99);
  CHECK(ks_pvalue(a, c) < 1e-6);
}

TEST_CASE("zero efficiency stays at the vacuum level") {
  const auto p = drives(1.0, 0.6, 1.0, 0.0);
  const auto est = eitent::simulate_covariance(p, 0.7, 0.9, config(20000));
  for (int a = 0; a < 4; ++a) CHECK(within(est.mean.m(a, a), 1.0, est.std_error(a, a)));
}

TEST_CASE("equal drives reach the vacuum level at z Q_a = 1") {
  const auto p = drives(1.0, 1.0);
  const double z = 1.0 / eitent::q_absorption(p, 1.0);
  const auto est = eitent::simulate_covariance(p, 1.0, z, config(100000));
  const auto y = eitent::kY2Phase0;
  CHECK(within(est.mean.m(y, y), 1.0, est.std_error(y, y)));
}

TEST_CASE("oscillation minimum reaches single-mode squeezing") {
  const auto p = drives(1.0, 1.0 - std::numbers::sqrt2);
  const double delta = 5e-4;
  const double z = std::numbers::pi / eitent::q_dispersion(p, delta);
  REQUIRE(eitent::q_absorption(p, delta) * z <= 1e-3);
  const auto est = eitent::simulate_covariance(p, delta, z, config(100000));
  const auto y = eitent::kY2Phase0;
  CHECK(within(est.mean.m(y, y), std::exp(-2.0), est.std_error(y, y)));
}

TEST_CASE("standard error scales as the inverse square root of the sample count") {
  const auto p = drives(1.0, 1.0);
  const double z = 0.5 / eitent::q_absorption(p, 1.0);
  const auto small = eitent::simulate_covariance(p, 1.0, z, config(1000));
  const auto large = eitent::simulate_covariance(p, 1.0, z, config(100000));
  const auto y = eitent::kY2Phase0;
  CHECK(small.std_error(y, y) / large.std_error(y, y) == Approx(10.0).margin(1.5));
  CHECK(large.std_error.minCoeff() > 0.0);
}

TEST_CASE("same seed gives bitwise identical estimates at any worker count") {
  const auto p = drives(1.0, 2.0);
  auto cfg = config(10000 + 123);
  cfg.workers = 1;
  const auto a = eitent::simulate_covariance(p, 0.8, 0.4, cfg);
  cfg.workers = 4;
  const auto b = eitent::simulate_covariance(p, 0.8, 0.4, cfg);
  CHECK(std::memcmp(a.mean.m.data(), b.mean.m.data(), sizeof(double) * 16) == 0);
  CHECK(std::memcmp(a.std_error.data(), b.std_error.data(), sizeof(double) * 16) == 0);
  const auto c = eitent::simulate_covariance(p, 0.8, 0.4, config(10123, 64, 43));
  CHECK(c.mean.m != a.mean.m);
}

TEST_CASE("estimates agree across slice counts") {
  const auto p = drives(1.0, 1.0 - std::numbers::sqrt2);
  const double delta = 0.2;
  for (double x : {1.0, 5.0}) {
    const double z = x / eitent::q_absorption(p, delta);
    const auto a = eitent::simulate_covariance(p, delta, z, config(50000, 64, 1));
    const auto b = eitent::simulate_covariance(p, delta, z, config(50000, 128, 1));
    for (int i = 0; i < 4; ++i) {
      for (int j = i; j < 4; ++j) {
        const double se = std::hypot(a.std_error(i, j), b.std_error(i, j));
        CHECK(within(a.mean.m(i, j), b.mean.m(i, j), se, 4.0));
      }
    }
  }
}

TEST_CASE("the slice cascade composes to the full channel") {
  const auto p = drives(1.0, 1.0 - std::numbers::sqrt2);
  const double delta = 0.2;
  const double z = 5.0 / eitent::q_absorption(p, delta);
  for (std::size_t n : {2u, 64u, 128u}) {
    auto cov = eitent::input_covariance(p.r, p.eta);
    const auto slice = eitent::transfer_model(p, delta, z / static_cast<double>(n));
    for (std::size_t s = 0; s < n; ++s) cov = eitent::apply_transfer(slice, cov);
    const auto exact = eitent::covariance_at(p, delta, z);
    CHECK((cov.m - exact.m).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((cov.k - exact.k).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("propagating in two legs matches one leg in distribution") {
  const auto p = drives(1.0, 1.0 - std::numbers::sqrt2);
  const double delta = 0.3;
  const double z = 1.2 / eitent::q_absorption(p, delta);
  const auto cfg = config(20000, 64, 7);
  const auto direct = eitent::simulate_samples(p, delta, z, cfg, 0);
  auto staged = eitent::draw_input_samples(p, cfg, 1);
  eitent::propagate_samples(p, delta, z / 2.0, cfg, 1, 1, staged);
  eitent::propagate_samples(p, delta, z / 2.0, cfg, 1, 2, staged);
  for (int a = 0; a < 4; ++a) {
    std::vector<double> x, y;
    for (const auto& s : direct) x.push_back(s[a].real());
    for (const auto& s : staged) y.push_back(s[a].real());
    INFO("quadrature " << a);
    CHECK(ks_pvalue(x, y) > 0.01);
  }
}

TEST_CASE("estimated covariances respect the uncertainty bound") {
  for (const auto& c : eitent::default_validation_preset()) {
    const auto p = eitent::validate_params(c.params);
    const auto est = eitent::simulate_covariance(p, c.point.delta, c.point.z, config(20000));
    CHECK(eitent::uncertainty_margin(est.mean) >= -5.0 * est.std_error.maxCoeff());
  }
}

TEST_CASE("witness functionals match the covariance route") {
  const auto p = drives(1.0, 1.0);
  const double z = 0.8 / eitent::q_absorption(p, 1.0);
  const auto samples = eitent::simulate_samples(p, 1.0, z, config(100000));
  const auto exact = eitent::covariance_at(p, 1.0, z);
  const auto rep = eitent::witness_from_covariance(
      eitent::certify_conservation(eitent::input_covariance(p.r, p.eta), exact, 1e-9), -3, -3, p.kappa);
  using WC = eitent::WitnessCombinations;
  const std::array<Eigen::Vector4d, 2> c2{WC::control_phase90(), WC::control_gain(rep.h2_sign * -3.0)};
  const auto e2 = eitent::estimate_functional(samples, c2, "i2", 42);
  CHECK(within(e2.mean, rep.i2, e2.std_error));
  CHECK(e2.n == 100000);
  CHECK(e2.target == "i2");
  CHECK(e2.std_error > 0.0);
}

TEST_CASE("grid validation report") {
  auto cfg = config(20000);
  const auto cases = eitent::default_validation_preset();
  REQUIRE(cases.size() == 20);
  const auto rep = eitent::validate_cases(cases, cfg);
  CHECK(rep.entries.size() == 20 * 10 + 10 * 3);
  CHECK(rep.pass_fraction >= 0.95);
  const auto again = eitent::validate_cases(cases, cfg);
  CHECK(eitent::to_json(rep).dump() == eitent::to_json(again).dump());
  const auto j = eitent::to_json(rep);
  for (const char* key : {"point", "kind", "target", "analytic", "estimate", "stderr", "z_score", "pass"})
    CHECK(j["entries"][0].contains(key));
  CHECK(j["config"]["generator"].get<std::string>().find("mt19937_64") != std::string::npos);
  std::size_t hist = 0;
  for (auto h : rep.abs_z_histogram) hist += h;
  CHECK(hist == rep.entries.size());
}

TEST_CASE("grid validation rejects an empty grid") {
  CHECK_THROWS_AS(eitent::validate_grid(drives(1, 1), {}, config(1000)), eitent::Error);
}
