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

#include <cmath>
#include <numbers>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "eitent/runner.hpp"

using Catch::Approx;
using eitent::FigureId;
using eitent::SweepAxis;
using eitent::SweepSpec;

namespace {

std::size_t column_index(const eitent::Table& t, std::string_view name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

double at(const eitent::Table& t, std::size_t row, std::string_view name) {
  const auto& v = t.rows[row][column_index(t, name)];
  REQUIRE(v.has_value());
  return *v;
}

std::string csv(const eitent::Table& t) {
  std::ostringstream os;
  eitent::write_csv(os, t);
  return os.str();
}

eitent::ErrorCode code_of(auto fn) {
  try {
    fn();
  } catch (const eitent::Error& e) {
    return e.code();
  }
  return eitent::ErrorCode::NotSupported;
}

}  // namespace

TEST_CASE("number format is locale independent with 15 significant digits") {
  CHECK(eitent::format_number(1.0) == "1");
  CHECK(eitent::format_number(0.1) == "0.1");
  CHECK(eitent::format_number(std::numbers::pi) == "3.14159265358979");
  CHECK(eitent::format_number(-2.5e-20) == "-2.5e-20");
}

TEST_CASE("csv writes a header and empty fields for missing values") {
  eitent::Table t;
  t.columns = {"a", "b"};
  t.rows = {{1.5, std::nullopt}, {std::nullopt, 2.0}};
  CHECK(csv(t) == "a,b\n1.5,\n,2\n");
  eitent::Table empty;
  empty.columns = {"x"};
  CHECK(csv(empty) == "x\n");
}

TEST_CASE("column names are stable") {
  const std::vector<std::string_view> expected{"delta", "z", "z_qa", "qa", "qo", "s11_0", "s22_0", "s11_p2",
                                               "s22_p2", "c12_0", "c12_p2", "i1", "i2", "i3", "sum_i", "genuine"};
  CHECK(std::vector<std::string_view>(eitent::kColumnNames.begin(), eitent::kColumnNames.end()) == expected);
  CHECK(eitent::parse_column("sum_i") == eitent::Column::SumI);
  CHECK_FALSE(eitent::parse_column("nope"));
}

TEST_CASE("z sweep hits the vacuum level at z Q_a = 1") {
  SweepSpec s;
  s.start = 0.0;
  s.stop = 5.0;
  s.points = 101;
  const auto t = eitent::run_sweep(s);
  REQUIRE(t.rows.size() == 101);
  CHECK(t.columns.size() == eitent::kColumnCount);
  CHECK(at(t, 20, "z_qa") == 1.0);
  CHECK(at(t, 20, "s22_0") == Approx(1.0).margin(1e-12));
  CHECK(eitent::format_number(at(t, 20, "s22_0")) == "1");
  CHECK(at(t, 0, "i1") == Approx(-3.458658867).epsilon(1e-9));
  CHECK(at(t, 100, "genuine") == 1.0);
  CHECK(at(t, 0, "genuine") == 0.0);
}

TEST_CASE("a hundred-point z sweep") {
  SweepSpec s;
  s.points = 100;
  const auto t = eitent::run_sweep(s);
  CHECK(t.rows.size() == 100);
  CHECK(at(t, 99, "z_qa") == 5.0);
}

TEST_CASE("detuning sweep peaks at the two-photon sidebands") {
  SweepSpec s;
  s.axis = SweepAxis::Delta;
  s.start = -3.0;
  s.stop = 3.0;
  s.points = 601;
  s.z = 0.5;
  s.outputs = {"delta", "qa"};
  const auto t = eitent::run_sweep(s);
  std::size_t best_neg = 0, best_pos = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (at(t, i, "delta") < 0 && at(t, i, "qa") > at(t, best_neg, "qa")) best_neg = i;
    if (at(t, i, "delta") > 0 && at(t, i, "qa") > at(t, best_pos, "qa")) best_pos = i;
  }
  CHECK(at(t, best_neg, "delta") == Approx(-1.0).margin(1e-12));
  CHECK(at(t, best_pos, "delta") == Approx(1.0).margin(1e-12));
  CHECK(at(t, 300, "qa") == 0.0);
}

TEST_CASE("witness columns are empty without the conservation certificate") {
  SweepSpec s;
  s.axis = SweepAxis::Ratio;
  s.start = 0.5;
  s.stop = 1.5;
  s.points = 3;
  s.z_qa = 1.0;
  const auto t = eitent::run_sweep(s);
  const auto i2 = column_index(t, "i2");
  CHECK_FALSE(t.rows[0][i2].has_value());
  CHECK(t.rows[1][i2].has_value());
  CHECK_FALSE(t.rows[2][i2].has_value());
}

TEST_CASE("r and eta sweeps") {
  SweepSpec s;
  s.axis = SweepAxis::R;
  s.start = 0.0;
  s.stop = 2.0;
  s.points = 5;
  s.z = 0.0;
  auto t = eitent::run_sweep(s);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(at(t, i, "s22_0") == Approx(std::cosh(2.0 * 0.5 * i)).epsilon(1e-13));
  s.axis = SweepAxis::Eta;
  s.start = 0.0;
  s.stop = 1.0;
  t = eitent::run_sweep(s);
  CHECK(at(t, 0, "s11_p2") == 1.0);
}

TEST_CASE("sweep validation names the offending field") {
  SweepSpec s;
  s.points = 1;
  CHECK(code_of([&] { eitent::validate_sweep(s); }) == eitent::ErrorCode::InvalidSweep);
  try {
    eitent::validate_sweep(s);
  } catch (const eitent::Error& e) {
    CHECK(std::string(e.what()).find("points >= 2") != std::string::npos);
  }
  s = {};
  s.start = 2.0;
  s.stop = 1.0;
  CHECK(code_of([&] { eitent::validate_sweep(s); }) == eitent::ErrorCode::InvalidSweep);
  s = {};
  s.outputs = {"bogus"};
  CHECK(code_of([&] { eitent::validate_sweep(s); }) == eitent::ErrorCode::InvalidSweep);
  s = {};
  s.fixed.eta = 3.0;
  CHECK(code_of([&] { eitent::validate_sweep(s); }) == eitent::ErrorCode::EtaOutOfRange);
  s = {};
  s.delta = 0.0;
  CHECK(code_of([&] { eitent::run_sweep(s); }) == eitent::ErrorCode::InvalidSweep);
  CHECK(code_of([] { eitent::parse_axis("time"); }) == eitent::ErrorCode::InvalidSweep);
}

TEST_CASE("sidecar replay reproduces the csv") {
  SweepSpec s;
  s.axis = SweepAxis::Eta;
  s.start = 0.1;
  s.stop = 0.9;
  s.points = 7;
  s.z_qa = 0.7;
  s.fixed.gamma = 2.0;
  s.fixed.omega1 = 3.0;
  s.fixed.omega2 = 3.0;
  s.delta = 0.4;
  s.outputs = {"z", "s22_0", "i2"};
  s.oracle = true;
  s.oracle_config.n_samples = 2000;
  s.oracle_config.seed = 99;
  const auto t = eitent::run_sweep(s);
  const auto side = eitent::sweep_sidecar(s, t);
  CHECK(side["seed"] == 99);
  CHECK(side["version"] == eitent::kVersion);
  CHECK(side["params"]["gamma"] == 1.0);
  CHECK(side["params"]["omega1"] == 1.5);
  const auto replay = eitent::sweep_from_sidecar(nlohmann::json::parse(side.dump()));
  CHECK(csv(eitent::run_sweep(replay)) == csv(t));
  CHECK(t.columns.back() == "mc_s22_0_se");
}

TEST_CASE("sidecar omits the seed without oracle columns") {
  SweepSpec s;
  s.points = 3;
  const auto side = eitent::sweep_sidecar(s, eitent::run_sweep(s));
  CHECK_FALSE(side.contains("seed"));
}

TEST_CASE("figure presets") {
  CHECK(eitent::parse_figure("fig5") == FigureId::Fig5);
  CHECK(code_of([] { eitent::parse_figure("fig7"); }) == eitent::ErrorCode::UnknownFigure);

  SECTION("fig2") {
    const auto res = eitent::run_figure(FigureId::Fig2, eitent::figure_defaults(FigureId::Fig2));
    CHECK(res.table.columns == std::vector<std::string>{"delta", "qa"});
    CHECK(res.table.rows.size() == 601);
    CHECK(at(res.table, 300, "qa") == 0.0);
    CHECK(at(res.table, 400, "qa") == Approx(2.0));
    CHECK(at(res.table, 200, "qa") == Approx(2.0));
  }
  SECTION("fig3") {
    const auto res = eitent::run_figure(FigureId::Fig3, eitent::figure_defaults(FigureId::Fig3));
    const auto p = eitent::validate_params(eitent::figure_defaults(FigureId::Fig3).params);
    const double delta = res.sidecar["delta"].get<double>();
    CHECK(delta > 0.0);
    CHECK(delta < (p.omega1 + p.omega2) / 2.0);
    CHECK(eitent::q_dispersion(p, delta) / eitent::q_absorption(p, delta) == Approx(7.0).epsilon(1e-12));
    CHECK(res.sidecar["notes"].size() == 1);
    CHECK(at(res.table, 0, "s22_0") == Approx(std::cosh(2.0)).epsilon(1e-13));
  }
  SECTION("fig4") {
    const auto res = eitent::run_figure(FigureId::Fig4, eitent::figure_defaults(FigureId::Fig4));
    const auto last = res.table.rows.size() - 1;
    CHECK(at(res.table, last, "s22_0") == Approx(0.567667641618306).margin(2e-4));
    CHECK(at(res.table, last, "s22_p2") == Approx(4.19452804946533).margin(2e-4));
    CHECK(at(res.table, last, "s11_0") == at(res.table, last, "s22_0"));
  }
  SECTION("fig5") {
    const auto res = eitent::run_figure(FigureId::Fig5, eitent::figure_defaults(FigureId::Fig5));
    const auto& t = res.table;
    CHECK(t.columns == std::vector<std::string>{"z_qa", "i1", "i2", "i3", "sum_i"});
    CHECK(res.sidecar["thresholds"]["genuine"] == -8.0);
    std::optional<double> i2_root, sum_root;
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
      auto cross = [&](std::string_view col, double level) {
        const double a = at(t, i - 1, col) - level, b = at(t, i, col) - level;
        return a > 0 && b <= 0 ? std::optional(at(t, i - 1, "z_qa") + 0.005 * a / (a - b)) : std::nullopt;
      };
      if (auto c = cross("i2", 0.0)) i2_root = c;
      if (auto c = cross("sum_i", -8.0)) sum_root = c;
    }
    REQUIRE(i2_root);
    REQUIRE(sum_root);
    CHECK(*i2_root == Approx(0.5994204944).margin(5e-4));
    CHECK(*sum_root == Approx(1.48633009).margin(5e-4));
  }
}

TEST_CASE("figure presets validate their options") {
  auto opt = eitent::figure_defaults(FigureId::Fig5);
  opt.params.omega2 = 2.0;
  CHECK(code_of([&] { eitent::run_figure(FigureId::Fig5, opt); }) == eitent::ErrorCode::RegimeError);
  opt = eitent::figure_defaults(FigureId::Fig2);
  opt.points = 1;
  CHECK(code_of([&] { eitent::run_figure(FigureId::Fig2, opt); }) == eitent::ErrorCode::InvalidSweep);
  opt = eitent::figure_defaults(FigureId::Fig3);
  opt.dispersion_ratio = -1.0;
  CHECK(code_of([&] { eitent::run_figure(FigureId::Fig3, opt); }) == eitent::ErrorCode::InvalidSweep);
}
