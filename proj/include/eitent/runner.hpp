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
 * @file runner.hpp
 * @brief Parameter sweeps, figure presets and their CSV / JSON output.
 *
 * Everything the command-line front end does lives here so it can be tested
 * without spawning a process; tools/eitent.cpp only parses flags.
 */
#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "json.hpp"

#include "eitent/error.hpp"
#include "eitent/model.hpp"
#include "eitent/oracle.hpp"
#include "eitent/parallel.hpp"
#include "eitent/spectra.hpp"
#include "eitent/version.hpp"
#include "eitent/witness.hpp"

namespace eitent {

// ---------------------------------------------------------------------------
// Columns and tables

enum class Column {
  Delta, Z, ZQa, Qa, Qo, S11Phase0, S22Phase0, S11Phase90, S22Phase90,
  C12Phase0, C12Phase90, I1, I2, I3, SumI, Genuine,
};

inline constexpr std::size_t kColumnCount = 16;

inline constexpr std::array<std::string_view, kColumnCount> kColumnNames{
    "delta", "z", "z_qa", "qa", "qo", "s11_0", "s22_0", "s11_p2", "s22_p2",
    "c12_0", "c12_p2", "i1", "i2", "i3", "sum_i", "genuine"};

inline std::optional<Column> parse_column(std::string_view name) {
  for (std::size_t i = 0; i < kColumnCount; ++i)
    if (kColumnNames[i] == name) return static_cast<Column>(i);
  return std::nullopt;
}

/// All observables at one grid point; witness columns stay empty when the
/// field-only witness forms are not licensed.
struct CsvRow {
  std::array<std::optional<double>, kColumnCount> values{};

  std::optional<double>& operator[](Column c) { return values[static_cast<std::size_t>(c)]; }
  const std::optional<double>& operator[](Column c) const {
    return values[static_cast<std::size_t>(c)];
  }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
};

/// Shortest round-trip-safe form is not needed; 15 significant digits,
/// locale independent.
inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 15);
  return std::string(buf.data(), res.ptr);
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << ',';
      if (row[c]) os << format_number(*row[c]);
    }
    os << '\n';
  }
}

inline nlohmann::json table_to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c)
      obj[t.columns[c]] = row[c] ? nlohmann::json(*row[c]) : nlohmann::json(nullptr);
    rows.push_back(std::move(obj));
  }
  return {{"columns", t.columns}, {"rows", rows}};
}

// ---------------------------------------------------------------------------
// Parameter (de)serialization

inline nlohmann::json params_to_json(const ModelParams& p) {
  return {{"gamma", p.gamma}, {"gamma1", p.gamma1}, {"gamma2", p.gamma2},
          {"omega1", p.omega1}, {"omega2", p.omega2}, {"coupling_density", p.coupling_density},
          {"r", p.r}, {"eta", p.eta}, {"kappa", p.kappa}};
}

inline ModelParams params_from_json(const nlohmann::json& j) {
  ModelParams p;
  p.gamma = j.at("gamma").get<double>();
  p.gamma1 = j.at("gamma1").get<double>();
  p.gamma2 = j.at("gamma2").get<double>();
  p.omega1 = j.at("omega1").get<double>();
  p.omega2 = j.at("omega2").get<double>();
  p.coupling_density = j.at("coupling_density").get<double>();
  p.r = j.at("r").get<double>();
  p.eta = j.at("eta").get<double>();
  p.kappa = j.at("kappa").get<double>();
  return p;
}

// ---------------------------------------------------------------------------
// Rows

inline CsvRow compute_row(const ModelParams& p, double delta, double z, double h1, double h2) {
  CsvRow row;
  const auto [qa, qo] = propagation_constants(p, delta);
  row[Column::Delta] = delta;
  row[Column::Z] = z;
  row[Column::ZQa] = z * qa;
  row[Column::Qa] = qa;
  row[Column::Qo] = qo;
  row[Column::S11Phase0] = full_spectrum(p, delta, z, Field::Control, Phase::Zero);
  row[Column::S22Phase0] = full_spectrum(p, delta, z, Field::Probe, Phase::Zero);
  row[Column::S11Phase90] = full_spectrum(p, delta, z, Field::Control, Phase::Ninety);
  row[Column::S22Phase90] = full_spectrum(p, delta, z, Field::Probe, Phase::Ninety);
  const QuadCovariance cov = covariance_at(p, delta, z);
  row[Column::C12Phase0] = cov.m(kY1Phase0, kY2Phase0);
  row[Column::C12Phase90] = cov.m(kY1Phase90, kY2Phase90);
  if (equal_rabi(p)) {
    const auto cert = certify_conservation(input_covariance(p.r, p.eta), cov, 1e-9);
    if (cert.holds) {
      const WitnessReport w = witness_from_covariance(cert, h1, h2, p.kappa);
      row[Column::I1] = w.i1;
      row[Column::I2] = w.i2;
      row[Column::I3] = w.i3;
      row[Column::SumI] = w.sum;
      row[Column::Genuine] = genuine_verdict(w) ? 1.0 : 0.0;
    }
  }
  return row;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { Z, Delta, R, Eta, Ratio };

inline constexpr std::array<std::string_view, 5> kAxisNames{"z", "delta", "r", "eta", "ratio"};

inline SweepAxis parse_axis(std::string_view name) {
  for (std::size_t i = 0; i < kAxisNames.size(); ++i)
    if (kAxisNames[i] == name) return static_cast<SweepAxis>(i);
  throw Error(ErrorCode::InvalidSweep, "axis must be one of z, delta, r, eta, ratio");
}

/**
 * axis = z sweeps the dimensionless z Q_a at fixed delta. Other axes hold the
 * position fixed, given either physically (z) or as z Q_a (not allowed for
 * axis = delta, where Q_a changes along the sweep).
 */
struct SweepSpec {
  SweepAxis axis = SweepAxis::Z;
  double start = 0.0;
  double stop = 5.0;
  std::size_t points = 101;
  ModelParams fixed;
  double delta = 1.0;
  std::optional<double> z;
  std::optional<double> z_qa;
  double h1 = -3.0;
  double h2 = -3.0;
  std::vector<std::string> outputs;  // empty: every column
  bool oracle = false;
  OracleConfig oracle_config;
};

inline void validate_sweep(const SweepSpec& s) {
  if (s.points < 2) throw Error(ErrorCode::InvalidSweep, "points >= 2 required");
  if (!(s.start < s.stop)) throw Error(ErrorCode::InvalidSweep, "start < stop required");
  if (!std::isfinite(s.start) || !std::isfinite(s.stop))
    throw Error(ErrorCode::InvalidSweep, "start and stop must be finite");
  if (s.z && s.z_qa) throw Error(ErrorCode::InvalidSweep, "give either z or z_qa, not both");
  if (s.axis == SweepAxis::Delta && s.z_qa)
    throw Error(ErrorCode::InvalidSweep, "axis delta needs a physical z, not z_qa");
  if (s.axis == SweepAxis::Z && (s.z || s.z_qa))
    throw Error(ErrorCode::InvalidSweep, "axis z takes no fixed position");
  for (const auto& name : s.outputs)
    if (!parse_column(name)) throw Error(ErrorCode::InvalidSweep, "unknown output column '" + name + "'");
  if (s.oracle) validate_config(s.oracle_config);
  validate_params(s.fixed);
}

inline std::vector<std::string> sweep_columns(const SweepSpec& s) {
  std::vector<std::string> cols;
  if (s.outputs.empty()) {
    for (auto n : kColumnNames) cols.emplace_back(n);
  } else {
    cols = s.outputs;
  }
  if (s.oracle) {
    cols.emplace_back("mc_s22_0");
    cols.emplace_back("mc_s22_0_se");
  }
  return cols;
}

inline Table run_sweep(const SweepSpec& spec) {
  validate_sweep(spec);
  Table table;
  table.columns = sweep_columns(spec);
  table.rows.resize(spec.points);

  std::vector<Column> picked;
  for (const auto& name : table.columns)
    if (auto c = parse_column(name)) picked.push_back(*c);

  detail::parallel_for(spec.points, [&](std::size_t i) {
    const double value =
        spec.start + (spec.stop - spec.start) * static_cast<double>(i) / static_cast<double>(spec.points - 1);
    ModelParams raw = spec.fixed;
    double delta = spec.delta;
    switch (spec.axis) {
      case SweepAxis::R: raw.r = value; break;
      case SweepAxis::Eta: raw.eta = value; break;
      case SweepAxis::Ratio: raw.omega2 = value * raw.omega1; break;
      case SweepAxis::Delta: delta = value; break;
      case SweepAxis::Z: break;
    }
    const ModelParams p = validate_params(raw);
    const double qa = q_absorption(p, delta);
    double z = 0.0;
    if (spec.axis == SweepAxis::Z || spec.z_qa) {
      const double zqa = spec.axis == SweepAxis::Z ? value : *spec.z_qa;
      if (zqa != 0.0 && !(qa > 0.0))
        throw Error(ErrorCode::InvalidSweep, "z_qa needs Q_a(delta) > 0; use a nonzero delta");
      z = zqa == 0.0 ? 0.0 : zqa / qa;
    } else {
      z = spec.z.value_or(1.0);
    }
    if (!(z >= 0.0)) throw Error(ErrorCode::InvalidSweep, "z must be >= 0");
    const CsvRow full = compute_row(p, delta, z, spec.h1, spec.h2);
    auto& out = table.rows[i];
    for (Column c : picked) out.push_back(full[c]);
    if (spec.oracle) {
      const auto est = simulate_covariance(p, delta, z, spec.oracle_config, i);
      out.emplace_back(est.mean.m(kY2Phase0, kY2Phase0));
      out.emplace_back(est.std_error(kY2Phase0, kY2Phase0));
    }
  });
  return table;
}

inline nlohmann::json sweep_to_json(const SweepSpec& s) {
  nlohmann::json j = {{"axis", kAxisNames[static_cast<std::size_t>(s.axis)]},
                      {"start", s.start},
                      {"stop", s.stop},
                      {"points", s.points},
                      {"delta", s.delta},
                      {"z", s.z ? nlohmann::json(*s.z) : nlohmann::json(nullptr)},
                      {"z_qa", s.z_qa ? nlohmann::json(*s.z_qa) : nlohmann::json(nullptr)},
                      {"h1", s.h1},
                      {"h2", s.h2},
                      {"outputs", s.outputs},
                      {"oracle", s.oracle}};
  if (s.oracle)
    j["oracle_config"] = {{"n_samples", s.oracle_config.n_samples},
                          {"n_slices", s.oracle_config.n_slices},
                          {"seed", s.oracle_config.seed},
                          {"sigma_bound", s.oracle_config.sigma_bound}};
  return j;
}

/// JSON written next to every sweep CSV; feeding it to sweep_from_sidecar
/// reproduces the same table.
inline nlohmann::json sweep_sidecar(const SweepSpec& s, const Table& t) {
  nlohmann::json j = {{"tool", "eitent"},
                      {"version", kVersion},
                      {"csv_schema", kCsvSchemaVersion},
                      {"command", "sweep"},
                      {"params", params_to_json(validate_params(s.fixed))},
                      {"input_params", params_to_json(s.fixed)},
                      {"sweep", sweep_to_json(s)},
                      {"columns", t.columns}};
  if (s.oracle) {
    j["seed"] = s.oracle_config.seed;
    j["generator"] = kOracleGenerator;
  }
  return j;
}

inline SweepSpec sweep_from_sidecar(const nlohmann::json& j) {
  const auto& sw = j.at("sweep");
  SweepSpec s;
  s.axis = parse_axis(sw.at("axis").get<std::string>());
  s.start = sw.at("start").get<double>();
  s.stop = sw.at("stop").get<double>();
  s.points = sw.at("points").get<std::size_t>();
  s.fixed = params_from_json(j.at("input_params"));
  s.delta = sw.at("delta").get<double>();
  if (!sw.at("z").is_null()) s.z = sw.at("z").get<double>();
  if (!sw.at("z_qa").is_null()) s.z_qa = sw.at("z_qa").get<double>();
  s.h1 = sw.at("h1").get<double>();
  s.h2 = sw.at("h2").get<double>();
  s.outputs = sw.at("outputs").get<std::vector<std::string>>();
  s.oracle = sw.at("oracle").get<bool>();
  if (s.oracle) {
    const auto& oc = sw.at("oracle_config");
    s.oracle_config.n_samples = oc.at("n_samples").get<std::size_t>();
    s.oracle_config.n_slices = oc.at("n_slices").get<std::size_t>();
    s.oracle_config.seed = oc.at("seed").get<std::uint64_t>();
    s.oracle_config.sigma_bound = oc.at("sigma_bound").get<double>();
  }
  return s;
}

// ---------------------------------------------------------------------------
// Figure presets

enum class FigureId { Fig2, Fig3, Fig4, Fig5 };

inline FigureId parse_figure(std::string_view name) {
  if (name == "fig2") return FigureId::Fig2;
  if (name == "fig3") return FigureId::Fig3;
  if (name == "fig4") return FigureId::Fig4;
  if (name == "fig5") return FigureId::Fig5;
  throw Error(ErrorCode::UnknownFigure, "figure must be one of fig2, fig3, fig4, fig5");
}

inline std::string_view figure_name(FigureId id) {
  static constexpr std::array<std::string_view, 4> names{"fig2", "fig3", "fig4", "fig5"};
  return names[static_cast<std::size_t>(id)];
}

struct FigureOptions {
  ModelParams params;
  double start = 0.0;
  double stop = 1.0;
  std::size_t points = 2;
  double h1 = -3.0;
  double h2 = -3.0;
  double dispersion_ratio = 7.0;  // fig3 only
  double delta = 1.0;             // fig4 only; fig3 solves for it
};

/// Caption parameters of each figure. Abscissa: delta for fig2, z Q_a otherwise.
inline FigureOptions figure_defaults(FigureId id) {
  FigureOptions o;
  o.params.r = 1.0;
  o.params.eta = 1.0;
  switch (id) {
    case FigureId::Fig2: o.start = -3.0; o.stop = 3.0; o.points = 601; break;
    case FigureId::Fig3:
      o.params.omega2 = 1.0 + std::numbers::sqrt2;
      o.start = 0.0; o.stop = 4.0; o.points = 401;
      break;
    case FigureId::Fig4: o.start = 0.0; o.stop = 5.0; o.points = 501; break;
    case FigureId::Fig5: o.start = 0.0; o.stop = 3.0; o.points = 601; break;
  }
  return o;
}

inline std::vector<std::string> figure_columns(FigureId id) {
  switch (id) {
    case FigureId::Fig2: return {"delta", "qa"};
    case FigureId::Fig3:
    case FigureId::Fig4: return {"z_qa", "s11_0", "s22_0", "s11_p2", "s22_p2"};
    case FigureId::Fig5: return {"z_qa", "i1", "i2", "i3", "sum_i"};
  }
  return {};
}

/// Detuning in (0, (O1 + O2)/2) where Q_o / Q_a equals `ratio`.
inline double solve_dispersion_ratio(const ModelParams& p, double ratio) {
  const double hi = std::abs(p.omega1 + p.omega2) / 2.0;
  const double lo = hi * 1e-9;
  auto f = [&](double d) { return q_dispersion(p, d) / q_absorption(p, d) - ratio; };
  if (!(hi > 0.0) || !(f(lo) > 0.0) || !(f(hi) < 0.0))
    throw Error(ErrorCode::InvalidSweep, "no detuning with the requested Q_o/Q_a in (0, (O1+O2)/2)");
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

struct FigureResult {
  Table table;
  nlohmann::json sidecar;
};

inline FigureResult run_figure(FigureId id, const FigureOptions& opt) {
  if (opt.points < 2) throw Error(ErrorCode::InvalidSweep, "points >= 2 required");
  if (!(opt.start < opt.stop)) throw Error(ErrorCode::InvalidSweep, "start < stop required");
  const ModelParams p = validate_params(opt.params);
  FigureResult res;
  res.table.columns = figure_columns(id);
  res.table.rows.resize(opt.points);
  nlohmann::json notes = nlohmann::json::array();
  double delta = opt.delta;

  if (id == FigureId::Fig3) {
    delta = solve_dispersion_ratio(p, opt.dispersion_ratio);
    notes.push_back(
        "Curves come from the general spectrum expression. On this branch it assigns the "
        "theta=0 oscillation form to field 2 and the theta=pi/2 form to field 1, rather than "
        "one form to both fields. The oscillation amplitude is (e^{2r}-e^{-2r})/4, the same as "
        "on the omega2 = (1-sqrt2) omega1 branch.");
  }
  if ((id == FigureId::Fig3 || id == FigureId::Fig4) && !(q_absorption(p, delta) > 0.0))
    throw Error(ErrorCode::InvalidSweep, "figure needs Q_a(delta) > 0");
  if (id == FigureId::Fig5 && !equal_rabi(p))
    throw Error(ErrorCode::RegimeError, "fig5 closed forms require omega1 == omega2");

  detail::parallel_for(opt.points, [&](std::size_t i) {
    const double x =
        opt.start + (opt.stop - opt.start) * static_cast<double>(i) / static_cast<double>(opt.points - 1);
    auto& row = res.table.rows[i];
    switch (id) {
      case FigureId::Fig2:
        row = {x, q_absorption(p, x)};
        break;
      case FigureId::Fig3:
      case FigureId::Fig4: {
        const double z = x / q_absorption(p, delta);
        row = {x,
               full_spectrum(p, delta, z, Field::Control, Phase::Zero),
               full_spectrum(p, delta, z, Field::Probe, Phase::Zero),
               full_spectrum(p, delta, z, Field::Control, Phase::Ninety),
               full_spectrum(p, delta, z, Field::Probe, Phase::Ninety)};
        break;
      }
      case FigureId::Fig5: {
        const WitnessReport w = witness_closed_form(p, x, opt.h1, opt.h2);
        row = {x, w.i1, w.i2, w.i3, w.sum};
        break;
      }
    }
  });

  const Thresholds th = thresholds(Convention::NormallyOrdered, p.kappa);
  res.sidecar = {{"tool", "eitent"},
                 {"version", kVersion},
                 {"csv_schema", kCsvSchemaVersion},
                 {"command", "figure"},
                 {"figure", figure_name(id)},
                 {"params", params_to_json(p)},
                 {"range", {{"start", opt.start}, {"stop", opt.stop}, {"points", opt.points}}},
                 {"columns", res.table.columns},
                 {"squeezing_threshold", 1.0},
                 {"thresholds", {{"pair", th.pair}, {"hybrid", th.hybrid}, {"genuine", th.genuine}}},
                 {"notes", notes}};
  if (id != FigureId::Fig2) res.sidecar["delta"] = delta;
  if (id == FigureId::Fig3) res.sidecar["dispersion_ratio"] = opt.dispersion_ratio;
  if (id == FigureId::Fig5) res.sidecar["gains"] = {{"h1", opt.h1}, {"h2", opt.h2}};
  return res;
}

// ---------------------------------------------------------------------------
// Witness report serialization

inline nlohmann::json report_to_json(const WitnessReport& w) {
  return {{"i1", w.i1}, {"i2", w.i2}, {"i3", w.i3}, {"sum", w.sum},
          {"h1", w.h1}, {"h2", w.h2}, {"h1_sign", w.h1_sign}, {"h2_sign", w.h2_sign},
          {"kappa", w.kappa},
          {"convention", w.convention == Convention::Absolute ? "absolute" : "normally_ordered"},
          {"thresholds", {{"pair", w.limits.pair}, {"hybrid", w.limits.hybrid}, {"genuine", w.limits.genuine}}},
          {"verdicts", {{"fields", w.fields_entangled},
                        {"control_atom", w.control_atom_entangled},
                        {"probe_atom", w.probe_atom_entangled},
                        {"genuine_tripartite", w.genuine_tripartite}}}};
}

}  // namespace eitent
