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

// Command-line front end. Exit codes: 0 success, 1 statistical validation
// failure, 2 usage or parameter error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "eitent/eitent.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStatistical = 1;
constexpr int kExitUsage = 2;
constexpr const char* kOutputDirEnv = "EITENT_OUTPUT_DIR";

struct CommonFlags {
  eitent::ModelParams params;
  double h1 = -3.0;
  double h2 = -3.0;
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "csv";
  // Options whose presence overrides figure defaults.
  std::vector<std::pair<CLI::Option*, double*>> param_opts;
  std::vector<std::pair<CLI::Option*, double>> defaults_seen;
};

void add_common(CLI::App* cmd, CommonFlags& f, const std::string& default_format) {
  f.format = default_format;
  auto bind = [&](const char* name, double* target, const char* help) {
    f.param_opts.emplace_back(cmd->add_option(name, *target, help), target);
  };
  bind("--omega1", &f.params.omega1, "control Rabi frequency (units of gamma)");
  bind("--omega2", &f.params.omega2, "probe Rabi frequency (units of gamma)");
  bind("--gamma", &f.params.gamma, "excited-state decay rate");
  bind("--gamma1", &f.params.gamma1, "ground-state relaxation rate 1 (recorded only)");
  bind("--gamma2", &f.params.gamma2, "ground-state relaxation rate 2 (recorded only)");
  bind("--coupling", &f.params.coupling_density, "coupling density C = N g^2 / c");
  bind("--r", &f.params.r, "squeezing parameter");
  bind("--eta", &f.params.eta, "preparation efficiency in [0, 1]");
  bind("--kappa", &f.params.kappa, "collective dipole scale 4 m w_a x^2 / hbar");
  f.param_opts.emplace_back(cmd->add_option("--h1", f.h1, "witness gain h1"), &f.h1);
  f.param_opts.emplace_back(cmd->add_option("--h2", f.h2, "witness gain h2"), &f.h2);
  cmd->add_option("--seed", f.seed, "oracle seed");
  cmd->add_option("--out", f.out, "output path (default: $" + std::string(kOutputDirEnv) + "/<name> or stdout)");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

// Copies explicitly given parameter flags onto `target`.
void apply_overrides(const CommonFlags& f, eitent::ModelParams& target, double& h1, double& h2) {
  const eitent::ModelParams& src = f.params;
  for (const auto& [opt, ptr] : f.param_opts) {
    if (opt->count() == 0) continue;
    if (ptr == &src.omega1) target.omega1 = *ptr;
    else if (ptr == &src.omega2) target.omega2 = *ptr;
    else if (ptr == &src.gamma) target.gamma = *ptr;
    else if (ptr == &src.gamma1) target.gamma1 = *ptr;
    else if (ptr == &src.gamma2) target.gamma2 = *ptr;
    else if (ptr == &src.coupling_density) target.coupling_density = *ptr;
    else if (ptr == &src.r) target.r = *ptr;
    else if (ptr == &src.eta) target.eta = *ptr;
    else if (ptr == &src.kappa) target.kappa = *ptr;
    else if (ptr == &f.h1) h1 = *ptr;
    else if (ptr == &f.h2) h2 = *ptr;
  }
}

std::optional<std::filesystem::path> resolve_output(const std::string& out, const std::string& stem,
                                                    const std::string& ext) {
  if (!out.empty()) return std::filesystem::path(out);
  if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
    std::filesystem::create_directories(dir);
    return std::filesystem::path(dir) / (stem + "." + ext);
  }
  return std::nullopt;
}

void write_text(const std::optional<std::filesystem::path>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  std::ofstream os(*path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path->string());
  os << text;
}

// Table output; a file destination also gets a JSON sidecar next to it.
void emit_table(const eitent::Table& table, const nlohmann::json& sidecar, const std::string& format,
                const std::optional<std::filesystem::path>& path) {
  if (format == "json") {
    nlohmann::json doc = {{"meta", sidecar}, {"data", eitent::table_to_json(table)}};
    write_text(path, doc.dump(2) + "\n");
    return;
  }
  std::ostringstream os;
  eitent::write_csv(os, table);
  write_text(path, os.str());
  if (path) write_text(std::filesystem::path(path->string() + ".json"), sidecar.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quadrature-noise spectra and tri-partite entanglement witnesses for twin beams in an EIT medium"};
  app.set_version_flag("--version", std::string(eitent::kVersion));
  app.require_subcommand(1);

  // sweep
  CommonFlags sweep_flags;
  eitent::SweepSpec sweep;
  std::string axis = "z";
  std::string replay;
  std::vector<std::string> outputs;
  std::optional<double> sweep_z, sweep_zqa;
  std::size_t sweep_samples = 100000, sweep_slices = 64;
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate every observable along one parameter axis");
  add_common(sweep_cmd, sweep_flags, "csv");
  sweep_cmd->add_option("--axis", axis, "z (as z*Q_a), delta, r, eta or ratio (omega2/omega1)");
  sweep_cmd->add_option("--start", sweep.start, "first axis value");
  sweep_cmd->add_option("--stop", sweep.stop, "last axis value");
  sweep_cmd->add_option("--points", sweep.points, "number of grid points (>= 2)");
  sweep_cmd->add_option("--delta", sweep.delta, "sideband detuning (units of gamma)");
  sweep_cmd->add_option("--z", sweep_z, "fixed physical position");
  sweep_cmd->add_option("--zqa", sweep_zqa, "fixed position as z*Q_a");
  sweep_cmd->add_option("--columns", outputs, "subset of output columns")->delimiter(',');
  sweep_cmd->add_flag("--oracle", sweep.oracle, "append Monte Carlo estimate of s22_0");
  sweep_cmd->add_option("--samples", sweep_samples, "oracle samples");
  sweep_cmd->add_option("--slices", sweep_slices, "oracle slices");
  sweep_cmd->add_option("--replay", replay, "re-run the sweep recorded in a JSON sidecar");

  // figure
  CommonFlags fig_flags;
  std::string figure;
  std::optional<double> fig_start, fig_stop;
  std::optional<std::size_t> fig_points;
  std::optional<double> fig_delta, fig_ratio;
  auto* fig_cmd = app.add_subcommand("figure", "emit the data series of a reference figure");
  add_common(fig_cmd, fig_flags, "csv");
  fig_cmd->add_option("which", figure, "fig2, fig3, fig4 or fig5")->required();
  fig_cmd->add_option("--start", fig_start, "override abscissa start");
  fig_cmd->add_option("--stop", fig_stop, "override abscissa stop");
  fig_cmd->add_option("--points", fig_points, "override point count");
  fig_cmd->add_option("--delta", fig_delta, "detuning for fig4");
  fig_cmd->add_option("--ratio", fig_ratio, "target Q_o/Q_a for fig3");

  // witness
  CommonFlags wit_flags;
  double wit_delta = 1.0;
  std::optional<double> wit_z, wit_zqa;
  auto* wit_cmd = app.add_subcommand("witness", "witness report at one grid point");
  add_common(wit_cmd, wit_flags, "json");
  wit_cmd->add_option("--delta", wit_delta, "sideband detuning (units of gamma)");
  wit_cmd->add_option("--z", wit_z, "physical position");
  wit_cmd->add_option("--zqa", wit_zqa, "position as z*Q_a");

  // validate
  CommonFlags val_flags;
  std::string preset = "default";
  eitent::OracleConfig oracle;
  auto* val_cmd = app.add_subcommand("validate", "compare the Monte Carlo oracle with the closed forms");
  add_common(val_cmd, val_flags, "json");
  val_cmd->add_option("--preset", preset, "grid preset")->check(CLI::IsMember({"default"}));
  val_cmd->add_option("--samples", oracle.n_samples, "samples per grid point (>= 1000)");
  val_cmd->add_option("--slices", oracle.n_slices, "cascade slices (>= 2)");
  val_cmd->add_option("--sigma", oracle.sigma_bound, "acceptance band in standard errors");
  val_cmd->add_option("--workers", oracle.workers, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sweep_cmd->parsed()) {
      if (!replay.empty()) {
        std::ifstream is(replay);
        if (!is) throw eitent::Error(eitent::ErrorCode::InvalidSweep, "cannot read " + replay);
        sweep = eitent::sweep_from_sidecar(nlohmann::json::parse(is));
      } else {
        sweep.axis = eitent::parse_axis(axis);
        sweep.fixed = sweep_flags.params;
        sweep.h1 = sweep_flags.h1;
        sweep.h2 = sweep_flags.h2;
        sweep.z = sweep_z;
        sweep.z_qa = sweep_zqa;
        sweep.outputs = outputs;
        sweep.oracle_config.seed = sweep_flags.seed;
        sweep.oracle_config.n_samples = sweep_samples;
        sweep.oracle_config.n_slices = sweep_slices;
      }
      eitent::validate_sweep(sweep);
      const auto table = eitent::run_sweep(sweep);
      const auto path = resolve_output(sweep_flags.out, "sweep", sweep_flags.format);
      emit_table(table, eitent::sweep_sidecar(sweep, table), sweep_flags.format, path);
      return kExitOk;
    }

    if (fig_cmd->parsed()) {
      const auto id = eitent::parse_figure(figure);
      auto opt = eitent::figure_defaults(id);
      apply_overrides(fig_flags, opt.params, opt.h1, opt.h2);
      if (fig_start) opt.start = *fig_start;
      if (fig_stop) opt.stop = *fig_stop;
      if (fig_points) opt.points = *fig_points;
      if (fig_delta) opt.delta = *fig_delta;
      if (fig_ratio) opt.dispersion_ratio = *fig_ratio;
      const auto res = eitent::run_figure(id, opt);
      const auto path = resolve_output(fig_flags.out, std::string(eitent::figure_name(id)), fig_flags.format);
      emit_table(res.table, res.sidecar, fig_flags.format, path);
      return kExitOk;
    }

    if (wit_cmd->parsed()) {
      const auto p = eitent::validate_params(wit_flags.params);
      if (wit_z && wit_zqa) throw eitent::Error(eitent::ErrorCode::InvalidSweep, "give either --z or --zqa");
      const double qa = eitent::q_absorption(p, wit_delta);
      double z = wit_z.value_or(0.0);
      if (wit_zqa) {
        if (!(qa > 0.0)) throw eitent::Error(eitent::ErrorCode::CarrierFrequency, "--zqa needs Q_a(delta) > 0");
        z = *wit_zqa / qa;
      }
      eitent::validate_grid_point({z, wit_delta});
      const auto in = eitent::input_covariance(p.r, p.eta);
      const auto cov = eitent::covariance_at(p, wit_delta, z);
      const auto cert = eitent::certify_conservation(in, cov, 1e-9);
      nlohmann::json doc = {{"params", eitent::params_to_json(p)},
                            {"delta", wit_delta},
                            {"z", z},
                            {"z_qa", z * qa},
                            {"conservation", {{"holds", cert.holds},
                                              {"deviation_phase0", cert.deviation_phase0},
                                              {"deviation_phase90", cert.deviation_phase90},
                                              {"tolerance", cert.tolerance}}}};
      std::vector<std::pair<std::string, eitent::WitnessReport>> routes;
      if (eitent::equal_rabi(p)) {
        routes.emplace_back("closed_form", eitent::witness_closed_form(p, z * qa, wit_flags.h1, wit_flags.h2));
        const auto g = eitent::optimal_gain(p, z * qa);
        doc["optimal_gain"] = g.defined ? nlohmann::json{{"h", g.h}, {"value", g.value}}
                                        : nlohmann::json("vertex-undefined");
      }
      if (cert.holds)
        routes.emplace_back("covariance", eitent::witness_from_covariance(cert, wit_flags.h1, wit_flags.h2, p.kappa));
      if (wit_delta != 0.0 && p.r != 0.0) doc["onset_distance"] = eitent::onset_distance(p, wit_delta);
      const auto path = resolve_output(wit_flags.out, "witness", wit_flags.format);
      if (wit_flags.format == "json") {
        for (const auto& [name, rep] : routes) doc[name] = eitent::report_to_json(rep);
        write_text(path, doc.dump(2) + "\n");
      } else {
        std::ostringstream os;
        os << "route,i1,i2,i3,sum_i,genuine\n";
        for (const auto& [name, rep] : routes)
          os << name << ',' << eitent::format_number(rep.i1) << ',' << eitent::format_number(rep.i2) << ','
             << eitent::format_number(rep.i3) << ',' << eitent::format_number(rep.sum) << ','
             << (eitent::genuine_verdict(rep) ? 1 : 0) << '\n';
        write_text(path, os.str());
      }
      return kExitOk;
    }

    if (val_cmd->parsed()) {
      oracle.seed = val_flags.seed;
      eitent::validate_config(oracle);
      const auto cases = eitent::default_validation_preset();
      const auto rep = eitent::validate_cases(cases, oracle);
      auto doc = eitent::to_json(rep);
      doc["tool"] = "eitent";
      doc["version"] = eitent::kVersion;
      doc["preset"] = preset;
      const auto path = resolve_output(val_flags.out, "validate", "json");
      write_text(path, doc.dump(2) + "\n");
      const bool ok = rep.pass_fraction >= 0.99;
      std::cerr << "pass fraction " << rep.pass_fraction << (ok ? " (ok)" : " (below 0.99)") << '\n';
      return ok ? kExitOk : kExitStatistical;
    }
  } catch (const eitent::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
