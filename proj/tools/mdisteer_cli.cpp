// Copyright 2026 The mdisteer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mdisteer command-line front end.
//
//   mdisteer sweep          visibility sweep to CSV (+ JSON run report)
//   mdisteer witness        steering value and MDI witness at one point
//   mdisteer randomness     guessing-probability SDP at one point
//   mdisteer optics-verify  check network descriptions against their targets
//   mdisteer mc             Poisson error bars at one point
//
// Exit status: 0 success, 1 a row or check failed, 2 bad input.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdisteer/optics.hpp"
#include "mdisteer/protocol.hpp"
#include "mdisteer/scenario.hpp"
#include "mdisteer/steering.hpp"
#include "mdisteer/sweep.hpp"

namespace {

using namespace mdisteer;

// Flags shared by the numeric subcommands; unset flags leave the config value.
struct CommonFlags {
  std::string config;
  std::optional<int> d;
  std::optional<double> visibility;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> mode;
  std::optional<double> tol;
  std::optional<int> workers;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "JSON config file; flags override its values");
    app->add_option("--d", d, "qudit dimension")->check(CLI::Range(2, scenario::kMaxFourierDim));
    app->add_option("--visibility", visibility, "p_eff = visibility * p");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--trials", trials, "Monte Carlo trials");
    app->add_option("--mode", mode, "randomness constraints")
        ->check(CLI::IsMember({"full-table", "violation-only"}));
    app->add_option("--tol", tol, "SDP tolerance");
    app->add_option("--workers", workers, "worker threads (0: OpenMP default)");
  }

  sweep::SweepConfig resolve() const {
    sweep::SweepConfig c;
    if (!config.empty()) c = sweep::load_config_file(config, c);
    if (d) c.d = *d;
    if (visibility) c.visibility = *visibility;
    if (seed) c.seed = *seed;
    if (trials) c.trials = *trials;
    if (mode) c.mode = steering::parse_randomness_mode(*mode);
    if (tol) c.sdp_tol = *tol;
    if (workers) c.workers = *workers;
    return c;
  }
};

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

int run_sweep_cmd(const CommonFlags& flags, std::optional<double> p_min, std::optional<double> p_max,
                  std::optional<int> grid, const std::string& out, const std::string& report) {
  sweep::SweepConfig c = flags.resolve();
  if (p_min || p_max || grid) {
    c.grid = sweep::SweepConfig::linspace(p_min.value_or(c.grid.front()), p_max.value_or(c.grid.back()),
                                          grid.value_or(static_cast<int>(c.grid.size())));
  }
  c.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto rows = sweep::run_sweep(c);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream csv;
  sweep::write_csv(csv, rows);
  if (out.empty()) {
    std::cout << csv.str();
  } else if (!write_text(out, csv.str())) {
    return 2;
  }
  const auto rep = sweep::report_json(c, rows, wall);
  if (!report.empty() && !write_text(report, rep.dump(2) + "\n")) return 2;
  int errors = 0;
  for (const auto& r : rows) {
    if (!r.ok()) {
      ++errors;
      std::cerr << "row p=" << r.p << " failed: " << r.error << "\n";
    }
  }
  return errors == 0 ? 0 : 1;
}

int run_witness_cmd(const CommonFlags& flags, double p) {
  const auto c = flags.resolve();
  const double p_eff = c.visibility * p;
  const auto state = scenario::isotropic(c.d, p_eff).matrix;
  const auto mubs = scenario::two_mubs(c.d);
  const auto functional = scenario::steering_functional_two_mubs(c.d);
  const auto direct = protocol::steering_parameter(protocol::correlations(state, mubs, mubs), functional);
  const auto qset = scenario::question_states(c.d);
  const auto mdi = protocol::qrs_witness(protocol::mdi_table(state, mubs, qset), qset, functional);
  std::printf("d            %d\n", c.d);
  std::printf("p            %.6f\n", p);
  std::printf("p_eff        %.6f\n", p_eff);
  std::printf("S            %.9f\n", direct.S);
  std::printf("S_LHS        %.9f\n", direct.S_LHS);
  std::printf("W_S          %.9f\n", direct.W_S);
  std::printf("W_QRS        %.9f   (from %d question states)\n", mdi.W_QRS, qset.questions());
  std::printf("critical_p   %.6f\n", protocol::critical_p(c.d));
  std::printf("steering     %s\n", direct.steering_detected ? "detected" : "not detected");
  return 0;
}

int run_randomness_cmd(const CommonFlags& flags, double p, int x_star, const std::string& dump,
                       const std::string& certificate) {
  const auto c = flags.resolve();
  const double p_eff = c.visibility * p;
  const auto mubs = scenario::two_mubs(c.d);
  const auto table = protocol::correlations(scenario::isotropic(c.d, p_eff).matrix, mubs, mubs);
  const auto r = steering::guessing_probability(table, mubs, c.mode, x_star, c.sdp_tol);
  const auto& s = r.certificate;
  std::printf("mode         %s\n", steering::to_string(r.mode));
  std::printf("p_eff        %.6f\n", p_eff);
  std::printf("x_star       %d\n", r.x_star);
  std::printf("P_guess      %.9f\n", r.p_guess);
  std::printf("H_min        %.9f bits\n", r.h_min);
  std::printf("status       %s after %d iterations\n", sdp::to_string(s.status), s.iterations);
  std::printf("primal/dual  %.12f / %.12f (gap %.2e)\n", s.primal_value, s.dual_value, s.gap);
  std::printf("blocks       %d, constraints %d\n", r.problem.num_blocks(), r.problem.num_constraints());
  if (!dump.empty()) {
    std::ostringstream os;
    r.problem.dump(os);
    if (!write_text(dump, os.str())) return 2;
  }
  if (!certificate.empty()) {
    nlohmann::json j = {{"status", sdp::to_string(s.status)},
                        {"mode", steering::to_string(r.mode)},
                        {"p_eff", p_eff},
                        {"x_star", r.x_star},
                        {"p_guess", r.p_guess},
                        {"h_min", r.h_min},
                        {"primal_value", s.primal_value},
                        {"dual_value", s.dual_value},
                        {"gap", s.gap},
                        {"y", std::vector<double>(s.y.data(), s.y.data() + s.y.size())}};
    if (!write_text(certificate, j.dump(2) + "\n")) return 2;
  }
  return 0;
}

int run_optics_cmd(const std::vector<std::string>& files) {
  std::vector<optics::OpticalNetwork> nets;
  try {
    if (files.empty()) {
      for (const auto& [name, text] : optics::embedded_networks()) nets.push_back(optics::parse_network(text, name));
    }
    for (const auto& f : files) {
      try {
        nets.push_back(optics::load_network_file(f));
      } catch (const optics::NetworkParseError& e) {
        std::cerr << "error: " << f << ": " << e.what() << "\n";
        return 2;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  bool all = true;
  std::printf("%-14s %-22s %-12s %-10s %-10s %s\n", "network", "target", "distance", "tolerance", "success", "result");
  for (const auto& net : nets) {
    const auto r = optics::verify_network(net);
    all = all && r.pass;
    std::printf("%-14s %-22s %-12.3e %-10.1e %-10.6f %s\n", r.name.c_str(), r.target.c_str(), r.deviation,
                r.tolerance, r.success_probability, r.pass ? "PASS" : "FAIL");
  }
  return all ? 0 : 1;
}

int run_mc_cmd(const CommonFlags& flags, double p, double counts_per_cell, bool with_h) {
  auto c = flags.resolve();
  const double p_eff = c.visibility * p;
  const auto mubs = scenario::two_mubs(c.d);
  const auto functional = scenario::steering_functional_two_mubs(c.d);
  const auto table = protocol::correlations(scenario::isotropic(c.d, p_eff).matrix, mubs, mubs);
  const auto counts = protocol::synthetic_counts(table, counts_per_cell * c.d, c.trials, c.seed);
  const auto s = protocol::poisson_mc(
      counts, [&](const protocol::CorrelationTable& t) { return protocol::steering_parameter(t, functional).S; });
  std::printf("trials       %d\n", s.trials);
  std::printf("S            %.9f +- %.9f\n", s.mean, s.stddev);
  if (with_h) {
    const auto h = protocol::poisson_mc(counts, [&](const protocol::CorrelationTable& t) {
      return steering::guessing_probability(t, mubs, c.mode, c.x_star, c.sdp_tol).h_min;
    });
    std::printf("H_min        %.9f +- %.9f\n", h.mean, h.stddev);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measurement-device-independent qudit steering toolkit"};
  app.set_version_flag("--version", mdisteer::sweep::version());
  app.require_subcommand(1);

  CommonFlags sweep_flags, witness_flags, rnd_flags, mc_flags;

  auto* sweep_cmd = app.add_subcommand("sweep", "visibility sweep to CSV");
  sweep_flags.attach(sweep_cmd);
  std::optional<double> p_min, p_max;
  std::optional<int> grid;
  std::string out, report;
  sweep_cmd->add_option("--p-min", p_min, "first grid point");
  sweep_cmd->add_option("--p-max", p_max, "last grid point");
  sweep_cmd->add_option("--grid", grid, "number of grid points")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", out, "CSV output path (default stdout)");
  sweep_cmd->add_option("--report", report, "JSON run report path");

  double point_p = 1.0;
  auto* witness_cmd = app.add_subcommand("witness", "steering value and MDI witness at one point");
  witness_flags.attach(witness_cmd);
  witness_cmd->add_option("--p", point_p, "isotropic parameter before visibility")->check(CLI::Range(0.0, 1.0));

  auto* rnd_cmd = app.add_subcommand("randomness", "guessing-probability SDP at one point");
  rnd_flags.attach(rnd_cmd);
  int x_star = 0;
  std::string dump, certificate;
  rnd_cmd->add_option("--p", point_p, "isotropic parameter before visibility")->check(CLI::Range(0.0, 1.0));
  rnd_cmd->add_option("--x-star", x_star, "setting whose outcome Eve guesses")->check(CLI::Range(0, 1));
  rnd_cmd->add_option("--dump", dump, "write the SDP in the plain-text dump format");
  rnd_cmd->add_option("--certificate", certificate, "write the solution and dual vector as JSON");

  auto* optics_cmd = app.add_subcommand("optics-verify", "verify optical network descriptions");
  std::vector<std::string> files;
  optics_cmd->add_option("files", files, "network files (default: the built-in set)");

  auto* mc_cmd = app.add_subcommand("mc", "Poisson error bars at one point");
  mc_flags.attach(mc_cmd);
  double counts_per_cell = 1e4;
  bool with_h = false;
  mc_cmd->add_option("--p", point_p, "isotropic parameter before visibility")->check(CLI::Range(0.0, 1.0));
  mc_cmd->add_option("--counts-per-cell", counts_per_cell, "expected counts of a fully correlated cell");
  mc_cmd->add_flag("--with-h", with_h, "also resample H_min (one SDP per trial)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sweep_cmd) return run_sweep_cmd(sweep_flags, p_min, p_max, grid, out, report);
    if (*witness_cmd) return run_witness_cmd(witness_flags, point_p);
    if (*rnd_cmd) return run_randomness_cmd(rnd_flags, point_p, x_star, dump, certificate);
    if (*optics_cmd) return run_optics_cmd(files);
    if (*mc_cmd) return run_mc_cmd(mc_flags, point_p, counts_per_cell, with_h);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
