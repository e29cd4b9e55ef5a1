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

#include "mdisteer/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <omp.h>

#include "mdisteer/protocol.hpp"
#include "mdisteer/scenario.hpp"

#ifndef MDISTEER_VERSION
#define MDISTEER_VERSION "unknown"
#endif

namespace mdisteer::sweep {

const char* version() { return MDISTEER_VERSION; }

std::vector<double> SweepConfig::linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("linspace: need at least one point");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

void SweepConfig::validate() const {
  if (d < 2 || d > scenario::kMaxFourierDim) throw std::invalid_argument("config: d out of range");
  if (grid.empty()) throw std::invalid_argument("config: empty grid");
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw std::invalid_argument("config: grid values must lie in [0,1]");
    if (i > 0 && grid[i] < grid[i - 1]) throw std::invalid_argument("config: grid must be sorted");
  }
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw std::invalid_argument("config: visibility must lie in [0,1]");
  if (!(sdp_tol > 0.0 && sdp_tol < 1e-2)) throw std::invalid_argument("config: sdp tolerance out of range");
  if (trials < 2) throw std::invalid_argument("config: need at least 2 Monte Carlo trials");
  if (x_star < 0 || x_star > 1) throw std::invalid_argument("config: x_star must be 0 or 1");
  if (!(counts_per_cell > 0.0)) throw std::invalid_argument("config: counts per cell must be positive");
  if (workers < 0) throw std::invalid_argument("config: workers must be non-negative");
  if (mode == steering::RandomnessMode::Assemblage) {
    throw std::invalid_argument("config: mode must be full-table or violation-only");
  }
}

SweepConfig config_from_json(const nlohmann::json& j, SweepConfig c) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  double p_min = c.grid.front();
  double p_max = c.grid.back();
  int points = static_cast<int>(c.grid.size());
  bool range_given = false;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "d") {
        c.d = value.get<int>();
      } else if (key == "p_min") {
        p_min = value.get<double>();
        range_given = true;
      } else if (key == "p_max") {
        p_max = value.get<double>();
        range_given = true;
      } else if (key == "grid") {
        points = value.get<int>();
        range_given = true;
      } else if (key == "p_values") {
        c.grid = value.get<std::vector<double>>();
      } else if (key == "visibility") {
        c.visibility = value.get<double>();
      } else if (key == "sdp_tol") {
        c.sdp_tol = value.get<double>();
      } else if (key == "trials") {
        c.trials = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "mode") {
        c.mode = steering::parse_randomness_mode(value.get<std::string>());
      } else if (key == "x_star") {
        c.x_star = value.get<int>();
      } else if (key == "counts_per_cell") {
        c.counts_per_cell = value.get<double>();
      } else if (key == "workers") {
        c.workers = value.get<int>();
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("config: bad value for '" + key + "': " + e.what());
    }
  }
  if (range_given) {
    if (j.contains("p_values")) throw std::invalid_argument("config: give either p_values or p_min/p_max/grid");
    c.grid = SweepConfig::linspace(p_min, p_max, points);
  }
  return c;
}

SweepConfig load_config_file(const std::string& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

nlohmann::json config_to_json(const SweepConfig& c) {
  return {{"d", c.d},
          {"p_values", c.grid},
          {"visibility", c.visibility},
          {"sdp_tol", c.sdp_tol},
          {"trials", c.trials},
          {"seed", c.seed},
          {"mode", steering::to_string(c.mode)},
          {"x_star", c.x_star},
          {"counts_per_cell", c.counts_per_cell},
          {"workers", c.workers}};
}

namespace {

constexpr std::uint64_t kRowStream = 0x726f77;  // "row"

}  // namespace

SweepRow evaluate_point(const SweepConfig& config, int index, bool parallel_mc) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.p = config.grid.at(index);
  row.p_eff = config.visibility * row.p;
  try {
    const int d = config.d;
    const auto state = scenario::isotropic(d, row.p_eff).matrix;
    const auto mubs = scenario::two_mubs(d);
    const auto functional = scenario::steering_functional_two_mubs(d);
    const auto table = protocol::correlations(state, mubs, mubs);

    const auto witness = protocol::steering_parameter(table, functional);
    row.S = witness.S;
    row.S_LHS = witness.S_LHS;
    row.steering_detected = witness.steering_detected;

    const auto qset = scenario::question_states(d);
    row.W_QRS = protocol::qrs_witness(protocol::mdi_table(state, mubs, qset), qset, functional).W_QRS;

    const auto rnd = steering::guessing_probability(table, mubs, config.mode, config.x_star, config.sdp_tol);
    row.P_guess = rnd.p_guess;
    row.H_min = rnd.h_min;

    const std::uint64_t row_seed = protocol::substream(config.seed, kRowStream, static_cast<std::uint64_t>(index))();
    const auto counts = protocol::synthetic_counts(table, config.counts_per_cell * d, config.trials, row_seed);
    const auto mc = parallel_mc ? protocol::poisson_mc : protocol::poisson_mc_serial;

    row.S_stddev = mc(counts, [&](const protocol::CorrelationTable& t) {
                     return protocol::steering_parameter(t, functional).S;
                   }).stddev;

    // Resampled tables at p_eff = 1 need not admit any quantum model; such
    // trials carry no H value.
    const auto h = mc(counts, [&](const protocol::CorrelationTable& t) {
      try {
        return steering::guessing_probability(t, mubs, config.mode, config.x_star, config.sdp_tol).h_min;
      } catch (const std::domain_error&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    });
    std::vector<double> usable;
    for (double v : h.values)
      if (!std::isnan(v)) usable.push_back(v);
    row.h_trials_used = static_cast<int>(usable.size());
    row.H_stddev = usable.size() >= 2 ? protocol::summarize(std::move(usable)).stddev
                                      : std::numeric_limits<double>::quiet_NaN();
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  config.validate();
  const int n = static_cast<int>(config.grid.size());
  std::vector<SweepRow> rows(n);
  const int threads = config.workers > 0 ? config.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int i = 0; i < n; ++i) rows[i] = evaluate_point(config, i, true);
  return rows;
}

std::vector<SweepRow> run_sweep_serial(const SweepConfig& config) {
  config.validate();
  std::vector<SweepRow> rows;
  for (int i = 0; i < static_cast<int>(config.grid.size()); ++i) rows.push_back(evaluate_point(config, i, false));
  return rows;
}

std::string csv_line(const SweepRow& r) {
  char buf[512];
  if (!r.ok()) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%s,%s,%s,%s,%s,%s,%s,%s", r.p, r.p_eff, kErrorMarker, kErrorMarker,
                  kErrorMarker, kErrorMarker, kErrorMarker, kErrorMarker, kErrorMarker, kErrorMarker);
  } else {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.9f,%.9f,%.9f,%s,%.9f,%.9f,%.9f,%.9f", r.p, r.p_eff, r.S, r.S_LHS,
                  r.W_QRS, r.steering_detected ? "true" : "false", r.H_min, r.P_guess, r.S_stddev, r.H_stddev);
  }
  return buf;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kCsvHeader << "\n";
  for (const auto& r : rows) os << csv_line(r) << "\n";
}

nlohmann::json report_json(const SweepConfig& config, const std::vector<SweepRow>& rows, double wall_seconds) {
  nlohmann::json out;
  out["tool"] = "mdisteer";
  out["version"] = version();
  out["config"] = config_to_json(config);
  out["wall_seconds"] = wall_seconds;
  int errors = 0;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json jr = {{"p", r.p}, {"seconds", r.seconds}, {"ok", r.ok()}};
    if (r.ok()) {
      jr["h_trials_used"] = r.h_trials_used;
    } else {
      jr["error"] = r.error;
      ++errors;
    }
    list.push_back(std::move(jr));
  }
  out["rows"] = std::move(list);
  out["errors"] = errors;
  return out;
}

}  // namespace mdisteer::sweep
