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

#pragma once

// Visibility sweeps over isotropic states: steering value, MDI witness,
// certified randomness and Poisson error bars per grid point.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdisteer/steering.hpp"

namespace mdisteer::sweep {

const char* version();

struct SweepConfig {
  int d = 3;
  std::vector<double> grid = linspace(0.6, 1.0, 21);
  double visibility = 0.987;  // p_eff = visibility * p
  double sdp_tol = 1e-7;
  int trials = 100;
  std::uint64_t seed = 20260101;
  steering::RandomnessMode mode = steering::RandomnessMode::FullTable;
  int x_star = 0;
  double counts_per_cell = 1e4;  // expected counts of a fully correlated cell
  int workers = 0;               // 0: OpenMP default

  /// n evenly spaced points from lo to hi inclusive (n = 1 gives {lo}).
  static std::vector<double> linspace(double lo, double hi, int n);
  /// Throws std::invalid_argument on an unusable configuration.
  void validate() const;
};

/// Applies the keys present in `j` on top of `base`. Unknown keys are an error.
SweepConfig config_from_json(const nlohmann::json& j, SweepConfig base = {});
SweepConfig load_config_file(const std::string& path, SweepConfig base = {});
nlohmann::json config_to_json(const SweepConfig& config);

struct SweepRow {
  double p = 0.0;
  double p_eff = 0.0;
  double S = 0.0;
  double S_LHS = 0.0;
  double W_QRS = 0.0;
  bool steering_detected = false;
  double H_min = 0.0;
  double P_guess = 0.0;
  double S_stddev = 0.0;
  /// NaN when fewer than two resampled tables admit a quantum model.
  double H_stddev = 0.0;
  int h_trials_used = 0;
  std::string error;  // empty on success
  double seconds = 0.0;

  bool ok() const { return error.empty(); }
};

/// Evaluates grid point `index` (its Monte Carlo seed derives from
/// config.seed and index only). `parallel_mc` selects the OpenMP resampler.
SweepRow evaluate_point(const SweepConfig& config, int index, bool parallel_mc = true);

/// All grid points, OpenMP-parallel over rows, returned in grid order.
std::vector<SweepRow> run_sweep(const SweepConfig& config);
/// Serial reference implementation of run_sweep.
std::vector<SweepRow> run_sweep_serial(const SweepConfig& config);

inline constexpr const char* kCsvHeader =
    "p,p_eff,S,S_LHS,W_QRS,steering_detected,H_min,P_guess,S_stddev,H_stddev";
inline constexpr const char* kErrorMarker = "error";

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::string csv_line(const SweepRow& row);

/// Run report: config echo, version, per-row status and timings.
nlohmann::json report_json(const SweepConfig& config, const std::vector<SweepRow>& rows, double wall_seconds);

}  // namespace mdisteer::sweep
