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

// Exact simulation of the steering test and its measurement-device-independent
// (quantum-refereed) variant, plus finite-statistics error bars.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "mdisteer/qmath.hpp"
#include "mdisteer/scenario.hpp"

namespace mdisteer::protocol {

using qmath::ComplexMatrix;
using scenario::Povm;
using scenario::QuestionStateSet;
using scenario::SteeringFunctional;

/// p(a, b | x) for matched settings x = y.
struct CorrelationTable {
  int d = 0;
  int settings = 0;
  std::vector<double> probs;  // row-major (x, a, b)

  CorrelationTable() = default;
  CorrelationTable(int d_, int settings_)
      : d(d_), settings(settings_), probs(static_cast<size_t>(settings_) * d_ * d_, 0.0) {}

  double& at(int a, int b, int x) { return probs[(static_cast<size_t>(x) * d + a) * d + b]; }
  double at(int a, int b, int x) const { return probs[(static_cast<size_t>(x) * d + a) * d + b]; }

  /// Throws unless each setting sums to 1 within tol and no entry is below -1e-12.
  void validate(double tol = 1e-10) const;
};

/// P(a, Yes | x, tau_k^T), indexed by the raw question k.
struct MdiTable {
  int d = 0;
  int settings = 0;
  int questions = 0;
  std::vector<double> probs;  // row-major (x, a, k)

  double at(int a, int x, int k) const {
    return probs[(static_cast<size_t>(x) * d + a) * questions + k];
  }
  double& at(int a, int x, int k) { return probs[(static_cast<size_t>(x) * d + a) * questions + k]; }
};

struct WitnessReport {
  double S = 0.0;
  double S_LHS = 0.0;
  double W_S = 0.0;
  double W_QRS = 0.0;
  bool steering_detected = false;
};

/// Born-rule table p(a,b|x) = Tr[(A_{a|x} (x) B_{b|x}) rho].
CorrelationTable correlations(const ComplexMatrix& state, const std::vector<Povm>& alice,
                              const std::vector<Povm>& bob);

/// S = sum weight * p; W_S = S - S_LHS; W_QRS = W_S / d.
WitnessReport steering_parameter(const CorrelationTable& table, const SteeringFunctional& functional);

/// Tr[(A_{a|x} (x) B1)(rho (x) tau_k^T)] for every (a, x, k). B1 acts on
/// Bob (x) Charlie and defaults to |Phi_d><Phi_d|.
MdiTable mdi_table(const ComplexMatrix& state, const std::vector<Povm>& alice,
                   const QuestionStateSet& qset, const ComplexMatrix& bsm_projector);
MdiTable mdi_table(const ComplexMatrix& state, const std::vector<Povm>& alice,
                   const QuestionStateSet& qset);

/// P(a, Yes | x, tau_{b,x}^T) obtained from the raw entries by linearity.
double mdi_yes_probability(const MdiTable& mdi, const QuestionStateSet& qset, int a, int b, int x);

/// Witness evaluated from MDI data only:
/// W_QRS = sum_{a,b,x} (w(a,b,x) - S_LHS / k) P(a, Yes | x, tau_{b,x}^T).
/// S and W_S in the report are the values implied by P = p / d.
WitnessReport qrs_witness(const MdiTable& mdi, const QuestionStateSet& qset,
                          const SteeringFunctional& functional);

/// Smallest isotropic visibility p with 2p + 2(1-p)/d > 1 + 1/sqrt(d).
double critical_p(int d);

/// Expected coincidence counts per cell plus the Monte Carlo configuration.
struct CountsTable {
  int d = 0;
  int settings = 0;
  std::vector<double> expected;  // row-major (x, a, b), same layout as CorrelationTable
  int trials = 100;
  std::uint64_t seed = 0;
};

/// Counts proportional to `table` with `per_setting_total` events per setting.
CountsTable synthetic_counts(const CorrelationTable& table, double per_setting_total, int trials = 100,
                             std::uint64_t seed = 0);

struct McResult {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  int trials = 0;
  std::vector<double> values;  // per-trial statistic, in trial order
};

/// Mean and sample standard deviation of `values` (at least two).
McResult summarize(std::vector<double> values);

using TableStatistic = std::function<double(const CorrelationTable&)>;

/// Resamples every cell from Poisson(expected), renormalizes per setting and
/// evaluates `statistic`. Trial t draws from its own engine seeded by
/// (seed, t), so the result does not depend on thread scheduling.
/// Parallel (OpenMP) over trials; `statistic` must be thread-safe.
McResult poisson_mc(const CountsTable& counts, const TableStatistic& statistic);
/// Serial reference implementation of poisson_mc.
McResult poisson_mc_serial(const CountsTable& counts, const TableStatistic& statistic);

/// Engine for an independent substream identified by (seed, stream, index).
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// One random local-hidden-state model: a few hidden variables with random
/// weights, random Alice response distributions and random Bob states.
CorrelationTable sample_lhs_table(int d, const std::vector<Povm>& bob, std::mt19937_64& rng);

struct LhsScan {
  double max_S = 0.0;
  long argmax = -1;
  long samples = 0;
};

/// Largest S over `samples` random LHS models (OpenMP parallel).
LhsScan scan_lhs_models(const SteeringFunctional& functional, const std::vector<Povm>& bob, long samples,
                        std::uint64_t seed);
/// Serial reference implementation of scan_lhs_models.
LhsScan scan_lhs_models_serial(const SteeringFunctional& functional, const std::vector<Povm>& bob,
                               long samples, std::uint64_t seed);

}  // namespace mdisteer::protocol
