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

// Acceptance suite: one PASS/FAIL line per primary criterion. Exit status is
// nonzero when any criterion fails. Tolerances are fixed here and nowhere else.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "mdisteer/optics.hpp"
#include "mdisteer/steering.hpp"
#include "mdisteer/sweep.hpp"

namespace {

using namespace mdisteer;
using qmath::ComplexMatrix;

constexpr double kSaturationTol = 1e-9;
constexpr double kSaturationSeconds = 1.0;
constexpr double kBoundTol = 1e-9;
constexpr double kLinearLawTol = 1e-12;
constexpr double kQutritThreshold = 0.683;   // to three decimals
constexpr double kQubitThreshold = 0.7071;
constexpr double kQubitThresholdTol = 1e-4;
constexpr double kMdiTol = 1e-12;
constexpr double kReconstructionTol = 1e-12;
constexpr double kCeilingTol = 1e-4;
constexpr double kCeilingSeconds = 30.0;
constexpr double kVisibility = 0.987;
constexpr double kExpectedS = 1.983;
constexpr double kExpectedSTol = 0.002;
constexpr double kExpectedH = 1.106;
constexpr double kExpectedHTol = 0.08;
constexpr double kLhsGuessTol = 1e-6;
constexpr long kLhsSamples = 10000;
constexpr double kLhsSamplerSlack = 1e-9;
constexpr int kHaarTargets = 50;
constexpr double kQhqTol = 1e-6;
constexpr double kBsmTol = 1e-6;
constexpr double kCountsPerCell = 1e4;
constexpr int kTrials = 100;
constexpr double kErrorBarLo = 3.1622776601683795e-4;  // 10^-3.5
constexpr double kErrorBarHi = 3.1622776601683795e-3;  // 10^-2.5

int failures = 0;

void report(const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename... Args>
std::string fmt(const char* format, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Born rule computed from the full joint operator, without the library's
// correlation routine.
double born(const ComplexMatrix& rho, const ComplexMatrix& a, const ComplexMatrix& b) {
  return (qmath::kron(a, b) * rho).trace().real();
}

double oracle_S(const ComplexMatrix& rho, int d) {
  const auto m = scenario::two_mubs(d);
  double s = 0.0;
  for (int a = 0; a < d; ++a) {
    s += born(rho, m[0][a], m[0][a]);
    s += born(rho, m[1][a], m[1][(d - a) % d]);
  }
  return s;
}

// lambda_max(P_u + P_v) = 1 + |<u|v>| maximized over basis vectors.
double overlap_bound(int d) {
  const auto m = scenario::two_mubs(d);
  double best = 0.0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m[0][a] + m[1][b], Eigen::EigenvaluesOnly);
      best = std::max(best, es.eigenvalues()(d - 1));
    }
  return best;
}

void steering_saturation() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto mubs = scenario::two_mubs(3);
  const auto table = protocol::correlations(scenario::isotropic(3, 1.0).matrix, mubs, mubs);
  const double s = protocol::steering_parameter(table, scenario::steering_functional_two_mubs(3)).S;
  const double dt = seconds_since(t0);
  const double oracle = oracle_S(scenario::isotropic(3, 1.0).matrix, 3);
  report("steering-saturation", std::abs(s - 2.0) < kSaturationTol && std::abs(oracle - 2.0) < kSaturationTol &&
                                    dt < kSaturationSeconds,
         fmt("S=%.12f oracle=%.12f time=%.3fs", s, oracle, dt));
}

void lhs_bound() {
  bool ok = true;
  std::ostringstream detail;
  for (int d = 2; d <= 5; ++d) {
    const double brute =
        steering::lhs_bound_bruteforce(scenario::two_mubs(d), scenario::steering_functional_two_mubs(d));
    const double closed = 1.0 + 1.0 / std::sqrt(d);
    const double overlap = overlap_bound(d);
    ok = ok && std::abs(brute - closed) < kBoundTol && std::abs(overlap - closed) < kBoundTol;
    detail << "d=" << d << " " << fmt("%.12f", brute) << " ";
  }
  report("lhs-bound", ok, detail.str() + "(closed form and overlap oracle agree)");
}

void linear_law() {
  const auto mubs = scenario::two_mubs(3);
  const auto f = scenario::steering_functional_two_mubs(3);
  double worst = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double p = i / 10.0;
    const auto table = protocol::correlations(scenario::isotropic(3, p).matrix, mubs, mubs);
    worst = std::max(worst, std::abs(protocol::steering_parameter(table, f).S - (2 * p + 2 * (1 - p) / 3.0)));
  }
  report("linear-law", worst < kLinearLawTol, fmt("max deviation %.3e over 11 points", worst));
}

void threshold() {
  const double p3 = protocol::critical_p(3);
  const double p2 = protocol::critical_p(2);
  // Oracle: solve 2p + 2(1-p)/d = 1 + 1/sqrt(d) directly.
  auto solve = [](int d) { return (1.0 + 1.0 / std::sqrt(d) - 2.0 / d) / (2.0 - 2.0 / d); };
  const bool ok = std::round(p3 * 1000.0) / 1000.0 == kQutritThreshold && std::abs(p3 - solve(3)) < 1e-12 &&
                  std::abs(p2 - kQubitThreshold) < kQubitThresholdTol;
  report("threshold", ok, fmt("critical_p(3)=%.6f critical_p(2)=%.6f", p3, p2));
}

void mdi_equivalence() {
  std::mt19937_64 rng(5150);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int d = 3;
  const auto mubs = scenario::two_mubs(d);
  const auto qset = scenario::question_states(d);
  const auto f = scenario::steering_functional_two_mubs(d);
  const qmath::Ket phi = scenario::max_entangled(d);
  const ComplexMatrix bsm = phi * phi.adjoint();
  double worst = 0.0;
  double worst_w = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto rho = scenario::isotropic(d, unif(rng)).matrix;
    const auto table = protocol::correlations(rho, mubs, mubs);
    const auto mdi = protocol::mdi_table(rho, mubs, qset);
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          // Direct route: Charlie sends the transpose of Bob's element.
          const ComplexMatrix sent = mubs[x][b].transpose();
          const double direct =
              (qmath::kron(mubs[x][a], bsm) *
               qmath::kron(rho, sent)).trace().real();
          const double linear = protocol::mdi_yes_probability(mdi, qset, a, b, x);
          const double expected = born(rho, mubs[x][a], mubs[x][b]) / d;
          worst = std::max({worst, std::abs(direct - expected), std::abs(linear - expected),
                            std::abs(table.at(a, b, x) / d - expected)});
        }
    worst_w = std::max(worst_w, std::abs(protocol::qrs_witness(mdi, qset, f).W_QRS -
                                         protocol::steering_parameter(table, f).W_S / d));
  }
  report("mdi-equivalence", worst < kMdiTol && worst_w < kMdiTol,
         fmt("max |P - p/d| %.3e, max |W_QRS - W_S/d| %.3e over 20 instances", worst, worst_w));
}

void question_states() {
  const auto q = scenario::question_states_qutrit();
  double worst = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int b = 0; b < 3; ++b) {
      ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
      for (int k = 0; k < q.questions(); ++k) sum += q.s(b, x, k) * q.sent_state(k).transpose();
      worst = std::max(worst, (sum - scenario::fourier_mub(3, x)[b]).cwiseAbs().maxCoeff());
    }
  report("question-states", worst < kReconstructionTol, fmt("max reconstruction error %.3e over 6 elements", worst));
}

void randomness_ceiling() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto mubs = scenario::two_mubs(3);
  const auto table = protocol::correlations(scenario::isotropic(3, 1.0).matrix, mubs, mubs);
  const double h = steering::guessing_probability(table, mubs, steering::RandomnessMode::FullTable).h_min;
  const double dt = seconds_since(t0);
  report("randomness-ceiling", std::abs(h - std::log2(3.0)) < kCeilingTol && dt < kCeilingSeconds,
         fmt("H_min=%.6f log2(3)=%.6f time=%.3fs", h, std::log2(3.0), dt));
}

void experimental_cross_check() {
  const auto mubs = scenario::two_mubs(3);
  const auto f = scenario::steering_functional_two_mubs(3);
  const auto table = protocol::correlations(scenario::isotropic(3, kVisibility).matrix, mubs, mubs);
  const double s = protocol::steering_parameter(table, f).S;
  const double h_violation =
      steering::guessing_probability(table, mubs, steering::RandomnessMode::ViolationOnly).h_min;
  const double h_table = steering::guessing_probability(table, mubs, steering::RandomnessMode::FullTable).h_min;
  const bool ok = std::abs(s - kExpectedS) <= kExpectedSTol && std::abs(h_violation - kExpectedH) <= kExpectedHTol &&
                  h_violation > 1.0;
  report("experimental-cross-check", ok,
         fmt("S=%.6f H_min(violation-only)=%.6f; reference S=%.3f H=%.3f", s, h_violation, kExpectedS, kExpectedH));
  std::printf("INFO experimental-cross-check: H_min(full-table)=%.6f, |diff|=%.3f from %.3f\n", h_table,
              std::abs(h_table - kExpectedH), kExpectedH);
}

void lhs_randomness_consistency() {
  bool ok = true;
  int lhs_points = 0;
  double worst = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double p = 0.05 * i;
    const auto asm_ = steering::assemblage(scenario::isotropic(3, p).matrix, scenario::two_mubs(3));
    if (steering::lhs_membership(asm_).decision != steering::LhsDecision::Lhs) continue;
    ++lhs_points;
    const double pg = steering::guessing_probability(asm_).p_guess;
    worst = std::max(worst, std::abs(pg - 1.0));
    ok = ok && std::abs(pg - 1.0) < kLhsGuessTol;
  }
  report("lhs-randomness-consistency", ok && lhs_points > 0,
         fmt("%d LHS assemblages, max |P_guess - 1| %.3e", lhs_points, worst));
}

void lhs_sampler() {
  bool ok = true;
  std::ostringstream detail;
  for (int d = 2; d <= 4; ++d) {
    const auto f = scenario::steering_functional_two_mubs(d);
    const auto scan = protocol::scan_lhs_models(f, scenario::two_mubs(d), kLhsSamples, 404 + d);
    ok = ok && scan.samples == kLhsSamples && scan.max_S <= f.lhs_bound + kLhsSamplerSlack;
    detail << fmt("d=%d max S %.9f <= %.9f; ", d, scan.max_S, f.lhs_bound);
  }
  report("lhs-sampler", ok, detail.str() + fmt("%ld models each", kLhsSamples));
}

void optics_networks() {
  std::mt19937_64 rng(2718);
  double worst_qhq = 0.0;
  for (int i = 0; i < kHaarTargets; ++i) {
    const ComplexMatrix u = qmath::random_unitary(2, rng);
    worst_qhq = std::max(worst_qhq, optics::phase_distance(optics::qhq_matrix(optics::solve_qhq(u)), u));
  }
  bool ok = worst_qhq < kQhqTol;
  std::string detail = fmt("QHQ worst %.3e over %d targets", worst_qhq, kHaarTargets);
  for (int d : {3, 4}) {
    const auto b = optics::bsm_projector_network(d);
    const qmath::Ket phi = scenario::max_entangled(d);
    const double s = (phi.adjoint() * b.effective * phi)(0, 0).real();
    const ComplexMatrix diff = b.effective / s - phi * phi.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff, Eigen::EigenvaluesOnly);
    const double dev = es.eigenvalues().cwiseAbs().maxCoeff();
    ok = ok && s > 0.0 && dev < kBsmTol;
    detail += fmt("; BSM d=%d deviation %.3e (success %.4f)", d, dev, s);
  }
  report("optics", ok, detail);
}

void monte_carlo() {
  const auto mubs = scenario::two_mubs(3);
  const auto f = scenario::steering_functional_two_mubs(3);
  const auto table = protocol::correlations(scenario::isotropic(3, kVisibility).matrix, mubs, mubs);
  const auto counts = protocol::synthetic_counts(table, kCountsPerCell * 3, kTrials, 99);
  const auto mc = protocol::poisson_mc(counts, [&](const protocol::CorrelationTable& t) {
    return protocol::steering_parameter(t, f).S;
  });
  const bool order_ok = mc.stddev >= kErrorBarLo && mc.stddev <= kErrorBarHi;

  sweep::SweepConfig c;
  c.grid = sweep::SweepConfig::linspace(0.8, 1.0, 3);
  c.trials = 10;
  auto csv = [&] {
    std::ostringstream os;
    sweep::write_csv(os, sweep::run_sweep(c));
    return os.str();
  };
  const std::string first = csv();
  const std::string second = csv();
  std::ostringstream serial;
  sweep::write_csv(serial, sweep::run_sweep_serial(c));
  const bool identical = first == second && first == serial.str();
  report("monte-carlo", order_ok && identical,
         fmt("S stddev %.3e with %d trials; same-seed CSV identical: %s", mc.stddev, kTrials,
             identical ? "yes" : "no"));
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void()>> criteria[] = {
      {"steering-saturation", steering_saturation},
      {"lhs-bound", lhs_bound},
      {"linear-law", linear_law},
      {"threshold", threshold},
      {"mdi-equivalence", mdi_equivalence},
      {"question-states", question_states},
      {"randomness-ceiling", randomness_ceiling},
      {"experimental-cross-check", experimental_cross_check},
      {"lhs-randomness-consistency", lhs_randomness_consistency},
      {"lhs-sampler", lhs_sampler},
      {"optics", optics_networks},
      {"monte-carlo", monte_carlo},
  };
  for (const auto& [name, run] : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      report(name, false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
