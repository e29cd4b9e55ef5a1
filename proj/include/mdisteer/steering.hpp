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

// Steering-specific semidefinite programs: assemblages, local-hidden-state
// membership, the brute-force LHS bound and min-entropy certification.

#include <string>
#include <vector>

#include "mdisteer/protocol.hpp"
#include "mdisteer/qmath.hpp"
#include "mdisteer/scenario.hpp"
#include "mdisteer/sdp.hpp"

namespace mdisteer::steering {

using qmath::ComplexMatrix;
using scenario::Povm;

/// Subnormalized conditional states sigma_{a|x} on Bob's side.
struct Assemblage {
  int d = 0;  // Bob dimension
  int outcomes = 0;
  int settings = 0;
  std::vector<ComplexMatrix> members;  // index x * outcomes + a

  const ComplexMatrix& at(int a, int x) const { return members.at(static_cast<size_t>(x) * outcomes + a); }
  ComplexMatrix& at(int a, int x) { return members.at(static_cast<size_t>(x) * outcomes + a); }
  /// sum_a sigma_{a|x}
  ComplexMatrix reduced(int x) const;
  /// Throws std::invalid_argument unless every member is PSD, the reduced
  /// state is the same for all x and has unit trace, all within `tol`.
  void validate(double tol = 1e-10) const;
};

/// sigma_{a|x} = Tr_A[(A_{a|x} (x) I) rho]; Alice's dimension is taken from
/// the POVMs.
Assemblage assemblage(const ComplexMatrix& state, const std::vector<Povm>& alice);

/// Number of deterministic response functions lambda: x -> a.
long num_strategies(int outcomes, int settings);
/// lambda(x), with lambda enumerated in mixed radix (setting 0 fastest).
int strategy_output(long lambda, int x, int outcomes);

enum class LhsDecision { Lhs, Steerable };

struct LhsResult {
  LhsDecision decision = LhsDecision::Steerable;
  /// Largest mu such that mu sigma_{a|x} + (1 - mu) Tr[sigma_{a|x}] I/d
  /// admits an LHS model (capped at 2).
  double robustness = 0.0;
  /// LHS case: sigma_lambda with sigma_{a|x} = sum_lambda D_lambda(a|x) sigma_lambda.
  std::vector<ComplexMatrix> hidden_states;
  /// Steerable case: F_{a|x} with sum_x F_{lambda(x)|x} >= 0 for every
  /// lambda and witness_value = sum Tr[F_{a|x} sigma_{a|x}] < 0.
  std::vector<ComplexMatrix> witness;  // index x * outcomes + a
  double witness_value = 0.0;
  sdp::SdpSolution solution;
};

/// Decides whether the assemblage has an LHS model. Throws
/// std::runtime_error if the solver does not converge.
LhsResult lhs_membership(const Assemblage& assemblage, double tol = 1e-6);

/// max over deterministic (a_x) of lambda_max(sum_{x,b} w(a_x, b, x) B_{b|x}),
/// the tight LHS value of the functional for Bob's measurements.
double lhs_bound_bruteforce(const std::vector<Povm>& bob, const scenario::SteeringFunctional& functional);

enum class RandomnessMode { Assemblage, FullTable, ViolationOnly };

const char* to_string(RandomnessMode mode);
/// Parses "assemblage", "full-table" or "violation-only".
RandomnessMode parse_randomness_mode(const std::string& text);

struct RandomnessResult {
  double p_guess = 0.0;
  double h_min = 0.0;  // -log2(p_guess)
  int x_star = 0;
  RandomnessMode mode = RandomnessMode::FullTable;
  sdp::SdpProblem problem;
  sdp::SdpSolution certificate;
};

/// Eve's optimal probability of guessing Alice's outcome for setting x_star,
/// with branch assemblages sigma^e_{a|x} constrained to sum to `assemblage`.
RandomnessResult guessing_probability(const Assemblage& assemblage, int x_star = 0, double tol = 1e-7);

/// Same with the branches constrained by observed statistics: the full table
/// sum_e Tr[B_{b|x} sigma^e_{a|x}] = p(a,b|x), or only the steering value of
/// the two-MUB functional. Throws std::domain_error on inconsistent data.
RandomnessResult guessing_probability(const protocol::CorrelationTable& table, const std::vector<Povm>& bob,
                                      RandomnessMode mode, int x_star = 0, double tol = 1e-7);

/// Branches constrained only by sum_e sum w(a,b,x) Tr[B_{b|x} sigma^e_{a|x}] = s_observed.
RandomnessResult guessing_probability_from_violation(double s_observed, const std::vector<Povm>& bob,
                                                     const scenario::SteeringFunctional& functional,
                                                     int x_star = 0, double tol = 1e-7);

}  // namespace mdisteer::steering
