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

// States, measurements and question states of the two-setting qudit steering
// scenario. Settings are 0-based throughout: setting 0 is the computational
// basis, setting 1 the Fourier basis.

#include <vector>

#include "mdisteer/qmath.hpp"

namespace mdisteer::scenario {

using qmath::ComplexMatrix;
using qmath::Ket;

/// Largest qudit dimension for which the Fourier construction is offered.
inline constexpr int kMaxFourierDim = 8;

/// A measurement: positive operators, one per outcome, summing to identity.
struct Povm {
  int dim = 0;
  std::vector<ComplexMatrix> elements;

  int outcomes() const { return static_cast<int>(elements.size()); }
  const ComplexMatrix& operator[](int b) const { return elements.at(b); }

  /// Throws std::invalid_argument unless every element is PSD and the set
  /// is complete, both within `tol`.
  void validate(double tol = 1e-10) const;
};

/// Projective measurement onto the given (orthonormal) kets.
Povm povm_from_basis(const std::vector<Ket>& kets);

/// (1/sqrt(d)) sum_i |ii>
Ket max_entangled(int d);

/// Setting 0: computational basis. Setting 1: Fourier basis
/// |b> = d^{-1/2} sum_k exp(2 pi i b k / d) |k>, which reproduces the qutrit
/// and ququart phase tables with phases reduced mod 2 pi.
Povm fourier_mub(int d, int setting);

/// Both Fourier MUB settings, in setting order.
std::vector<Povm> two_mubs(int d);

/// Linear steering functional S = sum_{a,b,x} weight(a,b,x) p(a,b|x).
struct SteeringFunctional {
  int dim = 0;
  int settings = 0;
  /// target[x][a]: Bob outcome rewarded when Alice reports a for setting x.
  std::vector<std::vector<int>> target;
  /// Row-major (x, a, b).
  std::vector<double> weights;
  /// Tight bound of S over local-hidden-state models.
  double lhs_bound = 0.0;

  double weight(int a, int b, int x) const { return weights[(x * dim + a) * dim + b]; }
};

/// S = sum_{a=b} p(a,b|0) + sum_{a+b=0 mod d} p(a,b|1), with the LHS bound
/// 1 + 1/sqrt(d).
SteeringFunctional steering_functional_two_mubs(int d);

/// Functional rewarding b = target[x][a]; lhs_bound left at 0 for the caller.
SteeringFunctional functional_from_targets(int d, std::vector<std::vector<int>> target);

/// Question states sent by the referee and the real coefficients that
/// rebuild each measurement element from them.
///
/// The referee physically sends |phi_k><phi_k| = tau_k^T. The operators that
/// enter the decomposition are therefore tau_k = (|phi_k><phi_k|)^T, and
/// sum_k s(b, x, k) tau_k = E_{b|x}.
struct QuestionStateSet {
  int dim = 0;
  std::vector<Ket> sent_kets;
  std::vector<ComplexMatrix> tau;
  std::vector<Povm> targets;
  /// Row-major (x, b, k).
  std::vector<double> coeffs;

  int questions() const { return static_cast<int>(tau.size()); }
  int settings() const { return static_cast<int>(targets.size()); }
  double s(int b, int x, int k) const {
    return coeffs[(static_cast<size_t>(x) * dim + b) * questions() + k];
  }
  /// The state Charlie sends for question k, tau_k^T.
  ComplexMatrix sent_state(int k) const { return qmath::projector(sent_kets.at(k)); }
  ComplexMatrix reconstruct(int b, int x) const;
  /// max_{b,x} || sum_k s tau_k - E_{b|x} ||_max
  double reconstruction_residual() const;
};

/// The twelve qutrit question states and their tabulated coefficients.
QuestionStateSet question_states_qutrit();

/// d^2 question states (|i>, (|i>+|j>)/sqrt2, (|i>+i|j>)/sqrt2) with
/// coefficients obtained by solving the linear system for each target.
QuestionStateSet question_states_generic(int d, const std::vector<Povm>& targets);

/// The question set used by the protocol: tabulated for d = 3, generic
/// otherwise.
QuestionStateSet question_states(int d);

/// Real coefficients c with sum_k c_k ops[k] = target (least squares over
/// Hermitian operators). Throws if the residual exceeds `tol`.
std::vector<double> decompose_hermitian(const ComplexMatrix& target,
                                        const std::vector<ComplexMatrix>& ops,
                                        double tol = 1e-10);

/// p |Phi_d><Phi_d| + (1-p)/d^2 I
struct IsotropicState {
  int d = 0;
  double p = 0.0;
  ComplexMatrix matrix;
};

IsotropicState isotropic(int d, double p);

}  // namespace mdisteer::scenario
