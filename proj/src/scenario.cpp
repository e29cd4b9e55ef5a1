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

#include "mdisteer/scenario.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mdisteer::scenario {

using qmath::Complex;

void Povm::validate(double tol) const {
  if (elements.empty()) throw std::invalid_argument("Povm: no elements");
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (const auto& e : elements) {
    if (e.rows() != dim || e.cols() != dim) throw qmath::DimensionError("Povm: element has wrong size");
    if (!qmath::is_hermitian(e, tol) || !qmath::is_psd(e, tol)) {
      throw std::invalid_argument("Povm: element is not positive semidefinite");
    }
    sum += e;
  }
  if (qmath::max_abs_entry(sum - ComplexMatrix::Identity(dim, dim)) > tol) {
    throw std::invalid_argument("Povm: elements do not sum to identity");
  }
}

Povm povm_from_basis(const std::vector<Ket>& kets) {
  if (kets.empty()) throw std::invalid_argument("povm_from_basis: empty basis");
  Povm m;
  m.dim = static_cast<int>(kets.front().size());
  for (const auto& k : kets) m.elements.push_back(qmath::projector(k));
  return m;
}

Ket max_entangled(int d) {
  if (d < 2) throw std::invalid_argument("max_entangled: d must be >= 2");
  Ket phi = Ket::Zero(d * d);
  for (int i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return phi;
}

Povm fourier_mub(int d, int setting) {
  if (d < 2 || d > kMaxFourierDim) {
    throw std::invalid_argument("fourier_mub: unsupported dimension " + std::to_string(d));
  }
  if (setting != 0 && setting != 1) {
    throw std::invalid_argument("fourier_mub: setting must be 0 or 1");
  }
  std::vector<Ket> kets;
  for (int b = 0; b < d; ++b) {
    Ket k = Ket::Zero(d);
    if (setting == 0) {
      k(b) = 1.0;
    } else {
      for (int j = 0; j < d; ++j) {
        // Reduce the exponent mod d so e.g. e^{i 8pi/3} is stored as e^{i 2pi/3}.
        const int m = (b * j) % d;
        k(j) = std::polar(1.0 / std::sqrt(static_cast<double>(d)), 2.0 * std::numbers::pi * m / d);
      }
    }
    kets.push_back(std::move(k));
  }
  return povm_from_basis(kets);
}

std::vector<Povm> two_mubs(int d) { return {fourier_mub(d, 0), fourier_mub(d, 1)}; }

SteeringFunctional functional_from_targets(int d, std::vector<std::vector<int>> target) {
  SteeringFunctional f;
  f.dim = d;
  f.settings = static_cast<int>(target.size());
  f.weights.assign(static_cast<size_t>(f.settings) * d * d, 0.0);
  for (int x = 0; x < f.settings; ++x) {
    if (static_cast<int>(target[x].size()) != d) {
      throw std::invalid_argument("functional_from_targets: target map has wrong length");
    }
    for (int a = 0; a < d; ++a) {
      const int b = target[x][a];
      if (b < 0 || b >= d) throw std::invalid_argument("functional_from_targets: target out of range");
      f.weights[(x * d + a) * d + b] = 1.0;
    }
  }
  f.target = std::move(target);
  return f;
}

SteeringFunctional steering_functional_two_mubs(int d) {
  if (d < 2) throw std::invalid_argument("steering_functional_two_mubs: d must be >= 2");
  std::vector<std::vector<int>> target(2, std::vector<int>(d));
  for (int a = 0; a < d; ++a) {
    target[0][a] = a;
    target[1][a] = (d - a) % d;
  }
  SteeringFunctional f = functional_from_targets(d, std::move(target));
  f.lhs_bound = 1.0 + 1.0 / std::sqrt(static_cast<double>(d));
  return f;
}

ComplexMatrix QuestionStateSet::reconstruct(int b, int x) const {
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < questions(); ++k) out += s(b, x, k) * tau[k];
  return out;
}

double QuestionStateSet::reconstruction_residual() const {
  double worst = 0.0;
  for (int x = 0; x < settings(); ++x)
    for (int b = 0; b < targets[x].outcomes(); ++b)
      worst = std::max(worst, qmath::max_abs_entry(reconstruct(b, x) - targets[x][b]));
  return worst;
}

namespace {

Ket two_level(int d, int i, int j, Complex rel_phase) {
  Ket k = Ket::Zero(d);
  k(i) = 1.0 / std::sqrt(2.0);
  k(j) = rel_phase / std::sqrt(2.0);
  return k;
}

Ket basis_ket(int d, int i) {
  Ket k = Ket::Zero(d);
  k(i) = 1.0;
  return k;
}

void set_tau_from_kets(QuestionStateSet& q) {
  q.tau.clear();
  for (const auto& k : q.sent_kets) q.tau.push_back(qmath::projector(k).transpose());
}

}  // namespace

QuestionStateSet question_states_qutrit() {
  constexpr int d = 3;
  const double pi = std::numbers::pi;
  auto ph = [](double angle) { return std::polar(1.0, angle); };

  QuestionStateSet q;
  q.dim = d;
  q.sent_kets = {
      basis_ket(d, 0),
      basis_ket(d, 1),
      basis_ket(d, 2),
      two_level(d, 0, 1, 1.0),
      two_level(d, 0, 2, 1.0),
      two_level(d, 1, 2, 1.0),
      two_level(d, 0, 1, ph(-2 * pi / 3)),
      two_level(d, 0, 1, ph(-4 * pi / 3)),
      two_level(d, 0, 2, ph(-2 * pi / 3)),  // e^{-i 8pi/3}, reduced
      two_level(d, 0, 2, ph(-4 * pi / 3)),
      two_level(d, 1, 2, ph(-2 * pi / 3)),
      two_level(d, 1, 2, ph(-4 * pi / 3)),
  };
  set_tau_from_kets(q);
  q.targets = two_mubs(d);

  const int nq = q.questions();
  q.coeffs.assign(static_cast<size_t>(2) * d * nq, 0.0);
  auto set = [&](int x, int b, std::initializer_list<std::pair<int, double>> terms) {
    for (auto [k1, c] : terms) q.coeffs[(static_cast<size_t>(x) * d + b) * nq + (k1 - 1)] = c;
  };
  // Computational basis: E_{b|0} = tau_{b+1}.
  set(0, 0, {{1, 1.0}});
  set(0, 1, {{2, 1.0}});
  set(0, 2, {{3, 1.0}});
  // Fourier basis: (-tau_1 - tau_2 - tau_3 + 2 tau_i + 2 tau_j + 2 tau_k) / 3.
  const double m = -1.0 / 3.0;
  const double t = 2.0 / 3.0;
  set(1, 0, {{1, m}, {2, m}, {3, m}, {4, t}, {5, t}, {6, t}});
  set(1, 1, {{1, m}, {2, m}, {3, m}, {7, t}, {10, t}, {11, t}});
  set(1, 2, {{1, m}, {2, m}, {3, m}, {8, t}, {9, t}, {12, t}});
  return q;
}

std::vector<double> decompose_hermitian(const ComplexMatrix& target,
                                        const std::vector<ComplexMatrix>& ops, double tol) {
  const Eigen::Index n = target.size();
  Eigen::MatrixXd a(2 * n, static_cast<Eigen::Index>(ops.size()));
  Eigen::VectorXd rhs(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rhs(2 * i) = target.data()[i].real();
    rhs(2 * i + 1) = target.data()[i].imag();
  }
  for (size_t k = 0; k < ops.size(); ++k) {
    if (ops[k].size() != n) throw qmath::DimensionError("decompose_hermitian: operator size mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
      a(2 * i, k) = ops[k].data()[i].real();
      a(2 * i + 1, k) = ops[k].data()[i].imag();
    }
  }
  const Eigen::VectorXd c = a.completeOrthogonalDecomposition().solve(rhs);
  const double residual = (a * c - rhs).cwiseAbs().maxCoeff();
  if (residual > tol) {
    throw std::invalid_argument("decompose_hermitian: target is not in the span of the operators");
  }
  return {c.data(), c.data() + c.size()};
}

QuestionStateSet question_states_generic(int d, const std::vector<Povm>& targets) {
  QuestionStateSet q;
  q.dim = d;
  for (int i = 0; i < d; ++i) q.sent_kets.push_back(basis_ket(d, i));
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      q.sent_kets.push_back(two_level(d, i, j, 1.0));
      q.sent_kets.push_back(two_level(d, i, j, Complex(0.0, 1.0)));
    }
  }
  set_tau_from_kets(q);
  q.targets = targets;
  const int nq = q.questions();
  q.coeffs.assign(static_cast<size_t>(targets.size()) * d * nq, 0.0);
  for (size_t x = 0; x < targets.size(); ++x) {
    if (targets[x].dim != d) throw qmath::DimensionError("question_states_generic: target dimension mismatch");
    for (int b = 0; b < targets[x].outcomes(); ++b) {
      const auto c = decompose_hermitian(targets[x][b], q.tau);
      std::copy(c.begin(), c.end(), q.coeffs.begin() + (x * d + b) * nq);
    }
  }
  return q;
}

QuestionStateSet question_states(int d) {
  if (d == 3) return question_states_qutrit();
  return question_states_generic(d, two_mubs(d));
}

IsotropicState isotropic(int d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("isotropic: p must lie in [0, 1]");
  const Ket phi = max_entangled(d);
  IsotropicState s;
  s.d = d;
  s.p = p;
  s.matrix = p * qmath::projector(phi) +
             ((1.0 - p) / (d * d)) * ComplexMatrix::Identity(d * d, d * d);
  return s;
}

}  // namespace mdisteer::scenario
