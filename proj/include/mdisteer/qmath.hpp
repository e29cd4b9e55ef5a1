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

// Dense complex linear algebra for small quantum systems (side length <= 64).
//
// Composite systems use one global row-major convention: for a product space
// A (x) B the basis index of |i_A, i_B> is i_A * d_B + i_B. Transposes are
// always taken in the computational basis.

#include <complex>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace mdisteer::qmath {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Thrown when operand shapes are incompatible.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
Ket kron(const Ket& a, const Ket& b);

/// |k><k|
ComplexMatrix projector(const Ket& k);

/// Reduced operator on subsystem `keep` of a square operator on the product
/// space with factor dimensions `dims`. All other factors are traced out.
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims, int keep);
ComplexMatrix partial_trace(const ComplexMatrix& m, std::initializer_list<int> dims, int keep);

bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12);

/// Eigenvalues of a Hermitian matrix in ascending order (cyclic complex
/// Jacobi). Throws std::invalid_argument if `h` is not Hermitian within 1e-10.
RealVector hermitian_eigenvalues(const ComplexMatrix& h);

double eig_max_hermitian(const ComplexMatrix& h);
double eig_min_hermitian(const ComplexMatrix& h);

/// True iff the smallest eigenvalue is >= -tol. `m` must be Hermitian.
bool is_psd(const ComplexMatrix& m, double tol = 1e-10);

/// Largest singular value of a Hermitian matrix, i.e. max |eigenvalue|.
double hermitian_operator_norm(const ComplexMatrix& h);

/// Largest absolute entry.
double max_abs_entry(const ComplexMatrix& m);

// Random objects for tests and samplers. All take an explicit engine so that
// callers control reproducibility.
Ket random_ket(int dim, std::mt19937_64& rng);
ComplexMatrix random_unitary(int dim, std::mt19937_64& rng);  // Haar
ComplexMatrix random_density(int dim, std::mt19937_64& rng, int rank = -1);
ComplexMatrix random_hermitian(int dim, std::mt19937_64& rng);

}  // namespace mdisteer::qmath
