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

#include <gtest/gtest.h>

#include <random>

#include "mdisteer/qmath.hpp"

namespace {

using namespace mdisteer::qmath;

// Reference partial trace by explicit index arithmetic.
ComplexMatrix reference_partial_trace(const ComplexMatrix& m, const std::vector<int>& dims, int keep) {
  const int n = static_cast<int>(dims.size());
  int total = 1;
  for (int d : dims) total *= d;
  auto digits = [&](int index) {
    std::vector<int> out(n);
    for (int k = n - 1; k >= 0; --k) {
      out[k] = index % dims[k];
      index /= dims[k];
    }
    return out;
  };
  ComplexMatrix out = ComplexMatrix::Zero(dims[keep], dims[keep]);
  for (int r = 0; r < total; ++r) {
    for (int c = 0; c < total; ++c) {
      const auto dr = digits(r), dc = digits(c);
      bool traced_equal = true;
      for (int k = 0; k < n; ++k)
        if (k != keep && dr[k] != dc[k]) traced_equal = false;
      if (traced_equal) out(dr[keep], dc[keep]) += m(r, c);
    }
  }
  return out;
}

TEST(Kron, MatchesIndexFormula) {
  std::mt19937_64 rng(1);
  const ComplexMatrix a = random_hermitian(2, rng);
  const ComplexMatrix b = random_hermitian(3, rng);
  const ComplexMatrix k = kron(a, b);
  ASSERT_EQ(k.rows(), 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 3; ++q) EXPECT_EQ(k(i * 3 + j, p * 3 + q), a(i, p) * b(j, q));
}

TEST(Kron, KetsAgreeWithProjectors) {
  std::mt19937_64 rng(2);
  const Ket u = random_ket(2, rng), v = random_ket(3, rng);
  EXPECT_LT((projector(kron(u, v)) - kron(projector(u), projector(v))).norm(), 1e-14);
}

TEST(PartialTrace, MatchesIndexLoops) {
  std::mt19937_64 rng(3);
  for (const std::vector<int>& dims : {std::vector<int>{2, 3}, std::vector<int>{3, 2}, std::vector<int>{2, 3, 2}}) {
    int total = 1;
    for (int d : dims) total *= d;
    const ComplexMatrix rho = random_density(total, rng);
    for (int keep = 0; keep < static_cast<int>(dims.size()); ++keep) {
      const ComplexMatrix got = partial_trace(rho, std::span<const int>(dims), keep);
      EXPECT_LT((got - reference_partial_trace(rho, dims, keep)).norm(), 1e-13);
    }
  }
}

TEST(PartialTrace, ProductStateFactorizes) {
  std::mt19937_64 rng(4);
  const ComplexMatrix a = random_density(3, rng), b = random_density(2, rng);
  EXPECT_LT((partial_trace(kron(a, b), {3, 2}, 0) - a).norm(), 1e-13);
  EXPECT_LT((partial_trace(kron(a, b), {3, 2}, 1) - b).norm(), 1e-13);
}

TEST(PartialTrace, RejectsBadShapes) {
  const ComplexMatrix m = ComplexMatrix::Identity(6, 6);
  EXPECT_THROW(partial_trace(m, {2, 2}, 0), DimensionError);
  EXPECT_THROW(partial_trace(m, {2, 3}, 2), std::invalid_argument);
}

class EigenOracle : public ::testing::TestWithParam<int> {};

TEST_P(EigenOracle, JacobiMatchesEigenSolver) {
  const int n = GetParam();
  std::mt19937_64 rng(100 + n);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix h = random_hermitian(n, rng);
    const RealVector ours = hermitian_eigenvalues(h);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> oracle(h, Eigen::EigenvaluesOnly);
    ASSERT_EQ(ours.size(), n);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(ours(i), oracle.eigenvalues()(i), 1e-10);
    EXPECT_NEAR(eig_max_hermitian(h), oracle.eigenvalues()(n - 1), 1e-10);
    EXPECT_NEAR(eig_min_hermitian(h), oracle.eigenvalues()(0), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, EigenOracle, ::testing::Values(1, 2, 3, 4, 6, 9, 16));

TEST(Eigenvalues, DegenerateSpectrum) {
  std::mt19937_64 rng(5);
  const ComplexMatrix u = random_unitary(4, rng);
  Eigen::VectorXd diag(4);
  diag << 1.0, 1.0, -2.0, 1.0;
  const ComplexMatrix h = u * diag.cast<Complex>().asDiagonal() * u.adjoint();
  const RealVector ev = hermitian_eigenvalues(0.5 * (h + h.adjoint()));
  EXPECT_NEAR(ev(0), -2.0, 1e-10);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(ev(i), 1.0, 1e-10);
}

TEST(Eigenvalues, RejectsNonHermitian) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(hermitian_eigenvalues(m), std::invalid_argument);
}

TEST(Psd, ClassifiesSpectra) {
  ComplexMatrix m = ComplexMatrix::Identity(3, 3);
  EXPECT_TRUE(is_psd(m));
  m(2, 2) = -1e-6;
  EXPECT_FALSE(is_psd(m));
  EXPECT_TRUE(is_psd(m, 1e-5));
  EXPECT_NEAR(hermitian_operator_norm(m), 1.0, 1e-15);
}

TEST(Random, UnitaryAndDensityInvariants) {
  std::mt19937_64 rng(6);
  for (int n : {2, 3, 5}) {
    const ComplexMatrix u = random_unitary(n, rng);
    EXPECT_LT((u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm(), 1e-12);
    const ComplexMatrix rho = random_density(n, rng);
    EXPECT_TRUE(is_hermitian(rho));
    EXPECT_TRUE(is_psd(rho));
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    const ComplexMatrix pure = random_density(n, rng, 1);
    EXPECT_NEAR((pure * pure).trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(random_ket(n, rng).norm(), 1.0, 1e-12);
  }
}

TEST(Random, SeededEnginesReproduce) {
  std::mt19937_64 a(42), b(42);
  EXPECT_EQ(random_unitary(3, a), random_unitary(3, b));
}

}  // namespace
