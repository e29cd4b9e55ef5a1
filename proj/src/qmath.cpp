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

#include "mdisteer/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mdisteer::qmath {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Ket kron(const Ket& a, const Ket& b) {
  Ket out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

ComplexMatrix projector(const Ket& k) { return k * k.adjoint(); }

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const int> dims, int keep) {
  if (m.rows() != m.cols()) {
    throw DimensionError("partial_trace: operator is not square");
  }
  if (dims.empty() || keep < 0 || keep >= static_cast<int>(dims.size())) {
    throw DimensionError("partial_trace: kept subsystem index out of range");
  }
  long total = 1;
  for (int d : dims) {
    if (d < 1) throw DimensionError("partial_trace: factor dimension must be positive");
    total *= d;
  }
  if (total != m.rows()) {
    throw DimensionError("partial_trace: product of dims (" + std::to_string(total) +
                         ") does not match side length " + std::to_string(m.rows()));
  }

  // Row-major strides: the last factor varies fastest.
  const int n = static_cast<int>(dims.size());
  std::vector<long> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];
  const int dk = dims[keep];
  const long rest = total / dk;

  // Offsets of every basis index of the traced-out factors.
  std::vector<long> offsets(rest, 0);
  for (long r = 0; r < rest; ++r) {
    long rem = r;
    long off = 0;
    for (int s = n - 1; s >= 0; --s) {
      if (s == keep) continue;
      off += (rem % dims[s]) * stride[s];
      rem /= dims[s];
    }
    offsets[r] = off;
  }

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (int i = 0; i < dk; ++i) {
    for (int j = 0; j < dk; ++j) {
      Complex acc = 0.0;
      for (long off : offsets) acc += m(off + i * stride[keep], off + j * stride[keep]);
      out(i, j) = acc;
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::initializer_list<int> dims, int keep) {
  return partial_trace(m, std::span<const int>(dims.begin(), dims.size()), keep);
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
    }
  }
  return true;
}

RealVector hermitian_eigenvalues(const ComplexMatrix& h) {
  if (!is_hermitian(h, 1e-10)) {
    throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");
  }
  const Eigen::Index n = h.rows();
  ComplexMatrix a = 0.5 * (h + h.adjoint());

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };
  const double scale = std::max(a.norm(), 1e-300);

  for (int sweep = 0; sweep < 100 && off_norm() > 1e-15 * scale; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag < 1e-300) continue;
        // Phase D = diag(1, e^{-i phi}) makes the (p,q) pair real; a real
        // Jacobi rotation then annihilates it.
        const Complex phase = a(p, q) / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // A <- J^H A J with J = D R restricted to the (p,q) plane.
        const Complex jpp = c;
        const Complex jpq = s;
        const Complex jqp = -s * std::conj(phase);
        const Complex jqq = c * std::conj(phase);
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }
  RealVector ev(n);
  for (Eigen::Index i = 0; i < n; ++i) ev(i) = a(i, i).real();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

double eig_max_hermitian(const ComplexMatrix& h) {
  const RealVector ev = hermitian_eigenvalues(h);
  return ev(ev.size() - 1);
}

double eig_min_hermitian(const ComplexMatrix& h) { return hermitian_eigenvalues(h)(0); }

bool is_psd(const ComplexMatrix& m, double tol) { return eig_min_hermitian(m) >= -tol; }

double hermitian_operator_norm(const ComplexMatrix& h) {
  const RealVector ev = hermitian_eigenvalues(h);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double max_abs_entry(const ComplexMatrix& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) best = std::max(best, std::abs(m.data()[i]));
  return best;
}

namespace {

ComplexMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  return g;
}

}  // namespace

Ket random_ket(int dim, std::mt19937_64& rng) {
  Ket k = ginibre(dim, 1, rng).col(0);
  return k / k.norm();
}

ComplexMatrix random_unitary(int dim, std::mt19937_64& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phases of R's diagonal so that Q is Haar distributed.
  for (int j = 0; j < dim; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0) q.col(j) *= rjj / mag;
  }
  return q;
}

ComplexMatrix random_density(int dim, std::mt19937_64& rng, int rank) {
  if (rank <= 0) rank = dim;
  const ComplexMatrix g = ginibre(dim, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

ComplexMatrix random_hermitian(int dim, std::mt19937_64& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace mdisteer::qmath
