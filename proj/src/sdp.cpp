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

#include "mdisteer/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace mdisteer::sdp {

using qmath::Complex;

namespace {

ComplexMatrix herm(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Re Tr[A X]
double re_trace_product(const ComplexMatrix& a, const ComplexMatrix& x) {
  return (a.transpose().array() * x.array()).sum().real();
}

}  // namespace

int SdpProblem::add_block(std::string label, int size) {
  if (size < 1) throw std::invalid_argument("SdpProblem: block size must be positive");
  sizes_.push_back(size);
  labels_.push_back(std::move(label));
  return static_cast<int>(sizes_.size()) - 1;
}

void SdpProblem::add_objective(int block, const ComplexMatrix& coeff) {
  if (block < 0 || block >= num_blocks() || coeff.rows() != sizes_[block] || coeff.cols() != sizes_[block]) {
    throw qmath::DimensionError("SdpProblem: objective term does not match its block");
  }
  objective_.push_back({block, herm(coeff)});
}

int SdpProblem::add_constraint(std::vector<BlockTerm> terms, double rhs) {
  for (auto& t : terms) {
    if (t.block < 0 || t.block >= num_blocks() || t.coeff.rows() != sizes_[t.block] ||
        t.coeff.cols() != sizes_[t.block]) {
      throw qmath::DimensionError("SdpProblem: constraint term does not match its block");
    }
    t.coeff = herm(t.coeff);
  }
  constraints_.push_back({std::move(terms), rhs});
  return num_constraints() - 1;
}

std::vector<ComplexMatrix> hermitian_basis(int n) {
  std::vector<ComplexMatrix> basis;
  for (int i = 0; i < n; ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(i, i) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      ComplexMatrix re = ComplexMatrix::Zero(n, n);
      re(i, j) = 1.0;
      re(j, i) = 1.0;
      ComplexMatrix im = ComplexMatrix::Zero(n, n);
      im(i, j) = Complex(0.0, 1.0);
      im(j, i) = Complex(0.0, -1.0);
      basis.push_back(std::move(re));
      basis.push_back(std::move(im));
    }
  }
  return basis;
}

std::vector<int> SdpProblem::add_matrix_equality(const std::vector<MatrixTerm>& terms, const ComplexMatrix& rhs) {
  const int n = static_cast<int>(rhs.rows());
  if (rhs.cols() != n) throw qmath::DimensionError("add_matrix_equality: rhs is not square");
  for (const auto& t : terms) {
    if (t.block < 0 || t.block >= num_blocks()) throw qmath::DimensionError("add_matrix_equality: bad block");
    if (t.scalar_times) {
      if (sizes_[t.block] != 1 || t.scalar_times->rows() != n || t.scalar_times->cols() != n) {
        throw qmath::DimensionError("add_matrix_equality: scalar term needs a 1x1 block and an n x n matrix");
      }
    } else if (t.frame) {
      if (t.frame->rows() != n || t.frame->cols() != sizes_[t.block]) {
        throw qmath::DimensionError("add_matrix_equality: frame must be n x block size");
      }
    } else if (sizes_[t.block] != n) {
      throw qmath::DimensionError("add_matrix_equality: block size differs from the equation size");
    }
  }
  std::vector<int> ids;
  for (const ComplexMatrix& basis : hermitian_basis(n)) {
    std::vector<BlockTerm> row;
    for (const auto& t : terms) {
      if (t.scalar_times) {
        ComplexMatrix c(1, 1);
        c(0, 0) = t.weight * re_trace_product(basis, *t.scalar_times);
        row.push_back({t.block, c});
      } else if (t.frame) {
        row.push_back({t.block, t.weight * (t.frame->adjoint() * basis * (*t.frame))});
      } else {
        row.push_back({t.block, t.weight * basis});
      }
    }
    ids.push_back(add_constraint(std::move(row), re_trace_product(basis, herm(rhs))));
  }
  return ids;
}

void SdpProblem::dump(std::ostream& os) const {
  os << "mdisteer-sdp 1\n";
  os << "blocks " << num_blocks() << "\n";
  for (int b = 0; b < num_blocks(); ++b) os << "block " << b << " " << sizes_[b] << " " << labels_[b] << "\n";
  auto emit = [&](const char* tag, long k, const BlockTerm& t) {
    for (Eigen::Index i = 0; i < t.coeff.rows(); ++i)
      for (Eigen::Index j = i; j < t.coeff.cols(); ++j)
        if (std::abs(t.coeff(i, j)) > 0.0) {
          os << tag << " ";
          if (k >= 0) os << k << " ";
          os << t.block << " " << i << " " << j << " " << t.coeff(i, j).real() << " " << t.coeff(i, j).imag()
             << "\n";
        }
  };
  os.precision(17);
  for (const auto& t : objective_) emit("obj", -1, t);
  os << "constraints " << num_constraints() << "\n";
  for (int k = 0; k < num_constraints(); ++k) {
    os << "rhs " << k << " " << constraints_[k].rhs << "\n";
    for (const auto& t : constraints_[k].terms) emit("con", k, t);
  }
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal:
      return "optimal";
    case SdpStatus::Infeasible:
      return "infeasible";
    case SdpStatus::Unbounded:
      return "unbounded";
    case SdpStatus::MaxIter:
      return "maxiter";
  }
  return "unknown";
}

namespace {

using Blocks = std::vector<ComplexMatrix>;
using Row = std::vector<std::pair<int, ComplexMatrix>>;

struct Compiled {
  std::vector<int> sizes;
  Blocks C;
  std::vector<Row> A;
  Eigen::VectorXd b;
  std::vector<std::vector<int>> touching;  // block -> constraints with a term on it
};

Compiled compile(const SdpProblem& p) {
  Compiled c;
  for (int b = 0; b < p.num_blocks(); ++b) {
    c.sizes.push_back(p.block_size(b));
    c.C.push_back(ComplexMatrix::Zero(p.block_size(b), p.block_size(b)));
  }
  for (const auto& t : p.objective()) c.C[t.block] += t.coeff;
  c.b.resize(p.num_constraints());
  for (int k = 0; k < p.num_constraints(); ++k) {
    std::map<int, ComplexMatrix> merged;
    for (const auto& t : p.constraints()[k].terms) {
      auto [it, inserted] = merged.try_emplace(t.block, t.coeff);
      if (!inserted) it->second += t.coeff;
    }
    Row row;
    for (auto& [blk, coeff] : merged)
      if (coeff.cwiseAbs().maxCoeff() > 0.0) row.emplace_back(blk, std::move(coeff));
    c.A.push_back(std::move(row));
    c.b(k) = p.constraints()[k].rhs;
  }
  return c;
}

void index_touching(Compiled& c) {
  c.touching.assign(c.sizes.size(), {});
  for (size_t k = 0; k < c.A.size(); ++k)
    for (const auto& [blk, coeff] : c.A[k]) c.touching[blk].push_back(static_cast<int>(k));
}

// Rank-revealing pass over the constraint functionals. Returns the indices of
// a maximal independent subset, or nullopt when the right-hand sides are
// inconsistent with the linear dependencies.
std::optional<std::vector<int>> independent_constraints(const Compiled& c) {
  const int m = static_cast<int>(c.A.size());
  if (m == 0) return std::vector<int>{};
  std::vector<long> offset(c.sizes.size() + 1, 0);
  for (size_t b = 0; b < c.sizes.size(); ++b) offset[b + 1] = offset[b] + 2L * c.sizes[b] * c.sizes[b];
  const long n = offset.back();

  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(n + 1, m);
  for (int k = 0; k < m; ++k) {
    for (const auto& [blk, coeff] : c.A[k]) {
      for (Eigen::Index i = 0; i < coeff.size(); ++i) {
        cols(offset[blk] + 2 * i, k) = coeff.data()[i].real();
        cols(offset[blk] + 2 * i + 1, k) = coeff.data()[i].imag();
      }
    }
  }
  const double scale = std::max(1.0, cols.topRows(n).cwiseAbs().maxCoeff());
  const double bscale = std::max(1.0, c.b.cwiseAbs().maxCoeff());
  for (int k = 0; k < m; ++k) cols(n, k) = c.b(k) * scale / bscale;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cols.topRows(n));
  qr.setThreshold(1e-9);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_aug(cols);
  qr_aug.setThreshold(1e-9);
  if (qr_aug.rank() > qr.rank()) return std::nullopt;

  std::vector<int> kept;
  for (Eigen::Index i = 0; i < qr.rank(); ++i) kept.push_back(qr.colsPermutation().indices()(i));
  std::sort(kept.begin(), kept.end());
  return kept;
}

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += re_trace_product(a[i], b[i]);
  return s;
}

double frob(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

Eigen::VectorXd apply_A(const Compiled& c, const Blocks& x) {
  Eigen::VectorXd out(c.A.size());
  for (size_t k = 0; k < c.A.size(); ++k) {
    double s = 0.0;
    for (const auto& [blk, coeff] : c.A[k]) s += re_trace_product(coeff, x[blk]);
    out(k) = s;
  }
  return out;
}

Blocks apply_AT(const Compiled& c, const Eigen::VectorXd& y) {
  Blocks out;
  for (int n : c.sizes) out.push_back(ComplexMatrix::Zero(n, n));
  for (size_t k = 0; k < c.A.size(); ++k)
    for (const auto& [blk, coeff] : c.A[k]) out[blk] += y(k) * coeff;
  return out;
}

// Largest alpha with M + alpha dM >= 0 (infinity when dM keeps M PSD).
double max_step(const Blocks& m, const Blocks& dm) {
  double alpha = std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < m.size(); ++b) {
    Eigen::LLT<ComplexMatrix> llt(m[b]);
    const ComplexMatrix l = llt.matrixL();
    const ComplexMatrix linv = l.triangularView<Eigen::Lower>().solve(
        ComplexMatrix::Identity(m[b].rows(), m[b].cols()));
    const ComplexMatrix s = herm(linv * dm[b] * linv.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(s, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

double min_eigenvalue(const Blocks& m) {
  double lmin = std::numeric_limits<double>::infinity();
  for (const auto& b : m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm(b), Eigen::EigenvaluesOnly);
    lmin = std::min(lmin, es.eigenvalues()(0));
  }
  return lmin;
}

struct Direction {
  Blocks dX;
  Blocks dZ;
  Eigen::VectorXd dy;
};

class SchurSolver {
 public:
  bool factor(const Eigen::MatrixXd& m) {
    llt_.compute(m);
    use_ldlt_ = llt_.info() != Eigen::Success;
    if (use_ldlt_) {
      ldlt_.compute(m);
      return ldlt_.info() == Eigen::Success;
    }
    return true;
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    if (use_ldlt_) return ldlt_.solve(rhs);
    return llt_.solve(rhs);
  }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  bool use_ldlt_ = false;
};

// HKM search direction for complementarity target Rc:
//   dX = Rc - herm(X dZ Zinv),  dZ = A^T dy + Rd,  A(dX) = rp.
Direction hkm_direction(const Compiled& c, const SchurSolver& schur, const Blocks& x, const Blocks& zinv,
                        const Blocks& rc, const Blocks& rd, const Eigen::VectorXd& rp) {
  Blocks xrz(x.size());
  for (size_t b = 0; b < x.size(); ++b) xrz[b] = rc[b] - x[b] * rd[b] * zinv[b];
  const Eigen::VectorXd rhs = apply_A(c, xrz) - rp;
  Direction d;
  d.dy = schur.solve(rhs);
  d.dZ = apply_AT(c, d.dy);
  for (size_t b = 0; b < x.size(); ++b) d.dZ[b] += rd[b];
  d.dX.resize(x.size());
  for (size_t b = 0; b < x.size(); ++b) d.dX[b] = rc[b] - herm(x[b] * d.dZ[b] * zinv[b]);
  return d;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SolverOptions& opt) {
  Compiled full = compile(problem);
  SdpSolution sol;
  sol.y = Eigen::VectorXd::Zero(problem.num_constraints());
  for (int n : full.sizes) {
    sol.X.push_back(ComplexMatrix::Zero(n, n));
    sol.Z.push_back(ComplexMatrix::Zero(n, n));
  }
  if (full.sizes.empty()) throw std::invalid_argument("solve_sdp: problem has no blocks");

  const auto kept = independent_constraints(full);
  if (!kept) {
    sol.status = SdpStatus::Infeasible;
    return sol;
  }
  Compiled c;
  c.sizes = full.sizes;
  c.C = full.C;
  c.b.resize(kept->size());
  for (size_t i = 0; i < kept->size(); ++i) {
    c.A.push_back(full.A[(*kept)[i]]);
    c.b(i) = full.b((*kept)[i]);
  }
  index_touching(c);

  const int m = static_cast<int>(c.A.size());
  const size_t nb = c.sizes.size();
  double n_total = 0.0;
  for (int n : c.sizes) n_total += n;

  const double norm_b = c.b.norm();
  const double norm_c = frob(c.C);
  double alpha0 = 1.0;
  double max_a = 0.0;
  for (int k = 0; k < m; ++k) {
    double na = 0.0;
    for (const auto& [blk, coeff] : c.A[k]) na += coeff.squaredNorm();
    na = std::sqrt(na);
    max_a = std::max(max_a, na);
    alpha0 = std::max(alpha0, n_total * (1.0 + std::abs(c.b(k))) / (1.0 + na));
  }
  const double beta0 = std::max(1.0, (1.0 + std::max(max_a, norm_c)) / std::sqrt(n_total));

  Blocks X, Z;
  for (int n : c.sizes) {
    X.push_back(alpha0 * ComplexMatrix::Identity(n, n));
    Z.push_back(beta0 * ComplexMatrix::Identity(n, n));
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  auto finish = [&](SdpStatus status, int iter, double pobj, double dobj, double pinf, double dinf) {
    sol.status = status;
    sol.iterations = iter;
    sol.primal_value = pobj;
    sol.dual_value = dobj;
    sol.gap = std::abs(pobj - dobj);
    sol.primal_infeasibility = pinf;
    sol.dual_infeasibility = dinf;
    sol.X = X;
    sol.Z = Z;
    for (size_t i = 0; i < kept->size(); ++i) sol.y((*kept)[i]) = y(i);
    return sol;
  };

  double pobj = 0.0, dobj = 0.0, pinf = 0.0, dinf = 0.0;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    const Eigen::VectorXd rp = c.b - apply_A(c, X);
    Blocks rd = apply_AT(c, y);
    for (size_t b = 0; b < nb; ++b) rd[b] -= Z[b] + c.C[b];

    pobj = inner(c.C, X);
    dobj = c.b.dot(y);
    pinf = rp.norm() / (1.0 + norm_b);
    dinf = frob(rd) / (1.0 + norm_c);
    const double gap = std::abs(pobj - dobj);
    const double mu = inner(X, Z) / n_total;
    if (opt.verbose) {
      std::fprintf(stderr, "it %3d pobj %+.10e dobj %+.10e pinf %.2e dinf %.2e gap %.2e mu %.2e\n", iter, pobj, dobj,
                   pinf, dinf, gap, mu);
    }

    if (pinf <= opt.tol && dinf <= opt.tol && gap <= opt.tol) {
      return finish(SdpStatus::Optimal, iter, pobj, dobj, pinf, dinf);
    }
    // Diverging iterates: look for a Farkas-type certificate.
    if (dobj < -1e8 * (1.0 + norm_c)) {
      const Blocks ray = apply_AT(c, y / -dobj);
      if (min_eigenvalue(ray) > -1e-6) return finish(SdpStatus::Infeasible, iter, pobj, dobj, pinf, dinf);
    }
    if (pobj > 1e8 * (1.0 + norm_b)) {
      Blocks ray = X;
      for (auto& r : ray) r /= pobj;
      if (apply_A(c, ray).norm() < 1e-6) return finish(SdpStatus::Unbounded, iter, pobj, dobj, pinf, dinf);
    }

    Blocks zinv(nb);
    for (size_t b = 0; b < nb; ++b) {
      Eigen::LLT<ComplexMatrix> llt(Z[b]);
      zinv[b] = herm(llt.solve(ComplexMatrix::Identity(c.sizes[b], c.sizes[b])));
    }

    // Schur complement M_lk = Re Tr[A_l Zinv A_k X].
    Eigen::MatrixXd schur_m = Eigen::MatrixXd::Zero(m, m);
    for (size_t b = 0; b < nb; ++b) {
      const auto& touch = c.touching[b];
      std::vector<const ComplexMatrix*> coeff_of(touch.size());
      for (size_t i = 0; i < touch.size(); ++i)
        for (const auto& [blk, coeff] : c.A[touch[i]])
          if (blk == static_cast<int>(b)) coeff_of[i] = &coeff;
      for (size_t i = 0; i < touch.size(); ++i) {
        const ComplexMatrix w = zinv[b] * (*coeff_of[i]) * X[b];
        for (size_t j = 0; j < touch.size(); ++j) schur_m(touch[j], touch[i]) += re_trace_product(*coeff_of[j], w);
      }
    }
    schur_m = 0.5 * (schur_m + schur_m.transpose()).eval();
    SchurSolver schur;
    if (!schur.factor(schur_m)) break;

    // Predictor.
    Blocks rc(nb);
    for (size_t b = 0; b < nb; ++b) rc[b] = -X[b];
    const Direction aff = hkm_direction(c, schur, X, zinv, rc, rd, rp);
    const double ap_aff = std::min(1.0, max_step(X, aff.dX));
    const double ad_aff = std::min(1.0, max_step(Z, aff.dZ));
    double mu_aff = 0.0;
    for (size_t b = 0; b < nb; ++b) {
      mu_aff += re_trace_product(X[b] + ap_aff * aff.dX[b], Z[b] + ad_aff * aff.dZ[b]);
    }
    mu_aff /= n_total;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector.
    for (size_t b = 0; b < nb; ++b) {
      rc[b] = sigma * mu * zinv[b] - X[b] - herm(aff.dX[b] * aff.dZ[b] * zinv[b]);
    }
    const Direction dir = hkm_direction(c, schur, X, zinv, rc, rd, rp);
    const double ap = std::min(1.0, opt.step_fraction * max_step(X, dir.dX));
    const double ad = std::min(1.0, opt.step_fraction * max_step(Z, dir.dZ));

    for (size_t b = 0; b < nb; ++b) {
      X[b] = herm(X[b] + ap * dir.dX[b]);
      Z[b] = herm(Z[b] + ad * dir.dZ[b]);
    }
    y += ad * dir.dy;
  }
  return finish(SdpStatus::MaxIter, opt.max_iter, pobj, dobj, pinf, dinf);
}

SdpSolution solve_sdp(const SdpProblem& problem, double tol) {
  SolverOptions opt;
  opt.tol = tol;
  return solve_sdp(problem, opt);
}

}  // namespace mdisteer::sdp
