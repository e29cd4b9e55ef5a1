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

// Small dense semidefinite programs over complex Hermitian blocks.
//
//   maximize    sum_b Re Tr[C_b X_b]
//   subject to  sum_b Re Tr[A_kb X_b] = rhs_k   for every constraint k
//               X_b >= 0                        for every block b
//
// with dual
//
//   minimize    rhs . y
//   subject to  Z_b = sum_k y_k A_kb - C_b >= 0.
//
// Solved by a primal-dual interior-point method (HKM direction with a
// Mehrotra predictor-corrector step). A solve is single threaded and
// deterministic.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mdisteer/qmath.hpp"

namespace mdisteer::sdp {

using qmath::ComplexMatrix;

/// Contributes Re Tr[coeff X_block] to a linear functional.
struct BlockTerm {
  int block = 0;
  ComplexMatrix coeff;
};

struct Constraint {
  std::vector<BlockTerm> terms;
  double rhs = 0.0;
};

/// A term of a matrix-valued linear expression: weight * X_block, or, for a
/// 1x1 block, weight * X_block * scalar_times, or weight * frame X_block frame^H
/// when X_block is stored in the coordinates of an n x r isometry.
struct MatrixTerm {
  int block = 0;
  double weight = 1.0;
  std::optional<ComplexMatrix> scalar_times;
  std::optional<ComplexMatrix> frame;
};

class SdpProblem {
 public:
  int add_block(std::string label, int size);
  /// Adds Re Tr[coeff X_block] to the objective. coeff is Hermitian-projected.
  void add_objective(int block, const ComplexMatrix& coeff);
  int add_constraint(std::vector<BlockTerm> terms, double rhs);
  /// sum_t term_t = rhs as Hermitian matrices, expanded into n^2 real
  /// constraints. Returns the indices of the added constraints in the order
  /// diagonal (i,i), then Re and Im parts of each (i<j).
  std::vector<int> add_matrix_equality(const std::vector<MatrixTerm>& terms, const ComplexMatrix& rhs);

  int num_blocks() const { return static_cast<int>(sizes_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  int block_size(int b) const { return sizes_.at(b); }
  const std::string& block_label(int b) const { return labels_.at(b); }
  const std::vector<BlockTerm>& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  /// Plain-text sparse dump, see README ("SDP dump format").
  void dump(std::ostream& os) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::string> labels_;
  std::vector<BlockTerm> objective_;
  std::vector<Constraint> constraints_;
};

/// Hermitian basis used by add_matrix_equality: Re Tr[B X] picks X_ii,
/// 2 Re X_ij and 2 Im X_ij respectively.
std::vector<ComplexMatrix> hermitian_basis(int n);

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIter };

const char* to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::MaxIter;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // |primal - dual|
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  std::vector<ComplexMatrix> X;
  std::vector<ComplexMatrix> Z;
  Eigen::VectorXd y;
};

struct SolverOptions {
  double tol = 1e-7;  // bound on the absolute gap and the relative residuals
  int max_iter = 120;
  double step_fraction = 0.95;
  bool verbose = false;  // per-iteration trace on stderr
};

SdpSolution solve_sdp(const SdpProblem& problem, const SolverOptions& options);
SdpSolution solve_sdp(const SdpProblem& problem, double tol = 1e-7);

}  // namespace mdisteer::sdp
