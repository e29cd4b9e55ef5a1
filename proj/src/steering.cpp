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

#include "mdisteer/steering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace mdisteer::steering {

using qmath::Complex;

ComplexMatrix Assemblage::reduced(int x) const {
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (int a = 0; a < outcomes; ++a) sum += at(a, x);
  return sum;
}

void Assemblage::validate(double tol) const {
  if (d < 1 || outcomes < 1 || settings < 1 ||
      members.size() != static_cast<size_t>(outcomes) * static_cast<size_t>(settings)) {
    throw std::invalid_argument("Assemblage: inconsistent shape");
  }
  for (const auto& m : members) {
    if (m.rows() != d || m.cols() != d) throw std::invalid_argument("Assemblage: member has the wrong size");
    if (!qmath::is_hermitian(m, tol) || !qmath::is_psd(m, tol)) {
      throw std::invalid_argument("Assemblage: member is not positive semidefinite");
    }
  }
  const ComplexMatrix rho = reduced(0);
  if (std::abs(rho.trace() - Complex(1.0)) > tol) throw std::invalid_argument("Assemblage: reduced state not normalized");
  for (int x = 1; x < settings; ++x) {
    if (qmath::max_abs_entry(reduced(x) - rho) > tol) throw std::invalid_argument("Assemblage: signaling across settings");
  }
}

Assemblage assemblage(const ComplexMatrix& state, const std::vector<Povm>& alice) {
  if (alice.empty()) throw std::invalid_argument("assemblage: no measurements");
  const int da = alice.front().dim;
  if (da < 1 || state.rows() != state.cols() || state.rows() % da != 0) {
    throw qmath::DimensionError("assemblage: state dimension is not a multiple of Alice's dimension");
  }
  const int db = static_cast<int>(state.rows()) / da;
  Assemblage out;
  out.d = db;
  out.outcomes = alice.front().outcomes();
  out.settings = static_cast<int>(alice.size());
  const ComplexMatrix id = ComplexMatrix::Identity(db, db);
  for (const auto& povm : alice) {
    if (povm.dim != da || povm.outcomes() != out.outcomes) {
      throw qmath::DimensionError("assemblage: Alice measurements differ in shape");
    }
    for (int a = 0; a < povm.outcomes(); ++a) {
      out.members.push_back(qmath::partial_trace(qmath::kron(povm[a], id) * state, {da, db}, 1));
    }
  }
  return out;
}

long num_strategies(int outcomes, int settings) {
  long n = 1;
  for (int x = 0; x < settings; ++x) n *= outcomes;
  return n;
}

int strategy_output(long lambda, int x, int outcomes) {
  for (int i = 0; i < x; ++i) lambda /= outcomes;
  return static_cast<int>(lambda % outcomes);
}

namespace {

ComplexMatrix scalar(double v) {
  ComplexMatrix m(1, 1);
  m(0, 0) = v;
  return m;
}

ComplexMatrix combine(const std::vector<ComplexMatrix>& basis, const Eigen::VectorXd& y, const std::vector<int>& ids) {
  ComplexMatrix f = ComplexMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (size_t i = 0; i < ids.size(); ++i) f += y(ids[i]) * basis[i];
  return f;
}

}  // namespace

LhsResult lhs_membership(const Assemblage& asmb, double tol) {
  asmb.validate(1e-8);
  const int d = asmb.d;
  const int n_out = asmb.outcomes;
  const int k = asmb.settings;
  const long n_lambda = num_strategies(n_out, k);
  if (n_lambda > 256) throw std::invalid_argument("lhs_membership: too many deterministic strategies");

  sdp::SdpProblem problem;
  std::vector<int> hidden;
  for (long l = 0; l < n_lambda; ++l) hidden.push_back(problem.add_block("sigma_lambda" + std::to_string(l), d));
  const int mu = problem.add_block("mu", 1);
  const int slack = problem.add_block("slack", 1);
  problem.add_objective(mu, scalar(1.0));

  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  std::vector<std::vector<int>> rows(static_cast<size_t>(n_out) * k);
  for (int x = 0; x < k; ++x) {
    for (int a = 0; a < n_out; ++a) {
      const ComplexMatrix& s = asmb.at(a, x);
      const ComplexMatrix noise = s.trace().real() / d * id;
      std::vector<sdp::MatrixTerm> terms;
      for (long l = 0; l < n_lambda; ++l)
        if (strategy_output(l, x, n_out) == a) terms.push_back({hidden[l], 1.0, std::nullopt, std::nullopt});
      terms.push_back({mu, -1.0, ComplexMatrix(s - noise), std::nullopt});
      rows[static_cast<size_t>(x) * n_out + a] = problem.add_matrix_equality(terms, noise);
    }
  }
  problem.add_constraint({{mu, scalar(1.0)}, {slack, scalar(1.0)}}, 2.0);

  LhsResult result;
  result.solution = sdp::solve_sdp(problem, std::min(1e-8, 0.1 * tol));
  if (result.solution.status != sdp::SdpStatus::Optimal) {
    throw std::runtime_error(std::string("lhs_membership: solver returned ") + to_string(result.solution.status));
  }
  const double m = result.solution.primal_value;
  result.robustness = m;
  if (m >= 1.0 - tol) {
    result.decision = LhsDecision::Lhs;
    // The white-noise assemblage p(a|x) I/d is LHS with product weights, so
    // mixing it back in undoes the robustness scaling.
    const double w = m >= 1.0 ? 1.0 / m : 1.0;
    for (long l = 0; l < n_lambda; ++l) {
      double prod = 1.0;
      for (int x = 0; x < k; ++x) prod *= asmb.at(strategy_output(l, x, n_out), x).trace().real();
      result.hidden_states.push_back(w * result.solution.X[hidden[l]] + (1.0 - w) * prod / d * id);
    }
  } else {
    result.decision = LhsDecision::Steerable;
    const auto basis = sdp::hermitian_basis(d);
    for (int x = 0; x < k; ++x) {
      for (int a = 0; a < n_out; ++a) {
        ComplexMatrix f = combine(basis, result.solution.y, rows[static_cast<size_t>(x) * n_out + a]);
        result.witness_value += (f * asmb.at(a, x)).trace().real();
        result.witness.push_back(std::move(f));
      }
    }
  }
  return result;
}

double lhs_bound_bruteforce(const std::vector<Povm>& bob, const scenario::SteeringFunctional& functional) {
  if (static_cast<int>(bob.size()) != functional.settings) {
    throw std::invalid_argument("lhs_bound_bruteforce: settings mismatch");
  }
  const int n_out = functional.dim;
  const int dim = bob.front().dim;
  double best = -std::numeric_limits<double>::infinity();
  for (long l = 0; l < num_strategies(n_out, functional.settings); ++l) {
    ComplexMatrix op = ComplexMatrix::Zero(dim, dim);
    for (int x = 0; x < functional.settings; ++x) {
      const int a = strategy_output(l, x, n_out);
      for (int b = 0; b < bob[x].outcomes(); ++b) op += functional.weight(a, b, x) * bob[x][b];
    }
    best = std::max(best, qmath::eig_max_hermitian(op));
  }
  return best;
}

const char* to_string(RandomnessMode mode) {
  switch (mode) {
    case RandomnessMode::Assemblage:
      return "assemblage";
    case RandomnessMode::FullTable:
      return "full-table";
    case RandomnessMode::ViolationOnly:
      return "violation-only";
  }
  return "unknown";
}

RandomnessMode parse_randomness_mode(const std::string& text) {
  if (text == "assemblage") return RandomnessMode::Assemblage;
  if (text == "full-table") return RandomnessMode::FullTable;
  if (text == "violation-only") return RandomnessMode::ViolationOnly;
  throw std::invalid_argument("unknown randomness mode '" + text + "'");
}

namespace {

// Branch assemblages sigma^e_{a|x} = V_{a|x} Y^e_{a|x} V_{a|x}^H, one PSD
// block Y each, with per-branch non-signaling and the guessing objective in
// place. V_{a|x} is an isometry onto a subspace that must contain the support
// of every branch; restricting to it keeps the program strictly feasible when
// the data are rank deficient.
struct GuessingProgram {
  sdp::SdpProblem problem;
  int d = 0;
  int outcomes = 0;
  int settings = 0;
  std::vector<ComplexMatrix> frame;  // index (x, a)
  std::vector<int> block;            // index (e, x, a); -1 when the branch is forced to zero

  const ComplexMatrix& frame_of(int a, int x) const { return frame[static_cast<size_t>(x) * outcomes + a]; }
  int at(int e, int a, int x) const { return block[(static_cast<size_t>(e) * settings + x) * outcomes + a]; }
  /// Coefficient of Y^e_{a|x} representing Re Tr[op sigma^e_{a|x}].
  ComplexMatrix pull_back(const ComplexMatrix& op, int a, int x) const {
    const ComplexMatrix& v = frame_of(a, x);
    return v.adjoint() * op * v;
  }
};

// Orthonormal basis of the eigenspaces of h with eigenvalue above (keep_large)
// or below (otherwise) `cut`.
ComplexMatrix spectral_frame(const ComplexMatrix& h, double cut, bool keep_large) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    if ((es.eigenvalues()(i) > cut) == keep_large) cols.push_back(i);
  ComplexMatrix v(h.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) v.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(cols[j]);
  return v;
}

GuessingProgram guessing_program(int d, int outcomes, int settings, int x_star, std::vector<ComplexMatrix> frames) {
  if (x_star < 0 || x_star >= settings) throw std::invalid_argument("guessing_probability: x_star out of range");
  GuessingProgram g;
  g.d = d;
  g.outcomes = outcomes;
  g.settings = settings;
  g.frame = std::move(frames);
  for (int e = 0; e < outcomes; ++e)
    for (int x = 0; x < settings; ++x)
      for (int a = 0; a < outcomes; ++a) {
        const int r = static_cast<int>(g.frame_of(a, x).cols());
        g.block.push_back(r == 0 ? -1
                                 : g.problem.add_block("sigma^" + std::to_string(e) + "_" + std::to_string(a) + "|" +
                                                           std::to_string(x),
                                                       r));
      }
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  for (int e = 0; e < outcomes; ++e)
    if (g.at(e, e, x_star) >= 0) g.problem.add_objective(g.at(e, e, x_star), g.pull_back(id, e, x_star));
  for (int e = 0; e < outcomes; ++e) {
    for (int x = 1; x < settings; ++x) {
      std::vector<sdp::MatrixTerm> terms;
      for (int a = 0; a < outcomes; ++a) {
        if (g.at(e, a, x) >= 0) terms.push_back({g.at(e, a, x), 1.0, std::nullopt, g.frame_of(a, x)});
        if (g.at(e, a, 0) >= 0) terms.push_back({g.at(e, a, 0), -1.0, std::nullopt, g.frame_of(a, 0)});
      }
      g.problem.add_matrix_equality(terms, ComplexMatrix::Zero(d, d));
    }
  }
  return g;
}

std::vector<ComplexMatrix> identity_frames(int d, int count) {
  return std::vector<ComplexMatrix>(static_cast<size_t>(count), ComplexMatrix::Identity(d, d));
}

RandomnessResult solve_guessing(GuessingProgram&& g, int x_star, RandomnessMode mode, double tol) {
  RandomnessResult r;
  r.x_star = x_star;
  r.mode = mode;
  sdp::SolverOptions opt;
  opt.tol = tol;
  opt.verbose = std::getenv("MDISTEER_SDP_TRACE") != nullptr;
  r.certificate = sdp::solve_sdp(g.problem, opt);
  r.problem = std::move(g.problem);
  switch (r.certificate.status) {
    case sdp::SdpStatus::Optimal:
      break;
    case sdp::SdpStatus::Infeasible:
      throw std::domain_error("guessing_probability: constraints are inconsistent with any quantum model");
    default:
      throw std::runtime_error(std::string("guessing_probability: solver returned ") +
                               sdp::to_string(r.certificate.status));
  }
  // Clip solver round-off above the trivial ceiling.
  r.p_guess = std::min(1.0, r.certificate.primal_value);
  r.h_min = -std::log2(r.p_guess);
  return r;
}

void check_bob(const std::vector<Povm>& bob, int settings) {
  if (static_cast<int>(bob.size()) != settings) throw std::invalid_argument("guessing_probability: Bob settings mismatch");
  for (const auto& b : bob)
    if (b.dim != bob.front().dim) throw qmath::DimensionError("guessing_probability: Bob dimensions differ");
}

constexpr double kSupportCut = 1e-10;
constexpr double kSaturationTol = 1e-9;

}  // namespace

RandomnessResult guessing_probability(const Assemblage& asmb, int x_star, double tol) {
  asmb.validate(1e-8);
  std::vector<ComplexMatrix> frames;
  for (int x = 0; x < asmb.settings; ++x)
    for (int a = 0; a < asmb.outcomes; ++a) frames.push_back(spectral_frame(asmb.at(a, x), kSupportCut, true));
  GuessingProgram g = guessing_program(asmb.d, asmb.outcomes, asmb.settings, x_star, std::move(frames));
  for (int x = 0; x < asmb.settings; ++x) {
    for (int a = 0; a < asmb.outcomes; ++a) {
      std::vector<sdp::MatrixTerm> terms;
      for (int e = 0; e < asmb.outcomes; ++e)
        if (g.at(e, a, x) >= 0) terms.push_back({g.at(e, a, x), 1.0, std::nullopt, g.frame_of(a, x)});
      if (!terms.empty()) g.problem.add_matrix_equality(terms, asmb.at(a, x));
    }
  }
  return solve_guessing(std::move(g), x_star, RandomnessMode::Assemblage, tol);
}

RandomnessResult guessing_probability(const protocol::CorrelationTable& table, const std::vector<Povm>& bob,
                                      RandomnessMode mode, int x_star, double tol) {
  table.validate(1e-8);
  check_bob(bob, table.settings);
  if (mode == RandomnessMode::ViolationOnly) {
    const auto functional = scenario::steering_functional_two_mubs(table.d);
    const double s = protocol::steering_parameter(table, functional).S;
    return guessing_probability_from_violation(s, bob, functional, x_star, tol);
  }
  if (mode != RandomnessMode::FullTable) {
    throw std::invalid_argument("guessing_probability: a correlation table needs full-table or violation-only mode");
  }
  const int dim = bob.front().dim;
  // A zero cell p(a,b|x) forces every branch sigma^e_{a|x} off the support of B_{b|x}.
  std::vector<ComplexMatrix> frames;
  for (int x = 0; x < table.settings; ++x) {
    if (bob[x].outcomes() != table.d) throw qmath::DimensionError("guessing_probability: Bob outcome count mismatch");
    for (int a = 0; a < table.d; ++a) {
      ComplexMatrix excluded = ComplexMatrix::Zero(dim, dim);
      for (int b = 0; b < table.d; ++b)
        if (table.at(a, b, x) <= 0.0) excluded += bob[x][b];
      frames.push_back(spectral_frame(excluded, kSupportCut, false));
    }
  }
  GuessingProgram g = guessing_program(dim, table.d, table.settings, x_star, std::move(frames));
  for (int x = 0; x < table.settings; ++x) {
    for (int a = 0; a < table.d; ++a) {
      for (int b = 0; b < table.d; ++b) {
        std::vector<sdp::BlockTerm> terms;
        for (int e = 0; e < table.d; ++e)
          if (g.at(e, a, x) >= 0) terms.push_back({g.at(e, a, x), g.pull_back(bob[x][b], a, x)});
        g.problem.add_constraint(std::move(terms), table.at(a, b, x));
      }
    }
  }
  return solve_guessing(std::move(g), x_star, RandomnessMode::FullTable, tol);
}

RandomnessResult guessing_probability_from_violation(double s_observed, const std::vector<Povm>& bob,
                                                     const scenario::SteeringFunctional& functional, int x_star,
                                                     double tol) {
  check_bob(bob, functional.settings);
  const int n_out = functional.dim;
  const int dim = bob.front().dim;
  const int k = functional.settings;
  // W_{a|x} = sum_b w(a,b,x) B_{b|x}; S <= sum_x max_a lambda_max(W_{a|x}).
  std::vector<ComplexMatrix> w(static_cast<size_t>(k) * n_out, ComplexMatrix::Zero(dim, dim));
  std::vector<double> top(w.size());
  double s_algebraic = 0.0;
  for (int x = 0; x < k; ++x) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_out; ++a) {
      ComplexMatrix& wx = w[static_cast<size_t>(x) * n_out + a];
      for (int b = 0; b < bob[x].outcomes(); ++b) wx += functional.weight(a, b, x) * bob[x][b];
      top[static_cast<size_t>(x) * n_out + a] = qmath::eig_max_hermitian(wx);
      best = std::max(best, top[static_cast<size_t>(x) * n_out + a]);
    }
    s_algebraic += best;
  }
  std::vector<ComplexMatrix> frames = identity_frames(dim, n_out * k);
  if (s_observed >= s_algebraic - kSaturationTol) {
    // Saturation leaves only the face where each branch lives in the top
    // eigenspace of its W_{a|x}, and only for maximizing a.
    for (int x = 0; x < k; ++x) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < n_out; ++a) best = std::max(best, top[static_cast<size_t>(x) * n_out + a]);
      for (int a = 0; a < n_out; ++a) {
        const size_t i = static_cast<size_t>(x) * n_out + a;
        frames[i] = top[i] >= best - kSaturationTol ? spectral_frame(w[i], best - 1e-8, true)
                                                    : ComplexMatrix(dim, 0);
      }
    }
  }
  GuessingProgram g = guessing_program(dim, n_out, k, x_star, std::move(frames));
  std::vector<sdp::BlockTerm> value;
  std::vector<sdp::BlockTerm> norm;
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  for (int e = 0; e < n_out; ++e) {
    for (int x = 0; x < k; ++x) {
      for (int a = 0; a < n_out; ++a) {
        if (g.at(e, a, x) < 0) continue;
        value.push_back({g.at(e, a, x), g.pull_back(w[static_cast<size_t>(x) * n_out + a], a, x)});
        if (x == 0) norm.push_back({g.at(e, a, x), g.pull_back(id, a, x)});
      }
    }
  }
  g.problem.add_constraint(std::move(value), s_observed);
  g.problem.add_constraint(std::move(norm), 1.0);
  return solve_guessing(std::move(g), x_star, RandomnessMode::ViolationOnly, tol);
}

}  // namespace mdisteer::steering
