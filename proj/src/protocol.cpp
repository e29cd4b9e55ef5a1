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

#include "mdisteer/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace mdisteer::protocol {

void CorrelationTable::validate(double tol) const {
  if (probs.size() != static_cast<size_t>(settings) * d * d) {
    throw qmath::DimensionError("CorrelationTable: storage size mismatch");
  }
  for (int x = 0; x < settings; ++x) {
    double sum = 0.0;
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        if (at(a, b, x) < -1e-12) throw std::invalid_argument("CorrelationTable: negative entry");
        sum += at(a, b, x);
      }
    }
    if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("CorrelationTable: setting is not normalized");
  }
}

namespace {

// Tr[X Y] without forming the product.
qmath::Complex trace_product(const ComplexMatrix& x, const ComplexMatrix& y) {
  return (x.transpose().array() * y.array()).sum();
}

void check_settings(int d, const std::vector<Povm>& povms, const char* who) {
  for (const auto& m : povms) {
    if (m.dim != d || m.outcomes() != d) {
      throw qmath::DimensionError(std::string(who) + ": measurement does not match the state dimension");
    }
  }
}

int factor_dim(const ComplexMatrix& state) {
  if (state.rows() != state.cols()) throw qmath::DimensionError("state is not square");
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(state.rows()))));
  if (d * d != state.rows()) throw qmath::DimensionError("state is not bipartite with equal factors");
  return d;
}

}  // namespace

CorrelationTable correlations(const ComplexMatrix& state, const std::vector<Povm>& alice,
                              const std::vector<Povm>& bob) {
  const int d = factor_dim(state);
  if (alice.size() != bob.size() || alice.empty()) {
    throw qmath::DimensionError("correlations: Alice and Bob need the same number of settings");
  }
  check_settings(d, alice, "correlations");
  check_settings(d, bob, "correlations");
  CorrelationTable t(d, static_cast<int>(alice.size()));
  for (int x = 0; x < t.settings; ++x) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        t.at(a, b, x) = trace_product(qmath::kron(alice[x][a], bob[x][b]), state).real();
      }
    }
  }
  return t;
}

WitnessReport steering_parameter(const CorrelationTable& table, const SteeringFunctional& functional) {
  if (table.d != functional.dim || table.settings != functional.settings) {
    throw qmath::DimensionError("steering_parameter: table does not match functional");
  }
  WitnessReport r;
  for (int x = 0; x < table.settings; ++x)
    for (int a = 0; a < table.d; ++a)
      for (int b = 0; b < table.d; ++b) r.S += functional.weight(a, b, x) * table.at(a, b, x);
  r.S_LHS = functional.lhs_bound;
  r.W_S = r.S - r.S_LHS;
  r.W_QRS = r.W_S / table.d;
  r.steering_detected = r.S > r.S_LHS;
  return r;
}

MdiTable mdi_table(const ComplexMatrix& state, const std::vector<Povm>& alice, const QuestionStateSet& qset,
                   const ComplexMatrix& bsm_projector) {
  const int d = factor_dim(state);
  if (qset.dim != d) throw qmath::DimensionError("mdi_table: question states do not match the state");
  check_settings(d, alice, "mdi_table");
  if (bsm_projector.rows() != d * d || bsm_projector.cols() != d * d) {
    throw qmath::DimensionError("mdi_table: Bell projector must act on Bob (x) Charlie");
  }
  MdiTable t;
  t.d = d;
  t.settings = static_cast<int>(alice.size());
  t.questions = qset.questions();
  t.probs.assign(static_cast<size_t>(t.settings) * d * t.questions, 0.0);

  for (int k = 0; k < t.questions; ++k) {
    const ComplexMatrix joint = qmath::kron(state, qset.sent_state(k));
    for (int x = 0; x < t.settings; ++x) {
      for (int a = 0; a < d; ++a) {
        const ComplexMatrix effect = qmath::kron(alice[x][a], bsm_projector);
        t.at(a, x, k) = trace_product(effect, joint).real();
      }
    }
  }
  return t;
}

MdiTable mdi_table(const ComplexMatrix& state, const std::vector<Povm>& alice, const QuestionStateSet& qset) {
  const int d = factor_dim(state);
  return mdi_table(state, alice, qset, qmath::projector(scenario::max_entangled(d)));
}

double mdi_yes_probability(const MdiTable& mdi, const QuestionStateSet& qset, int a, int b, int x) {
  double p = 0.0;
  for (int k = 0; k < mdi.questions; ++k) p += qset.s(b, x, k) * mdi.at(a, x, k);
  return p;
}

WitnessReport qrs_witness(const MdiTable& mdi, const QuestionStateSet& qset, const SteeringFunctional& functional) {
  if (mdi.d != functional.dim || mdi.settings != functional.settings || mdi.questions != qset.questions() ||
      qset.settings() != mdi.settings) {
    throw qmath::DimensionError("qrs_witness: inconsistent tables");
  }
  const int d = mdi.d;
  const double offset = functional.lhs_bound / functional.settings;
  WitnessReport r;
  double weighted = 0.0;
  for (int x = 0; x < mdi.settings; ++x) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const double p_yes = mdi_yes_probability(mdi, qset, a, b, x);
        const double w = functional.weight(a, b, x);
        weighted += w * p_yes;
        r.W_QRS += (w - offset) * p_yes;
      }
    }
  }
  r.S = d * weighted;
  r.S_LHS = functional.lhs_bound;
  r.W_S = r.S - r.S_LHS;
  r.steering_detected = r.W_QRS > 0.0;
  return r;
}

double critical_p(int d) {
  if (d < 2) throw std::invalid_argument("critical_p: d must be >= 2");
  // 2p + 2(1-p)/d = 1 + 1/sqrt(d) is linear in p.
  const double dd = static_cast<double>(d);
  return (1.0 + 1.0 / std::sqrt(dd) - 2.0 / dd) / (2.0 - 2.0 / dd);
}

CountsTable synthetic_counts(const CorrelationTable& table, double per_setting_total, int trials,
                             std::uint64_t seed) {
  CountsTable c;
  c.d = table.d;
  c.settings = table.settings;
  c.trials = trials;
  c.seed = seed;
  c.expected.resize(table.probs.size());
  for (size_t i = 0; i < table.probs.size(); ++i) {
    c.expected[i] = std::max(0.0, table.probs[i]) * per_setting_total;
  }
  return c;
}

}  // namespace mdisteer::protocol
