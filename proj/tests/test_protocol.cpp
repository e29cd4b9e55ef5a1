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

#include <cmath>
#include <random>

#include "mdisteer/protocol.hpp"

namespace {

using namespace mdisteer;
using protocol::CorrelationTable;

double linear_law(double p, int d) { return 2.0 * p + 2.0 * (1.0 - p) / d; }

TEST(Correlations, MaximallyEntangledQutritIsPerfectlyCorrelated) {
  const auto mubs = scenario::two_mubs(3);
  const auto t = protocol::correlations(scenario::isotropic(3, 1.0).matrix, mubs, mubs);
  EXPECT_NO_THROW(t.validate());
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      EXPECT_NEAR(t.at(a, b, 0), a == b ? 1.0 / 3 : 0.0, 1e-14);
      EXPECT_NEAR(t.at(a, b, 1), (a + b) % 3 == 0 ? 1.0 / 3 : 0.0, 1e-14);
    }
  const auto w = protocol::steering_parameter(t, scenario::steering_functional_two_mubs(3));
  EXPECT_NEAR(w.S, 2.0, 1e-12);
  EXPECT_TRUE(w.steering_detected);
}

TEST(Correlations, RejectsMismatchedDimensions) {
  const auto m3 = scenario::two_mubs(3);
  const auto m2 = scenario::two_mubs(2);
  EXPECT_THROW(protocol::correlations(scenario::isotropic(3, 1.0).matrix, m3, m2), qmath::DimensionError);
}

class LinearLaw : public ::testing::TestWithParam<int> {};

TEST_P(LinearLaw, SteeringValueIsAffineInVisibility) {
  const int d = GetParam();
  const auto mubs = scenario::two_mubs(d);
  const auto f = scenario::steering_functional_two_mubs(d);
  for (int i = 0; i <= 10; ++i) {
    const double p = i / 10.0;
    const auto w = protocol::steering_parameter(protocol::correlations(scenario::isotropic(d, p).matrix, mubs, mubs), f);
    EXPECT_NEAR(w.S, linear_law(p, d), 1e-12) << "p=" << p;
    EXPECT_NEAR(w.W_QRS, w.W_S / d, 1e-15);
    EXPECT_EQ(w.steering_detected, w.S > w.S_LHS);
  }
}

INSTANTIATE_TEST_SUITE_P(Dims, LinearLaw, ::testing::Values(2, 3, 4, 5));

TEST(CriticalP, ClosedFormValues) {
  EXPECT_NEAR(protocol::critical_p(3), 0.683, 5e-4);
  EXPECT_NEAR(protocol::critical_p(2), 1.0 / std::sqrt(2.0), 1e-12);
  for (int d = 2; d <= 8; ++d) {
    const double pc = protocol::critical_p(d);
    EXPECT_NEAR(linear_law(pc, d), 1.0 + 1.0 / std::sqrt(d), 1e-12);
  }
  EXPECT_THROW(protocol::critical_p(1), std::invalid_argument);
}

TEST(Detection, MonotoneInVisibility) {
  const auto mubs = scenario::two_mubs(3);
  const auto f = scenario::steering_functional_two_mubs(3);
  int flips = 0;
  bool prev = false;
  for (int i = 0; i <= 400; ++i) {
    const double p = i / 400.0;
    const bool det =
        protocol::steering_parameter(protocol::correlations(scenario::isotropic(3, p).matrix, mubs, mubs), f)
            .steering_detected;
    if (det != prev) ++flips;
    prev = det;
    EXPECT_EQ(det, p > protocol::critical_p(3));
  }
  EXPECT_EQ(flips, 1);
}

TEST(Mdi, YesProbabilityEqualsCorrelationOverD) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int d : {2, 3, 4}) {
    const auto mubs = scenario::two_mubs(d);
    const auto qset = scenario::question_states(d);
    const auto f = scenario::steering_functional_two_mubs(d);
    for (int trial = 0; trial < 20; ++trial) {
      const auto state = scenario::isotropic(d, unif(rng)).matrix;
      const auto table = protocol::correlations(state, mubs, mubs);
      const auto mdi = protocol::mdi_table(state, mubs, qset);
      for (int x = 0; x < 2; ++x)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            EXPECT_NEAR(protocol::mdi_yes_probability(mdi, qset, a, b, x), table.at(a, b, x) / d, 1e-12);
      const auto direct = protocol::steering_parameter(table, f);
      const auto qrs = protocol::qrs_witness(mdi, qset, f);
      EXPECT_NEAR(qrs.W_QRS, direct.W_S / d, 1e-12);
      EXPECT_NEAR(qrs.S, direct.S, 1e-11);
      EXPECT_EQ(qrs.steering_detected, direct.steering_detected);
    }
  }
}

TEST(Mdi, RelationHoldsForArbitraryStates) {
  std::mt19937_64 rng(12);
  const auto mubs = scenario::two_mubs(3);
  const auto qset = scenario::question_states(3);
  const auto f = scenario::steering_functional_two_mubs(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto state = qmath::random_density(9, rng);
    const auto table = protocol::correlations(state, mubs, mubs);
    const auto mdi = protocol::mdi_table(state, mubs, qset);
    for (int x = 0; x < 2; ++x)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          EXPECT_NEAR(protocol::mdi_yes_probability(mdi, qset, a, b, x), table.at(a, b, x) / 3, 1e-12);
    EXPECT_NEAR(protocol::qrs_witness(mdi, qset, f).W_QRS, protocol::steering_parameter(table, f).W_S / 3, 1e-12);
  }
}

TEST(Mdi, RawTableIsNonNegative) {
  const auto mubs = scenario::two_mubs(3);
  const auto qset = scenario::question_states(3);
  const auto mdi = protocol::mdi_table(scenario::isotropic(3, 0.8).matrix, mubs, qset);
  EXPECT_EQ(mdi.questions, 12);
  for (double v : mdi.probs) EXPECT_GE(v, -1e-15);
}

protocol::CountsTable counts_at(double p, double per_setting, int trials, std::uint64_t seed) {
  const auto mubs = scenario::two_mubs(3);
  return protocol::synthetic_counts(protocol::correlations(scenario::isotropic(3, p).matrix, mubs, mubs),
                                    per_setting, trials, seed);
}

double steering_value(const CorrelationTable& t) {
  static const auto f = scenario::steering_functional_two_mubs(3);
  return protocol::steering_parameter(t, f).S;
}

TEST(PoissonMc, ConstantStatisticHasZeroSpread) {
  const auto r = protocol::poisson_mc(counts_at(0.9, 3e4, 10, 1), [](const CorrelationTable&) { return 0.25; });
  EXPECT_EQ(r.stddev, 0.0);
  EXPECT_EQ(r.mean, 0.25);
  EXPECT_EQ(r.trials, 10);
}

TEST(PoissonMc, SpreadScalesWithInverseSquareRootOfCounts) {
  const auto small = protocol::poisson_mc(counts_at(0.9, 3e3, 100, 2), steering_value);
  const auto large = protocol::poisson_mc(counts_at(0.9, 3e5, 100, 2), steering_value);
  const double ratio = large.stddev / small.stddev;
  EXPECT_NEAR(ratio, 0.1, 0.03);
}

TEST(PoissonMc, ErrorBarOfOrderOneThousandth) {
  const auto r = protocol::poisson_mc(counts_at(0.987, 3e4, 100, 3), steering_value);
  EXPECT_GT(r.stddev, std::pow(10.0, -3.5));
  EXPECT_LT(r.stddev, std::pow(10.0, -2.5));
  EXPECT_NEAR(r.mean, linear_law(0.987, 3), 5e-3);
}

TEST(PoissonMc, ParallelMatchesSerialBitForBit) {
  const auto counts = counts_at(0.8, 3e4, 64, 4);
  const auto par = protocol::poisson_mc(counts, steering_value);
  const auto ser = protocol::poisson_mc_serial(counts, steering_value);
  EXPECT_EQ(par.values, ser.values);
  EXPECT_EQ(par.mean, ser.mean);
  EXPECT_EQ(par.stddev, ser.stddev);
}

TEST(PoissonMc, SeedControlsStream) {
  const auto a = protocol::poisson_mc(counts_at(0.8, 3e4, 8, 5), steering_value);
  const auto b = protocol::poisson_mc(counts_at(0.8, 3e4, 8, 5), steering_value);
  const auto c = protocol::poisson_mc(counts_at(0.8, 3e4, 8, 6), steering_value);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
}

TEST(PoissonMc, RejectsDegenerateInput) {
  EXPECT_THROW(protocol::poisson_mc(counts_at(0.8, 3e4, 1, 0), steering_value), std::invalid_argument);
  auto zero = counts_at(0.8, 3e4, 5, 0);
  for (double& e : zero.expected) e = 0.0;
  EXPECT_THROW(protocol::poisson_mc(zero, steering_value), std::invalid_argument);
}

TEST(PoissonMc, PropagatesStatisticFailures) {
  EXPECT_THROW(protocol::poisson_mc(counts_at(0.8, 3e4, 5, 0),
                                    [](const CorrelationTable&) -> double { throw std::runtime_error("boom"); }),
               std::runtime_error);
}

TEST(Summarize, SampleStatistics) {
  const auto r = protocol::summarize({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(r.mean, 2.5);
  EXPECT_NEAR(r.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_THROW(protocol::summarize({1.0}), std::invalid_argument);
}

class LhsSampler : public ::testing::TestWithParam<int> {};

TEST_P(LhsSampler, NeverExceedsTheLhsBound) {
  const int d = GetParam();
  const auto f = scenario::steering_functional_two_mubs(d);
  const auto scan = protocol::scan_lhs_models(f, scenario::two_mubs(d), 10000, 99);
  EXPECT_EQ(scan.samples, 10000);
  EXPECT_LE(scan.max_S, f.lhs_bound + 1e-9);
  // The optimized hidden states come close to the bound.
  EXPECT_GT(scan.max_S, f.lhs_bound - 0.05);
}

INSTANTIATE_TEST_SUITE_P(Dims, LhsSampler, ::testing::Values(2, 3, 4));

TEST(LhsSampler, TablesAreValidDistributions) {
  std::mt19937_64 rng(7);
  const auto bob = scenario::two_mubs(3);
  for (int i = 0; i < 50; ++i) EXPECT_NO_THROW(protocol::sample_lhs_table(3, bob, rng).validate(1e-10));
}

TEST(LhsSampler, ParallelMatchesSerial) {
  const auto f = scenario::steering_functional_two_mubs(3);
  const auto bob = scenario::two_mubs(3);
  const auto par = protocol::scan_lhs_models(f, bob, 2000, 8);
  const auto ser = protocol::scan_lhs_models_serial(f, bob, 2000, 8);
  EXPECT_EQ(par.max_S, ser.max_S);
  EXPECT_EQ(par.argmax, ser.argmax);
}

}  // namespace
