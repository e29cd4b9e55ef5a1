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

// Data-parallel kernels of the protocol layer. Each OpenMP kernel has a
// serial twin that produces bit-identical results; tests compare the two.

#include <cmath>
#include <exception>
#include <stdexcept>

#include <omp.h>

#include "mdisteer/protocol.hpp"

namespace mdisteer::protocol {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

namespace {

constexpr std::uint64_t kPoissonStream = 0x706f6973;  // "pois"
constexpr std::uint64_t kLhsStream = 0x6c6873;        // "lhs"

void check_counts(const CountsTable& counts) {
  if (counts.trials < 2) throw std::invalid_argument("poisson_mc: need at least 2 trials");
  if (counts.expected.size() != static_cast<size_t>(counts.settings) * counts.d * counts.d) {
    throw qmath::DimensionError("poisson_mc: counts table has wrong size");
  }
  const size_t cells = static_cast<size_t>(counts.d) * counts.d;
  for (int x = 0; x < counts.settings; ++x) {
    double total = 0.0;
    for (size_t i = 0; i < cells; ++i) {
      const double e = counts.expected[x * cells + i];
      if (e < 0.0) throw std::invalid_argument("poisson_mc: negative expected count");
      total += e;
    }
    if (total <= 0.0) throw std::invalid_argument("poisson_mc: zero total counts in a setting");
  }
}

CorrelationTable resample(const CountsTable& counts, std::mt19937_64& rng) {
  CorrelationTable t(counts.d, counts.settings);
  const size_t cells = static_cast<size_t>(counts.d) * counts.d;
  for (int x = 0; x < counts.settings; ++x) {
    double total = 0.0;
    for (size_t i = 0; i < cells; ++i) {
      const double mean = counts.expected[x * cells + i];
      double n = 0.0;
      if (mean > 0.0) {
        std::poisson_distribution<long long> poisson(mean);
        n = static_cast<double>(poisson(rng));
      }
      t.probs[x * cells + i] = n;
      total += n;
    }
    if (total <= 0.0) throw std::runtime_error("poisson_mc: a resampled setting has no counts");
    for (size_t i = 0; i < cells; ++i) t.probs[x * cells + i] /= total;
  }
  return t;
}

double mc_trial(const CountsTable& counts, const TableStatistic& statistic, int trial) {
  auto rng = substream(counts.seed, kPoissonStream, static_cast<std::uint64_t>(trial));
  return statistic(resample(counts, rng));
}

}  // namespace

McResult summarize(std::vector<double> values) {
  if (values.size() < 2) throw std::invalid_argument("summarize: need at least 2 values");
  McResult r;
  r.trials = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / r.trials;
  double ss = 0.0;
  for (double v : values) ss += (v - r.mean) * (v - r.mean);
  r.stddev = std::sqrt(ss / (r.trials - 1));
  r.values = std::move(values);
  return r;
}

McResult poisson_mc_serial(const CountsTable& counts, const TableStatistic& statistic) {
  check_counts(counts);
  std::vector<double> values(counts.trials);
  for (int t = 0; t < counts.trials; ++t) values[t] = mc_trial(counts, statistic, t);
  return summarize(std::move(values));
}

McResult poisson_mc(const CountsTable& counts, const TableStatistic& statistic) {
  check_counts(counts);
  std::vector<double> values(counts.trials);
  std::vector<std::exception_ptr> errors(counts.trials);
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < counts.trials; ++t) {
    try {
      values[t] = mc_trial(counts, statistic, t);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return summarize(std::move(values));
}

CorrelationTable sample_lhs_table(int d, const std::vector<Povm>& bob, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_hidden(1, 4);
  std::uniform_int_distribution<int> outcome(0, d - 1);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int settings = static_cast<int>(bob.size());

  CorrelationTable t(d, settings);
  const int lambdas = n_hidden(rng);
  std::vector<double> weight(lambdas);
  double wsum = 0.0;
  for (auto& w : weight) wsum += (w = expo(rng));

  for (int l = 0; l < lambdas; ++l) {
    // Alice's response p(a|x, lambda): deterministic half of the time.
    std::vector<std::vector<double>> resp(settings, std::vector<double>(d, 0.0));
    std::vector<int> det(settings);
    const bool deterministic = unit(rng) < 0.5;
    for (int x = 0; x < settings; ++x) {
      det[x] = outcome(rng);
      if (deterministic) {
        resp[x][det[x]] = 1.0;
      } else {
        double s = 0.0;
        for (auto& r : resp[x]) s += (r = expo(rng));
        for (auto& r : resp[x]) r /= s;
      }
    }

    // Bob's hidden state: random mixed, random pure, or the state that best
    // rewards the deterministic assignment det (which saturates the bound
    // for two-setting functionals).
    qmath::ComplexMatrix rho;
    const double kind = unit(rng);
    if (kind < 0.35) {
      rho = qmath::random_density(d, rng);
    } else if (kind < 0.7) {
      rho = qmath::projector(qmath::random_ket(d, rng));
    } else {
      qmath::ComplexMatrix sum = qmath::ComplexMatrix::Zero(d, d);
      for (int x = 0; x < settings; ++x) sum += bob[x][outcome(rng)];
      Eigen::SelfAdjointEigenSolver<qmath::ComplexMatrix> es(sum);
      rho = qmath::projector(es.eigenvectors().col(d - 1));
    }

    for (int x = 0; x < settings; ++x) {
      for (int b = 0; b < d; ++b) {
        const double pb = std::max(0.0, (bob[x][b] * rho).trace().real());
        for (int a = 0; a < d; ++a) t.at(a, b, x) += weight[l] / wsum * resp[x][a] * pb;
      }
    }
  }
  return t;
}

namespace {

double lhs_sample_s(const SteeringFunctional& f, const std::vector<Povm>& bob, std::uint64_t seed, long i) {
  auto rng = substream(seed, kLhsStream, static_cast<std::uint64_t>(i));
  return steering_parameter(sample_lhs_table(f.dim, bob, rng), f).S;
}

}  // namespace

LhsScan scan_lhs_models_serial(const SteeringFunctional& functional, const std::vector<Povm>& bob, long samples,
                               std::uint64_t seed) {
  LhsScan scan;
  scan.samples = samples;
  scan.max_S = -1.0;
  for (long i = 0; i < samples; ++i) {
    const double s = lhs_sample_s(functional, bob, seed, i);
    if (s > scan.max_S) {
      scan.max_S = s;
      scan.argmax = i;
    }
  }
  return scan;
}

LhsScan scan_lhs_models(const SteeringFunctional& functional, const std::vector<Povm>& bob, long samples,
                        std::uint64_t seed) {
  std::vector<double> values(samples);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < samples; ++i) values[i] = lhs_sample_s(functional, bob, seed, i);
  LhsScan scan;
  scan.samples = samples;
  scan.max_S = -1.0;
  for (long i = 0; i < samples; ++i) {
    if (values[i] > scan.max_S) {
      scan.max_S = values[i];
      scan.argmax = i;
    }
  }
  return scan;
}

}  // namespace mdisteer::protocol
