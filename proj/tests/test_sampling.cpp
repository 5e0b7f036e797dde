// Copyright 2026 The dbqsp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "dbqsp/errors.hpp"
#include "dbqsp/harness.hpp"
#include "dbqsp/sampling.hpp"
#include "oracles.hpp"

using namespace dbqsp;

namespace {

struct Welford {
  double n = 0, mean = 0, m2 = 0;
  void add(double x) {
    n += 1;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double se() const { return std::sqrt(m2 / (n - 1) / n); }
  double var() const { return m2 / (n - 1); }
};

ShotAllocation fixed_alloc(const Observable& h, uint64_t singles, uint64_t pairs, uint64_t joints) {
  ShotAllocation a = ShotAllocation::uniform(h, 0, true);
  for (auto& v : a.singles) v = singles;
  for (auto& [k, v] : a.pairs) v = pairs;
  for (auto& [k, v] : a.joints) v = joints;
  return a;
}

}  // namespace

TEST(SamplePauli, EigenstateIsDeterministic) {
  const auto out = sample_pauli(StateVector::basis(2, 0), PauliString("ZZ"), 1000, 1);
  for (auto o : out) EXPECT_EQ(o, 1);
  EXPECT_THROW(sample_pauli(StateVector::basis(2, 0), PauliString("ZZ"), 0, 1), std::invalid_argument);
}

TEST(SamplePauli, UnbiasedAndReproducible) {
  const auto plus = StateVector::product("+");
  const auto a = sample_pauli(plus, PauliString("Z"), 1000000, 42);
  const auto b = sample_pauli(plus, PauliString("Z"), 1000000, 42);
  EXPECT_EQ(a, b);
  double m = 0;
  for (auto o : a) m += o;
  EXPECT_LT(std::abs(m / 1e6), 5e-3);
}

TEST(UnbiasedSquare, Examples) {
  EXPECT_DOUBLE_EQ(unbiased_square_estimator(Outcomes{1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(unbiased_square_estimator(Outcomes{1, -1}), -1.0);
  EXPECT_NEAR(unbiased_square_estimator(Outcomes{1, 1, -1}), -1.0 / 3.0, 1e-15);
  EXPECT_THROW(unbiased_square_estimator(Outcomes{1}), EstimatorError);
}

TEST(VarianceEstimators, SingleTermUnbiased) {
  const Observable h(1, {{0.7, PauliString("X")}});
  std::mt19937_64 rng(3);
  const auto psi = StateVector::random(1, rng);
  const auto ex = true_expectations(psi, h);
  const double truth = 0.49 * (1 - ex.singles[0] * ex.singles[0]);
  const auto alloc = fixed_alloc(h, 5, 5, 5);
  Welford w;
  for (int r = 0; r < 100000; ++r) w.add(variance_estimators(h, draw_tallies(ex, alloc, rng)).unbiased);
  EXPECT_LT(std::abs(w.mean - truth), 3 * w.se());
}

TEST(VarianceEstimators, DeterministicOutcomesGiveExactVariance) {
  const Observable h(2, {{0.5, PauliString("ZI")}, {-0.25, PauliString("ZZ")}, {0.1, PauliString("IZ")}});
  const auto psi = StateVector::basis(2, 1);
  const auto alloc = fixed_alloc(h, 3, 2, 2);
  const auto samples = draw_samples(psi, h, alloc, 5);
  const auto ve = variance_estimators(h, samples);
  EXPECT_NEAR(ve.unbiased, 0.0, 1e-15);
  EXPECT_NEAR(ve.naive, 0.0, 1e-15);
  EXPECT_NEAR(alternative_variance_estimator(h, samples), 0.0, 1e-15);
  EXPECT_NEAR(estimator_variance_formula(h, true_expectations(psi, h), alloc, EstimatorKind::unbiased), 0.0, 1e-15);
}

TEST(VarianceEstimators, MonteCarloMatchesDenseVariance) {
  std::mt19937_64 rng(8);
  const Observable h = random_observable(2, 3, rng);
  const auto psi = StateVector::random(2, rng);
  const double truth = oracle::variance(psi.amplitudes(), to_dense(h));
  const auto ex = true_expectations(psi, h);
  const auto alloc = fixed_alloc(h, 4, 3, 3);
  Welford u, a, bias;
  for (int r = 0; r < 10000; ++r) {
    const auto t = draw_tallies(ex, alloc, rng);
    const auto ve = variance_estimators(h, t);
    u.add(ve.unbiased);
    a.add(alternative_variance_estimator(h, t));
    bias.add(ve.unbiased - ve.naive);
  }
  EXPECT_LT(std::abs(u.mean - truth), 3 * u.se());
  EXPECT_LT(std::abs(a.mean - truth), 3 * a.se());
  EXPECT_LT(std::abs(bias.mean - naive_bias(h, ex, alloc)), 4 * bias.se() + 1e-15);
}

TEST(TalliesAndSamples, SameLaw) {
  std::mt19937_64 rng(1);
  const Observable h = random_observable(2, 3, rng);
  const auto psi = StateVector::random(2, rng);
  const auto ex = true_expectations(psi, h);
  const auto alloc = fixed_alloc(h, 6, 4, 3);
  Welford from_samples, from_tallies;
  for (uint64_t r = 0; r < 20000; ++r) {
    from_samples.add(variance_estimators(h, draw_samples(psi, h, alloc, r)).unbiased);
    from_tallies.add(variance_estimators(h, draw_tallies(ex, alloc, rng)).unbiased);
  }
  EXPECT_LT(std::abs(from_samples.mean - from_tallies.mean),
            4 * std::hypot(from_samples.se(), from_tallies.se()));
  EXPECT_NEAR(from_samples.var() / from_tallies.var(), 1.0, 0.06);
}

TEST(VarianceFormula, HomogeneousInShots) {
  std::mt19937_64 rng(10);
  const Observable h = random_observable(3, 4, rng);
  const auto ex = true_expectations(StateVector::random(3, rng), h);
  for (auto kind : {EstimatorKind::unbiased, EstimatorKind::alternative}) {
    // unbiased has 1/(N(N-1)) pieces, so compare at large N
    const double a = estimator_variance_formula(h, ex, fixed_alloc(h, 100000, 100000, 100000), kind);
    const double b = estimator_variance_formula(h, ex, fixed_alloc(h, 200000, 200000, 200000), kind);
    EXPECT_NEAR(a / b, 2.0, 1e-3);
  }
}

TEST(VarianceFormula, AlternativeSingleTerm) {
  const Observable h(1, {{1.0, PauliString("Z")}});
  TermExpectations ex;
  ex.singles = {0.3};
  const auto alloc = fixed_alloc(h, 7, 7, 9);
  EXPECT_NEAR(estimator_variance_formula(h, ex, alloc, EstimatorKind::alternative), (1 - 0.3 * 0.3 * 0.3 * 0.3) / 9,
              1e-15);
  ex.singles = {1.0};
  EXPECT_NEAR(estimator_variance_formula(h, ex, alloc, EstimatorKind::alternative), 0.0, 1e-15);
}

TEST(Allocation, ZeroGuessIsProportionalToWeights) {
  const Observable h(2, {{0.5, PauliString("ZI")}, {-1.5, PauliString("IZ")}});
  const auto r = allocate_shots(h, TermExpectations::zeros(h), 0.1);
  // pairs and joints with equal sqrt(1-0) factors scale with |w_i w_j|
  const double s = r.weight_sum;
  for (const auto& [k, n] : r.alloc.pairs) {
    const double ideal = std::abs(h.terms()[k.first].weight * h.terms()[k.second].weight) * s / 0.01;
    EXPECT_GE(static_cast<double>(n), ideal);
    EXPECT_LT(static_cast<double>(n), ideal + 1.0);
  }
  EXPECT_LE(static_cast<double>(r.total), r.cap);
  EXPECT_NEAR(r.cap, 4 * 16 / 0.01, 1e-9);
}

TEST(Allocation, HalvingEpsilonQuadruplesTotal) {
  std::mt19937_64 rng(12);
  const Observable h = random_observable(3, 5, rng);
  const auto g = TermExpectations::zeros(h);
  const auto a = allocate_shots(h, g, 0.02), b = allocate_shots(h, g, 0.01);
  EXPECT_NEAR(static_cast<double>(b.total) / static_cast<double>(a.total), 4.0, 0.01);
  EXPECT_LE(estimator_variance_formula(h, g, b.alloc, EstimatorKind::alternative), 1e-4 * (1 + 1e-12));
}

TEST(EnergyAndVariance, ConvergesAtLargeShots) {
  std::mt19937_64 rng(30);
  const Observable h = random_observable(3, 4, rng);
  const auto psi = StateVector::random(3, rng);
  const auto est = estimate_energy_and_variance(psi, h, ShotAllocation::uniform(h, 10000000, false), 4);
  const Eigen::MatrixXcd hd = to_dense(h);
  EXPECT_LT(std::abs(est.energy - psi.amplitudes().dot(hd * psi.amplitudes()).real()), 1e-2);
  EXPECT_LT(std::abs(est.variance - oracle::variance(psi.amplitudes(), hd)), 1e-2);
  EXPECT_GT(est.se_energy, 0.0);
  const auto again = estimate_energy_and_variance(psi, h, ShotAllocation::uniform(h, 10000000, false), 4);
  EXPECT_EQ(est.energy, again.energy);
  EXPECT_EQ(est.variance, again.variance);
}

TEST(EnergyAndVariance, DeterministicInstanceIsExact) {
  const Observable h(2, {{0.5, PauliString("ZI")}, {0.2, PauliString("ZZ")}});
  const auto est = estimate_energy_and_variance(StateVector::basis(2, 3), h, ShotAllocation::uniform(h, 5, false), 1);
  EXPECT_NEAR(est.energy, -0.5 + 0.2, 1e-15);
  EXPECT_NEAR(est.variance, 0.0, 1e-15);
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(SampleJson, RunLengthEncoding) {
  const Observable h(1, {{1.0, PauliString("Z")}});
  const auto s = draw_samples(StateVector::basis(1, 0), h, fixed_alloc(h, 4, 1, 1), 3);
  const nlohmann::json j = s;
  EXPECT_EQ(j.at("groups").at(0).at("rle"), nlohmann::json::parse("[[1,4]]"));
}
