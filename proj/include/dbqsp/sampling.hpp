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

// Simulated Pauli measurements, variance estimators and shot allocation.
//
// Seeds: every random stream is seeded with derive_seed(base, stream), which
// runs splitmix64 over base ^ (stream * 0x9E3779B97F4A7C15). Streams are
// group indices inside a SampleSet, step indices inside a run, and replica
// indices inside Monte-Carlo loops.

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dbqsp/pauli.hpp"
#include "dbqsp/statevector.hpp"

namespace dbqsp {

uint64_t splitmix64(uint64_t x);
uint64_t derive_seed(uint64_t base, uint64_t stream);

using Outcomes = std::vector<int8_t>;
using TermPair = std::pair<int, int>;

// Ordered (i, j), i != j, with commuting strings.
std::vector<TermPair> commuting_pairs(const Observable& h);

struct ShotAllocation {
  std::vector<uint64_t> singles;          // N_i, by term index
  std::map<TermPair, uint64_t> pairs;     // N_ij
  std::map<TermPair, uint64_t> joints;    // N_{i(x)j}, i == j included

  uint64_t total() const;
  static ShotAllocation uniform(const Observable& h, uint64_t shots, bool with_joints = true);
};

// <P_i> and <P_i P_j> (real for commuting pairs).
struct TermExpectations {
  std::vector<double> singles;
  std::map<TermPair, double> pairs;

  static TermExpectations zeros(const Observable& h);
};

TermExpectations true_expectations(const StateVector& state, const Observable& h);

enum class GroupKind { single, pair, joint };

struct SampleGroup {
  GroupKind kind;
  int i;
  int j;
  Outcomes outcomes;
};

struct SampleSet {
  uint64_t seed = 0;
  std::vector<SampleGroup> groups;
};

struct Tally {
  uint64_t n = 0;
  int64_t sum = 0;
  double mean() const { return n ? static_cast<double>(sum) / static_cast<double>(n) : 0.0; }
};

struct TallySet {
  std::vector<Tally> singles;
  std::map<TermPair, Tally> pairs;
  std::map<TermPair, Tally> joints;
};

Outcomes sample_pauli(const StateVector& state, const PauliString& p, uint64_t shots, uint64_t seed);
Outcomes sample_with_mean(double expectation, uint64_t shots, uint64_t seed);

SampleSet draw_samples(const StateVector& state, const Observable& h, const ShotAllocation& alloc, uint64_t seed);
TallySet tally(const SampleSet& samples, std::size_t n_terms);
// Binomial draws of the sufficient statistics; same law as draw_samples.
TallySet draw_tallies(const TermExpectations& ex, const ShotAllocation& alloc, std::mt19937_64& rng);

double unbiased_square_estimator(const Outcomes& outcomes);
double unbiased_square_estimator(uint64_t n, int64_t sum);

struct VarianceEstimates {
  double naive;
  double unbiased;
};

VarianceEstimates variance_estimators(const Observable& h, const SampleSet& samples);
VarianceEstimates variance_estimators(const Observable& h, const TallySet& t);
double alternative_variance_estimator(const Observable& h, const SampleSet& samples);
double alternative_variance_estimator(const Observable& h, const TallySet& t);

// Expected bias of the naive (squared-mean) estimate of <H>^2: sum w_i^2 (1 - <P_i>^2) / N_i.
// The naive variance estimate sits below the unbiased one by this amount.
double naive_bias(const Observable& h, const TermExpectations& ex, const ShotAllocation& alloc);

enum class EstimatorKind { unbiased, unbiased_uncorrected, alternative };

double estimator_variance_formula(const Observable& h, const TermExpectations& ex, const ShotAllocation& alloc,
                                  EstimatorKind which);

struct AllocationResult {
  ShotAllocation alloc;
  uint64_t total = 0;
  double cap = 0.0;        // 4 ||w||_1^4 / eps^2
  double weight_sum = 0.0; // S with sqrt(lambda) = S / eps^2
};

AllocationResult allocate_shots(const Observable& h, const TermExpectations& guess, double epsilon,
                                bool with_singles = true);

struct EnergyVarianceEstimate {
  double energy = 0.0;
  double variance = 0.0;
  double se_energy = 0.0;
  double se_variance = 0.0;
};

EnergyVarianceEstimate estimate_energy_and_variance(const StateVector& state, const Observable& h,
                                                    const ShotAllocation& alloc, uint64_t seed);

void to_json(nlohmann::json& j, const ShotAllocation& a);
void to_json(nlohmann::json& j, const SampleSet& s);

}  // namespace dbqsp
