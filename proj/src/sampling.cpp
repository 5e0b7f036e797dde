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

#include "dbqsp/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "dbqsp/errors.hpp"
#include "dbqsp/kernels.hpp"

namespace dbqsp {

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t base, uint64_t stream) {
  return splitmix64(base ^ (stream * 0x9E3779B97F4A7C15ULL));
}

std::vector<TermPair> commuting_pairs(const Observable& h) {
  std::vector<TermPair> out;
  const auto& t = h.terms();
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (i != j && t[i].string.commutes_with(t[j].string)) out.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return out;
}

uint64_t ShotAllocation::total() const {
  uint64_t s = 0;
  for (auto n : singles) s += n;
  for (const auto& [k, n] : pairs) s += n;
  for (const auto& [k, n] : joints) s += n;
  return s;
}

ShotAllocation ShotAllocation::uniform(const Observable& h, uint64_t shots, bool with_joints) {
  ShotAllocation a;
  a.singles.assign(h.size(), shots);
  for (const auto& p : commuting_pairs(h)) a.pairs[p] = shots;
  if (with_joints) {
    for (int i = 0; i < static_cast<int>(h.size()); ++i) {
      for (int j = 0; j < static_cast<int>(h.size()); ++j) a.joints[{i, j}] = shots;
    }
  }
  return a;
}

TermExpectations TermExpectations::zeros(const Observable& h) {
  TermExpectations e;
  e.singles.assign(h.size(), 0.0);
  for (const auto& p : commuting_pairs(h)) e.pairs[p] = 0.0;
  return e;
}

TermExpectations true_expectations(const StateVector& state, const Observable& h) {
  TermExpectations e;
  const auto& t = h.terms();
  for (const auto& term : t) {
    e.singles.push_back(pauli_expectation(compile_term(1.0, term.string), state.amplitudes()));
  }
  for (const auto& [i, j] : commuting_pairs(h)) {
    const auto prod = pauli_mul(t[i].string, t[j].string);
    e.pairs[{i, j}] = prod.phase.real() * pauli_expectation(compile_term(1.0, prod.product), state.amplitudes());
  }
  return e;
}

Outcomes sample_with_mean(double expectation, uint64_t shots, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(std::clamp(0.5 * (1.0 + expectation), 0.0, 1.0));
  Outcomes out(shots);
  for (auto& b : out) b = coin(rng) ? 1 : -1;
  return out;
}

Outcomes sample_pauli(const StateVector& state, const PauliString& p, uint64_t shots, uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  if (p.n_qubits() != state.n_qubits()) throw DimensionError("Pauli/state qubit count mismatch");
  return sample_with_mean(pauli_expectation(compile_term(1.0, p), state.amplitudes()), shots, seed);
}

SampleSet draw_samples(const StateVector& state, const Observable& h, const ShotAllocation& alloc, uint64_t seed) {
  const TermExpectations ex = true_expectations(state, h);
  SampleSet s;
  s.seed = seed;
  uint64_t stream = 0;
  for (std::size_t i = 0; i < alloc.singles.size(); ++i) {
    const uint64_t n = alloc.singles[i];
    if (n == 0) continue;
    s.groups.push_back({GroupKind::single, static_cast<int>(i), static_cast<int>(i),
                        sample_with_mean(ex.singles.at(i), n, derive_seed(seed, stream++))});
  }
  for (const auto& [key, n] : alloc.pairs) {
    if (n == 0) continue;
    auto it = ex.pairs.find(key);
    if (it == ex.pairs.end()) throw EstimatorError("pair allocation for an anticommuting or unknown pair");
    s.groups.push_back({GroupKind::pair, key.first, key.second, sample_with_mean(it->second, n, derive_seed(seed, stream++))});
  }
  for (const auto& [key, n] : alloc.joints) {
    if (n == 0) continue;
    Outcomes a = sample_with_mean(ex.singles.at(static_cast<std::size_t>(key.first)), n, derive_seed(seed, stream++));
    const Outcomes b = sample_with_mean(ex.singles.at(static_cast<std::size_t>(key.second)), n, derive_seed(seed, stream++));
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = static_cast<int8_t>(a[k] * b[k]);
    s.groups.push_back({GroupKind::joint, key.first, key.second, std::move(a)});
  }
  return s;
}

TallySet tally(const SampleSet& samples, std::size_t n_terms) {
  TallySet t;
  t.singles.assign(n_terms, Tally{});
  for (const auto& g : samples.groups) {
    Tally x;
    x.n = g.outcomes.size();
    for (auto b : g.outcomes) x.sum += b;
    switch (g.kind) {
      case GroupKind::single: t.singles.at(static_cast<std::size_t>(g.i)) = x; break;
      case GroupKind::pair: t.pairs[{g.i, g.j}] = x; break;
      case GroupKind::joint: t.joints[{g.i, g.j}] = x; break;
    }
  }
  return t;
}

namespace {

Tally binomial_tally(double mean, uint64_t n, std::mt19937_64& rng) {
  std::binomial_distribution<int64_t> d(static_cast<int64_t>(n), std::clamp(0.5 * (1.0 + mean), 0.0, 1.0));
  const int64_t plus = d(rng);
  return {n, 2 * plus - static_cast<int64_t>(n)};
}

}  // namespace

TallySet draw_tallies(const TermExpectations& ex, const ShotAllocation& alloc, std::mt19937_64& rng) {
  TallySet t;
  t.singles.assign(ex.singles.size(), Tally{});
  for (std::size_t i = 0; i < alloc.singles.size(); ++i) {
    if (alloc.singles[i]) t.singles[i] = binomial_tally(ex.singles[i], alloc.singles[i], rng);
  }
  for (const auto& [key, n] : alloc.pairs) {
    if (n) t.pairs[key] = binomial_tally(ex.pairs.at(key), n, rng);
  }
  for (const auto& [key, n] : alloc.joints) {
    if (n) {
      t.joints[key] = binomial_tally(ex.singles[static_cast<std::size_t>(key.first)] *
                                         ex.singles[static_cast<std::size_t>(key.second)], n, rng);
    }
  }
  return t;
}

double unbiased_square_estimator(uint64_t n, int64_t sum) {
  if (n < 2) throw EstimatorError("unbiased square estimator needs N >= 2");
  const double nn = static_cast<double>(n);
  const double m = static_cast<double>(sum) / nn;
  return nn / (nn - 1.0) * (m * m - 1.0 / nn);
}

double unbiased_square_estimator(const Outcomes& outcomes) {
  int64_t s = 0;
  for (auto b : outcomes) s += b;
  return unbiased_square_estimator(outcomes.size(), s);
}

namespace {

double pair_part(const Observable& h, const TallySet& t) {
  const auto& terms = h.terms();
  double acc = 0.0;
  for (const auto& key : commuting_pairs(h)) {
    auto it = t.pairs.find(key);
    if (it == t.pairs.end() || it->second.n == 0) throw EstimatorError("missing pair samples");
    acc += terms[key.first].weight * terms[key.second].weight * it->second.mean();
  }
  return acc;
}

double sum_w2(const Observable& h) {
  double s = 0.0;
  for (const auto& term : h.terms()) s += term.weight * term.weight;
  return s;
}

}  // namespace

VarianceEstimates variance_estimators(const Observable& h, const TallySet& t) {
  const auto& terms = h.terms();
  if (t.singles.size() != terms.size()) throw EstimatorError("missing single-term samples");
  double lin = 0.0, diag_sq = 0.0, corrected = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Tally& x = t.singles[i];
    if (x.n < 2) throw EstimatorError("N_i < 2 for term " + std::to_string(i));
    const double w = terms[i].weight, m = x.mean();
    lin += w * m;
    diag_sq += w * w * m * m;
    corrected += w * w * unbiased_square_estimator(x.n, x.sum);
  }
  const double o2 = sum_w2(h) + pair_part(h, t);
  VarianceEstimates out;
  out.naive = o2 - lin * lin;
  out.unbiased = o2 - corrected - (lin * lin - diag_sq);
  return out;
}

VarianceEstimates variance_estimators(const Observable& h, const SampleSet& samples) {
  return variance_estimators(h, tally(samples, h.size()));
}

double alternative_variance_estimator(const Observable& h, const TallySet& t) {
  const auto& terms = h.terms();
  double joint = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      auto it = t.joints.find({static_cast<int>(i), static_cast<int>(j)});
      if (it == t.joints.end() || it->second.n == 0) throw EstimatorError("missing joint samples");
      joint += terms[i].weight * terms[j].weight * it->second.mean();
    }
  }
  return sum_w2(h) + pair_part(h, t) - joint;
}

double alternative_variance_estimator(const Observable& h, const SampleSet& samples) {
  return alternative_variance_estimator(h, tally(samples, h.size()));
}

double naive_bias(const Observable& h, const TermExpectations& ex, const ShotAllocation& alloc) {
  double b = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double w = h.terms()[i].weight, p = ex.singles.at(i);
    b += w * w * (1.0 - p * p) / static_cast<double>(alloc.singles.at(i));
  }
  return b;
}

namespace {

uint64_t count_of(const std::map<TermPair, uint64_t>& m, const TermPair& k) {
  auto it = m.find(k);
  if (it == m.end() || it->second == 0) throw EstimatorError("allocation misses a sampled group");
  return it->second;
}

double pair_variance(const Observable& h, const TermExpectations& ex, const ShotAllocation& alloc) {
  const auto& t = h.terms();
  double acc = 0.0;
  for (const auto& key : commuting_pairs(h)) {
    const double wi = t[key.first].weight, wj = t[key.second].weight;
    const double q = ex.pairs.at(key);
    acc += wi * wi * wj * wj * (1.0 - q * q) / static_cast<double>(count_of(alloc.pairs, key));
  }
  return acc;
}

double var_u(double p, double n) {
  return 2.0 / (n * (n - 1.0)) * (1.0 + 2.0 * (n - 2.0) * p * p - (2.0 * n - 3.0) * p * p * p * p);
}

}  // namespace

double estimator_variance_formula(const Observable& h, const TermExpectations& ex, const ShotAllocation& alloc,
                                  EstimatorKind which) {
  const auto& t = h.terms();
  const std::size_t l = t.size();
  double total = pair_variance(h, ex, alloc);

  if (which == EstimatorKind::alternative) {
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j < l; ++j) {
        const double wi = t[i].weight, wj = t[j].weight;
        const double pi = ex.singles.at(i), pj = ex.singles.at(j);
        const auto n = count_of(alloc.joints, {static_cast<int>(i), static_cast<int>(j)});
        total += wi * wi * wj * wj * (1.0 - pi * pi * pj * pj) / static_cast<double>(n);
      }
    }
    return total;
  }

  std::vector<double> w(l), p(l), n(l), v(l);
  for (std::size_t i = 0; i < l; ++i) {
    w[i] = t[i].weight;
    p[i] = ex.singles.at(i);
    n[i] = static_cast<double>(alloc.singles.at(i));
    if (n[i] < 2) throw EstimatorError("N_i < 2");
    v[i] = (1.0 - p[i] * p[i]) / n[i];
  }
  for (std::size_t i = 0; i < l; ++i) total += std::pow(w[i], 4) * var_u(p[i], n[i]);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i + 1; j < l; ++j) {
      total += 4.0 * w[i] * w[i] * w[j] * w[j] * (p[i] * p[i] * v[j] + p[j] * p[j] * v[i] + v[i] * v[j]);
    }
  }
  if (which == EstimatorKind::unbiased_uncorrected) {
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = i + 1; j < l; ++j) total += 4.0 * std::pow(w[i], 3) * w[j] * p[i] * p[j] * v[i];
    }
    return total;
  }
  double lin = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    lin += w[i] * p[i];
    sq += w[i] * w[i] * p[i] * p[i];
  }
  for (std::size_t i = 0; i < l; ++i) {
    // pairs (i,j), (i,k) sharing index i
    const double rest_lin = lin - w[i] * p[i];
    const double rest_sq = sq - w[i] * w[i] * p[i] * p[i];
    total += 4.0 * w[i] * w[i] * v[i] * (rest_lin * rest_lin - rest_sq);
    // squared-term / cross-term covariance
    total += 8.0 * std::pow(w[i], 3) * p[i] * v[i] * rest_lin;
  }
  return total;
}

AllocationResult allocate_shots(const Observable& h, const TermExpectations& guess, double epsilon,
                                bool with_singles) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const auto& t = h.terms();
  const std::size_t l = t.size();
  std::map<TermPair, double> c_pair, c_joint;
  double s = 0.0;
  for (const auto& key : commuting_pairs(h)) {
    const double q = guess.pairs.count(key) ? guess.pairs.at(key) : 0.0;
    const double c = std::abs(t[key.first].weight * t[key.second].weight) * std::sqrt(std::max(0.0, 1.0 - q * q));
    c_pair[key] = c;
    s += c;
  }
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      const double pp = guess.singles.at(i) * guess.singles.at(j);
      const double c = std::abs(t[i].weight * t[j].weight) * std::sqrt(std::max(0.0, 1.0 - pp * pp));
      c_joint[{static_cast<int>(i), static_cast<int>(j)}] = c;
      s += c;
    }
  }
  const double scale = s / (epsilon * epsilon);
  // ceil, with values within 1e-9 of an integer snapped to it
  auto snapped_ceil = [](double x) {
    const double r = std::round(x);
    return static_cast<uint64_t>(std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? r : std::ceil(x));
  };
  auto count = [&](double c) { return std::max<uint64_t>(2, snapped_ceil(c * scale)); };
  AllocationResult out;
  out.weight_sum = s;
  for (const auto& [k, c] : c_pair) out.alloc.pairs[k] = count(c);
  for (const auto& [k, c] : c_joint) out.alloc.joints[k] = count(c);
  for (const auto& [k, n] : out.alloc.pairs) out.total += n;
  for (const auto& [k, n] : out.alloc.joints) out.total += n;
  const double w1 = one_norm(h);
  out.cap = 4.0 * std::pow(w1, 4) / (epsilon * epsilon);
  if (with_singles) {
    std::vector<double> e(l);
    double s1 = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      const double p = guess.singles.at(i);
      e[i] = std::abs(t[i].weight) * std::sqrt(std::max(0.0, 1.0 - p * p));
      s1 += e[i];
    }
    out.alloc.singles.resize(l);
    for (std::size_t i = 0; i < l; ++i) {
      out.alloc.singles[i] = std::max<uint64_t>(2, snapped_ceil(e[i] * s1 / (epsilon * epsilon)));
    }
  }
  return out;
}

EnergyVarianceEstimate estimate_energy_and_variance(const StateVector& state, const Observable& h,
                                                    const ShotAllocation& alloc, uint64_t seed) {
  const TermExpectations ex = true_expectations(state, h);
  ShotAllocation a = alloc;
  a.joints.clear();
  std::mt19937_64 rng(derive_seed(seed, 0));
  const TallySet t = draw_tallies(ex, a, rng);
  const auto& terms = h.terms();
  EnergyVarianceEstimate out;
  TermExpectations plug;
  double var_e = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (t.singles[i].n < 2) throw EstimatorError("N_i < 2 for term " + std::to_string(i));
    const double m = t.singles[i].mean();
    out.energy += terms[i].weight * m;
    var_e += terms[i].weight * terms[i].weight * (1.0 - m * m) / static_cast<double>(t.singles[i].n);
    plug.singles.push_back(m);
  }
  for (const auto& [k, x] : t.pairs) plug.pairs[k] = x.mean();
  out.variance = variance_estimators(h, t).unbiased;
  out.se_energy = std::sqrt(std::max(0.0, var_e));
  out.se_variance = std::sqrt(std::max(0.0, estimator_variance_formula(h, plug, a, EstimatorKind::unbiased)));
  return out;
}

void to_json(nlohmann::json& j, const ShotAllocation& a) {
  auto dump = [](const std::map<TermPair, uint64_t>& m) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [k, n] : m) arr.push_back({{"i", k.first}, {"j", k.second}, {"n", n}});
    return arr;
  };
  j = {{"singles", a.singles}, {"pairs", dump(a.pairs)}, {"joints", dump(a.joints)}, {"total", a.total()}};
}

void to_json(nlohmann::json& j, const SampleSet& s) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : s.groups) {
    nlohmann::json rle = nlohmann::json::array();
    std::size_t k = 0;
    while (k < g.outcomes.size()) {
      std::size_t r = k;
      while (r < g.outcomes.size() && g.outcomes[r] == g.outcomes[k]) ++r;
      rle.push_back({static_cast<int>(g.outcomes[k]), r - k});
      k = r;
    }
    const char* kind = g.kind == GroupKind::single ? "single" : (g.kind == GroupKind::pair ? "pair" : "joint");
    groups.push_back({{"kind", kind}, {"i", g.i}, {"j", g.j}, {"n", g.outcomes.size()}, {"rle", rle}});
  }
  j = {{"seed", s.seed}, {"groups", groups}};
}

}  // namespace dbqsp
