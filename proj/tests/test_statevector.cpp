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

#include <numbers>
#include <random>

#include "dbqsp/errors.hpp"
#include "dbqsp/hamiltonian.hpp"
#include "dbqsp/kernels.hpp"
#include "dbqsp/statevector.hpp"
#include "oracles.hpp"

using namespace dbqsp;
using std::numbers::pi;

namespace {

const Hamiltonian kZ(Observable(1, {{1.0, PauliString("Z")}}));
const Hamiltonian kX(Observable(1, {{1.0, PauliString("X")}}));

Eigen::VectorXcd vec2(cplx a, cplx b) {
  Eigen::VectorXcd v(2);
  v << a, b;
  return v;
}

Observable random_obs(int n, std::mt19937_64& rng, std::vector<std::pair<double, std::string>>& ref) {
  std::uniform_int_distribution<int> l(0, 3), nt(1, 6);
  std::uniform_real_distribution<double> w(-1, 1);
  std::vector<PauliTerm> terms;
  ref.clear();
  const int k = nt(rng);
  for (int i = 0; i < k; ++i) {
    std::string s;
    for (int q = 0; q < n; ++q) s += "IXYZ"[l(rng)];
    const double wt = w(rng);
    terms.push_back({wt, PauliString(s)});
    ref.push_back({wt, s});
  }
  return Observable(n, terms);
}

}  // namespace

TEST(StateVector, ProductAndNormalization) {
  const auto plus = StateVector::product("+");
  EXPECT_NEAR(std::abs(plus[0] - 1 / std::sqrt(2.0)), 0.0, 1e-15);
  const StateVector s(1, vec2(3.0, 4.0));
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_NEAR(s.norm_drift(), 4.0, 1e-12);
  EXPECT_THROW(StateVector(1, Eigen::VectorXcd::Zero(2)), std::invalid_argument);
  EXPECT_THROW(StateVector(2, vec2(1, 0)), DimensionError);
  // qubit 0 is the most significant bit
  EXPECT_NEAR(std::abs(StateVector::product("01")[1] - 1.0), 0.0, 1e-15);
}

TEST(EnergyStats, Examples) {
  auto a = energy_stats(StateVector::basis(1, 0), kZ);
  EXPECT_NEAR(a.energy, 1.0, 1e-15);
  EXPECT_NEAR(a.variance, 0.0, 1e-15);
  auto b = energy_stats(StateVector::product("+"), kZ);
  EXPECT_NEAR(b.energy, 0.0, 1e-15);
  EXPECT_NEAR(b.variance, 1.0, 1e-15);
  const Hamiltonian zx(Observable(1, {{1, PauliString("Z")}, {1, PauliString("X")}}));
  auto c = energy_stats(StateVector::basis(1, 0), zx);
  EXPECT_NEAR(c.energy, 1.0, 1e-15);
  EXPECT_NEAR(c.variance, 1.0, 1e-15);
  EXPECT_NEAR(c.second_moment, 2.0, 1e-15);
}

TEST(Reflection, Examples) {
  const auto plus = StateVector::product("+");
  EXPECT_LT(state_distance(apply_reflection(plus, StateVector::basis(1, 0), 0.0), plus), 1e-15);
  const auto r = apply_reflection(plus, StateVector::basis(1, 0), pi);
  EXPECT_LT((r.amplitudes() - vec2(-1, 1) / std::sqrt(2.0)).norm(), 1e-15);
  const auto one = StateVector::basis(1, 1);
  EXPECT_LT(state_distance(apply_reflection(one, StateVector::basis(1, 0), 1.234), one), 1e-15);
}

TEST(Reflection, MatchesDenseExponential) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 4;
    const auto s = StateVector::random(n, rng), ax = StateVector::random(n, rng);
    const double th = 2 * pi * (t + 0.5) / 20;
    const auto got = apply_reflection(s, ax, th);
    EXPECT_LT((got.amplitudes() - oracle::reflect(s.amplitudes(), ax.amplitudes(), th)).norm(), 1e-12);
  }
}

TEST(Evolution, Examples) {
  const double t = 0.7;
  const auto a = apply_evolution(StateVector::basis(1, 0), kZ, t);
  EXPECT_LT((a.amplitudes() - vec2(std::exp(cplx(0, t)), 0)).norm(), 1e-14);
  const auto b = apply_evolution(StateVector::basis(1, 0), kX, pi / 2);
  EXPECT_LT((b.amplitudes() - vec2(0, cplx(0, 1))).norm(), 1e-14);
  std::mt19937_64 rng(4);
  const auto s = StateVector::random(3, rng);
  std::vector<std::pair<double, std::string>> ref;
  const Hamiltonian h(random_obs(3, rng, ref));
  EXPECT_LT(state_distance(apply_evolution(apply_evolution(s, h, 1.3), h, -1.3), s), 1e-12);
}

TEST(Evolution, MatchesDenseExponential) {
  std::mt19937_64 rng(8);
  std::vector<std::pair<double, std::string>> ref;
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + t % 4;
    const Hamiltonian h(random_obs(n, rng, ref));
    const auto s = StateVector::random(n, rng);
    const Eigen::VectorXcd want = oracle::expm(cplx(0, 0.9) * oracle::pauli_sum(ref)) * s.amplitudes();
    EXPECT_LT((apply_evolution(s, h, 0.9).amplitudes() - want).norm(), 1e-11);
  }
}

TEST(CommutatorExp, Examples) {
  const auto plus = StateVector::product("+"), minus = StateVector::product("-");
  EXPECT_LT((apply_commutator_exp(plus, plus, kZ, -pi / 2).amplitudes() - minus.amplitudes()).norm(), 1e-14);
  EXPECT_LT((apply_commutator_exp(minus, plus, kZ, -pi / 2).amplitudes() + plus.amplitudes()).norm(), 1e-14);
  std::mt19937_64 rng(1);
  const auto s = StateVector::random(1, rng);
  EXPECT_LT(state_distance(apply_commutator_exp(s, plus, kZ, 0.0), s), 1e-15);
}

// Property: the three-term closed form equals the dense exponential on arbitrary vectors.
TEST(CommutatorExp, MatchesDenseExponential) {
  std::mt19937_64 rng(21);
  std::vector<std::pair<double, std::string>> ref;
  for (int t = 0; t < 40; ++t) {
    const int n = 1 + t % 5;
    const Hamiltonian h(random_obs(n, rng, ref));
    const auto psi = StateVector::random(n, rng), v = StateVector::random(n, rng);
    const double s = -1.5 + 3.0 * (t + 0.5) / 40;
    const Eigen::VectorXcd want = oracle::commutator_exp(v.amplitudes(), psi.amplitudes(), oracle::pauli_sum(ref), s);
    EXPECT_LT((apply_commutator_exp(v, psi, h, s).amplitudes() - want).norm(), 1e-11) << t;
  }
}

TEST(StateDistance, Examples) {
  const auto a = StateVector::product("+");
  EXPECT_EQ(state_distance(a, a), 0.0);
  EXPECT_NEAR(state_distance(StateVector::basis(1, 0), StateVector::basis(1, 1)), std::sqrt(2.0), 1e-15);
  const StateVector b(1, std::exp(cplx(0, pi / 3)) * a.amplitudes());
  EXPECT_NEAR(state_distance(a, b, true), 0.0, 1e-15);
  EXPECT_GT(state_distance(a, b), 0.5);
  EXPECT_THROW(state_distance(a, StateVector::basis(2, 0)), DimensionError);
}

TEST(Hamiltonian, ApplyMatchesDenseAndCopiesShareCache) {
  std::mt19937_64 rng(2);
  std::vector<std::pair<double, std::string>> ref;
  for (int n = 1; n <= 6; ++n) {
    const Hamiltonian h(random_obs(n, rng, ref));
    const auto v = oracle::random_state(Eigen::Index{1} << n, rng);
    EXPECT_LT((h.apply(v) - oracle::pauli_sum(ref) * v).norm(), 1e-12);
    const Hamiltonian copy = h;
    EXPECT_TRUE(copy.same_instance(h));
    EXPECT_EQ(&copy.spectrum(), &h.spectrum());
  }
  EXPECT_THROW(Hamiltonian(Observable(13, {{1.0, PauliString(13)}})), ResourceError);
}

TEST(Hamiltonian, FromDense) {
  Eigen::MatrixXcd m = oracle::pauli_sum({{0.3, "XZ"}, {-0.2, "YY"}});
  const auto h = Hamiltonian::from_dense(m);
  EXPECT_FALSE(h.has_observable());
  EXPECT_EQ(h.n_qubits(), 2);
  Eigen::MatrixXcd bad = m;
  bad(0, 1) += 0.1;
  EXPECT_THROW(Hamiltonian::from_dense(bad), std::invalid_argument);
  EXPECT_THROW(Hamiltonian::from_dense(Eigen::MatrixXcd::Identity(3, 3)), DimensionError);
}

TEST(Kernels, ParallelMatchesSerial) {
  std::mt19937_64 rng(17);
  std::vector<std::pair<double, std::string>> ref;
  for (int n : {3, 11, 12}) {
    const Observable obs = random_obs(n, rng, ref);
    std::vector<CompiledTerm> ct;
    for (const auto& t : obs.terms()) ct.push_back(compile_term(t.weight, t.string));
    const auto v = oracle::random_state(Eigen::Index{1} << n, rng);
    Eigen::VectorXcd a, b;
    apply_pauli_sum(ct, v, a);
    apply_pauli_sum_serial(ct, v, b);
    EXPECT_LT((a - b).norm(), 1e-12);
    for (const auto& t : obs.terms()) {
      const auto c = compile_term(1.0, t.string);
      EXPECT_NEAR(pauli_expectation(c, v), pauli_expectation_serial(c, v), 1e-12);
    }
  }
  const Eigen::Index dim = 1 << 10;
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(dim, dim);
  const auto v = oracle::random_state(dim, rng);
  Eigen::VectorXcd a, b;
  dense_matvec(m, v, a);
  dense_matvec_serial(m, v, b);
  EXPECT_LT((a - m * v).norm(), 1e-9);
  EXPECT_LT((a - b).norm(), 1e-9);
  dense_adjoint_matvec(m, v, a);
  dense_adjoint_matvec_serial(m, v, b);
  EXPECT_LT((a - m.adjoint() * v).norm(), 1e-9);
  EXPECT_LT((a - b).norm(), 1e-9);
}

TEST(StateVectorJson, RoundTrip) {
  std::mt19937_64 rng(6);
  const auto s = StateVector::random(3, rng);
  const nlohmann::json j = s;
  EXPECT_LT(state_distance(j.get<StateVector>(), s), 1e-15);
}
