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

#include <benchmark/benchmark.h>

#include <random>

#include "dbqsp/harness.hpp"
#include "dbqsp/kernels.hpp"

namespace {

using namespace dbqsp;

std::vector<CompiledTerm> compiled(int n) {
  std::mt19937_64 rng(1);
  std::vector<CompiledTerm> out;
  std::uniform_int_distribution<int> l(0, 3);
  for (int t = 0; t < 16; ++t) {
    PauliString p(n);
    for (int q = 0; q < n; ++q) p.set(q, "IXYZ"[l(rng)]);
    out.push_back(compile_term(0.1 * (t + 1), p));
  }
  return out;
}

Eigen::VectorXcd random_vec(Eigen::Index dim) {
  std::mt19937_64 rng(2);
  return StateVector::random(static_cast<int>(std::log2(dim)), rng).amplitudes();
}

void BM_PauliSum(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto terms = compiled(n);
  const auto v = random_vec(Eigen::Index{1} << n);
  Eigen::VectorXcd out;
  for (auto _ : st) {
    apply_pauli_sum(terms, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_PauliSumSerial(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const auto terms = compiled(n);
  const auto v = random_vec(Eigen::Index{1} << n);
  Eigen::VectorXcd out;
  for (auto _ : st) {
    apply_pauli_sum_serial(terms, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_DenseMatvec(benchmark::State& st) {
  const Eigen::Index dim = Eigen::Index{1} << st.range(0);
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(dim, dim);
  const auto v = random_vec(dim);
  Eigen::VectorXcd out;
  for (auto _ : st) {
    dense_matvec(m, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_DenseMatvecSerial(benchmark::State& st) {
  const Eigen::Index dim = Eigen::Index{1} << st.range(0);
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Random(dim, dim);
  const auto v = random_vec(dim);
  Eigen::VectorXcd out;
  for (auto _ : st) {
    dense_matvec_serial(m, v, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_PauliSum)->DenseRange(8, 16, 4);
BENCHMARK(BM_PauliSumSerial)->DenseRange(8, 16, 4);
BENCHMARK(BM_DenseMatvec)->DenseRange(8, 12, 2);
BENCHMARK(BM_DenseMatvecSerial)->DenseRange(8, 12, 2);

BENCHMARK_MAIN();
