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

// Statevector kernels. Each parallel kernel has a serial twin used as the
// reference in tests and benchmarks.

#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dbqsp {

class PauliString;

struct CompiledTerm {
  std::complex<double> coeff;  // weight * i^{#Y}
  uint64_t x_mask;
  uint64_t z_mask;
};

CompiledTerm compile_term(double weight, const PauliString& p);

inline double parity_sign(uint64_t bits) { return (std::popcount(bits) & 1) ? -1.0 : 1.0; }

// Below this dimension kernels stay single-threaded.
inline constexpr Eigen::Index kParallelMinDim = 1 << 10;

// out = sum_t coeff_t P_t in (gather form, parallel over output index).
void apply_pauli_sum(const std::vector<CompiledTerm>& terms, const Eigen::VectorXcd& in,
                     Eigen::VectorXcd& out);
// Scatter form, serial.
void apply_pauli_sum_serial(const std::vector<CompiledTerm>& terms, const Eigen::VectorXcd& in,
                            Eigen::VectorXcd& out);

// <psi| P |psi> for a single compiled term with unit weight.
double pauli_expectation(const CompiledTerm& term, const Eigen::VectorXcd& psi);
double pauli_expectation_serial(const CompiledTerm& term, const Eigen::VectorXcd& psi);

// out = M v, and out = M^dagger v.
void dense_matvec(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v, Eigen::VectorXcd& out);
void dense_matvec_serial(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v, Eigen::VectorXcd& out);
void dense_adjoint_matvec(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v, Eigen::VectorXcd& out);
void dense_adjoint_matvec_serial(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v,
                                 Eigen::VectorXcd& out);

int max_threads();
void set_threads(int n);

}  // namespace dbqsp
