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

#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dbqsp/kernels.hpp"
#include "dbqsp/pauli.hpp"

namespace dbqsp {

struct Spectrum {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // columns
};

/**
 * @brief Hermitian operator backed by a Pauli sum or by a dense matrix.
 *
 * Copies share one lazily built dense matrix and eigendecomposition, so the
 * cache is keyed by operator identity. Both are built under std::call_once
 * and are read-only afterwards.
 */
class Hamiltonian {
 public:
  Hamiltonian() = default;
  Hamiltonian(const Observable& obs, int dense_cap = kDenseQubitCap);  // NOLINT implicit
  static Hamiltonian from_dense(const Eigen::MatrixXcd& m, int dense_cap = kDenseQubitCap);

  int n_qubits() const;
  Eigen::Index dim() const;
  bool has_observable() const;
  const Observable& observable() const;

  const Eigen::MatrixXcd& dense() const;
  const Spectrum& spectrum() const;
  double spectral_norm() const;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  // e^{itH} v
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& v, double t) const;

  bool same_instance(const Hamiltonian& other) const { return state_ == other.state_; }

 private:
  struct State;
  std::shared_ptr<State> state_;
};

}  // namespace dbqsp
