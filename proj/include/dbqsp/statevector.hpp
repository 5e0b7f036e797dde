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

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>
#include <json.hpp>

#include "dbqsp/hamiltonian.hpp"

namespace dbqsp {

/**
 * @brief Unit-norm amplitude vector, qubit 0 = most significant bit.
 *
 * The constructor renormalizes and keeps the pre-normalization drift.
 */
class StateVector {
 public:
  StateVector() = default;
  StateVector(int n_qubits, Eigen::VectorXcd amplitudes);

  static StateVector basis(int n_qubits, uint64_t index);
  // One character per qubit from {0, 1, +, -, r, l} (r/l = Y eigenstates).
  static StateVector product(std::string_view spec);
  static StateVector random(int n_qubits, std::mt19937_64& rng);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  cplx operator[](Eigen::Index i) const { return amps_[i]; }
  double norm_drift() const { return drift_; }

 private:
  int n_qubits_ = 0;
  Eigen::VectorXcd amps_;
  double drift_ = 0.0;
};

struct EnergyStats {
  double energy = 0.0;
  double variance = 0.0;
  double second_moment = 0.0;  // <H^2>
};

EnergyStats energy_stats(const StateVector& state, const Hamiltonian& h);

// state + (e^{i theta} - 1) <axis|state> axis
StateVector apply_reflection(const StateVector& state, const StateVector& axis, double theta);

// e^{itH} state
StateVector apply_evolution(const StateVector& state, const Hamiltonian& h, double t);

inline constexpr double kCommutatorLimitVariance = 1e-14;

// e^{s[Psi,H]} state with Psi = |psi><psi|, via the three-term closed form.
StateVector apply_commutator_exp(const StateVector& state, const StateVector& psi,
                                 const Hamiltonian& h, double s);

// [Psi,H] v = psi <Hpsi|v> - Hpsi <psi|v>
Eigen::VectorXcd commutator_apply(const Eigen::VectorXcd& v, const Eigen::VectorXcd& psi,
                                  const Eigen::VectorXcd& h_psi);

double state_distance(const StateVector& a, const StateVector& b, bool phase_aligned = false);

void to_json(nlohmann::json& j, const StateVector& s);
void from_json(const nlohmann::json& j, StateVector& s);

void check_same_dim(const StateVector& a, const StateVector& b);
void check_same_dim(const StateVector& a, const Hamiltonian& h);

}  // namespace dbqsp
