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

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace dbqsp {

using cplx = std::complex<double>;

inline constexpr int kDenseQubitCap = 12;
inline constexpr int kMaxMaskQubits = 63;

/**
 * @brief Tensor product of single-qubit Paulis. Qubit 0 is the leftmost
 * letter and the most significant bit of a basis index.
 */
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(int n_qubits);
  explicit PauliString(std::string_view letters);

  int n_qubits() const { return static_cast<int>(letters_.size()); }
  char operator[](int q) const { return letters_[q]; }
  void set(int q, char letter);
  const std::string& str() const { return letters_; }

  bool is_identity() const;
  bool commutes_with(const PauliString& other) const;
  int y_count() const;
  int weight() const;

  // Bit (n-1-q) is set when qubit q carries X/Y (x mask) or Z/Y (z mask).
  uint64_t x_mask() const;
  uint64_t z_mask() const;

  auto operator<=>(const PauliString&) const = default;

 private:
  std::string letters_;
};

struct PauliProduct {
  cplx phase;
  PauliString product;
};

// a * b = phase * product
PauliProduct pauli_mul(const PauliString& a, const PauliString& b);

struct PauliTerm {
  double weight;
  PauliString string;
};

/**
 * @brief Real-weighted Pauli sum. Terms are kept sorted by letters,
 * duplicates merged, zero weights dropped.
 */
class Observable {
 public:
  Observable() = default;
  explicit Observable(int n_qubits);
  Observable(int n_qubits, std::vector<PauliTerm> terms);

  int n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  Observable scaled(double factor) const;

 private:
  int n_qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

double one_norm(const Observable& h);

Eigen::MatrixXcd pauli_dense(const PauliString& p, int cap = kDenseQubitCap);
Eigen::MatrixXcd to_dense(const Observable& h, int cap = kDenseQubitCap);

struct CrossTerm {
  double weight;  // w_i w_j, doubled when (i,j) and (j,i) are merged
  PauliString string;
  double phase;  // P_i P_j = phase * string, phase in {+1, -1}
  int i;
  int j;
};

struct SquareExpansion {
  double identity_weight;
  std::vector<CrossTerm> cross_terms;
};

// H^2 = identity_weight * I + sum weight * phase * string over commuting i<j.
SquareExpansion square_expansion(const Observable& h);

void to_json(nlohmann::json& j, const PauliString& p);
void from_json(const nlohmann::json& j, PauliString& p);
void to_json(nlohmann::json& j, const Observable& h);
void from_json(const nlohmann::json& j, Observable& h);

}  // namespace dbqsp
