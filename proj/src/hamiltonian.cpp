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

#include "dbqsp/hamiltonian.hpp"

#include <cmath>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "dbqsp/errors.hpp"

namespace dbqsp {

struct Hamiltonian::State {
  int n_qubits = 0;
  std::optional<Observable> obs;
  std::vector<CompiledTerm> compiled;

  mutable std::once_flag dense_once;
  mutable Eigen::MatrixXcd dense;
  mutable std::once_flag spectrum_once;
  mutable Spectrum spectrum;
};

Hamiltonian::Hamiltonian(const Observable& obs, int dense_cap) : state_(std::make_shared<State>()) {
  if (obs.n_qubits() > dense_cap) {
    throw ResourceError("dense cap exceeded: " + std::to_string(obs.n_qubits()) + " qubits > " +
                        std::to_string(dense_cap));
  }
  state_->n_qubits = obs.n_qubits();
  state_->obs = obs;
  state_->compiled.reserve(obs.size());
  for (const auto& t : obs.terms()) state_->compiled.push_back(compile_term(t.weight, t.string));
}

Hamiltonian Hamiltonian::from_dense(const Eigen::MatrixXcd& m, int dense_cap) {
  if (m.rows() != m.cols()) throw DimensionError("dense operator must be square");
  int n = 0;
  while ((Eigen::Index{1} << n) < m.rows()) ++n;
  if ((Eigen::Index{1} << n) != m.rows() || n == 0) throw DimensionError("dimension must be a power of two >= 2");
  if (n > dense_cap) throw ResourceError("dense cap exceeded");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("operator is not Hermitian");
  Hamiltonian h;
  h.state_ = std::make_shared<State>();
  h.state_->n_qubits = n;
  Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  std::call_once(h.state_->dense_once, [&] { h.state_->dense = herm; });
  return h;
}

int Hamiltonian::n_qubits() const { return state_ ? state_->n_qubits : 0; }

Eigen::Index Hamiltonian::dim() const { return Eigen::Index{1} << n_qubits(); }

bool Hamiltonian::has_observable() const { return state_ && state_->obs.has_value(); }

const Observable& Hamiltonian::observable() const {
  if (!has_observable()) throw std::logic_error("operator has no Pauli representation");
  return *state_->obs;
}

const Eigen::MatrixXcd& Hamiltonian::dense() const {
  std::call_once(state_->dense_once, [this] { state_->dense = to_dense(*state_->obs); });
  return state_->dense;
}

const Spectrum& Hamiltonian::spectrum() const {
  std::call_once(state_->spectrum_once, [this] {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense());
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    state_->spectrum.values = es.eigenvalues();
    state_->spectrum.vectors = es.eigenvectors();
  });
  return state_->spectrum;
}

double Hamiltonian::spectral_norm() const {
  const auto& v = spectrum().values;
  return std::max(std::abs(v[0]), std::abs(v[v.size() - 1]));
}

Eigen::VectorXcd Hamiltonian::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dim()) throw DimensionError("operator/vector dimension mismatch");
  Eigen::VectorXcd out;
  if (has_observable()) {
    apply_pauli_sum(state_->compiled, v, out);
  } else {
    dense_matvec(dense(), v, out);
  }
  return out;
}

Eigen::VectorXcd Hamiltonian::evolve(const Eigen::VectorXcd& v, double t) const {
  if (v.size() != dim()) throw DimensionError("operator/vector dimension mismatch");
  const Spectrum& sp = spectrum();
  Eigen::VectorXcd c;
  dense_adjoint_matvec(sp.vectors, v, c);
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, t * sp.values[i]);
  Eigen::VectorXcd out;
  dense_matvec(sp.vectors, c, out);
  return out;
}

}  // namespace dbqsp
