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

#include "dbqsp/statevector.hpp"

#include <cmath>

#include "dbqsp/errors.hpp"

namespace dbqsp {

StateVector::StateVector(int n_qubits, Eigen::VectorXcd amplitudes) : n_qubits_(n_qubits) {
  if (n_qubits <= 0 || n_qubits > kMaxMaskQubits) throw DimensionError("invalid qubit count");
  if (amplitudes.size() != (Eigen::Index{1} << n_qubits)) throw DimensionError("amplitude length must be 2^n");
  const double nrm = amplitudes.norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw std::invalid_argument("state has zero or non-finite norm");
  drift_ = std::abs(nrm - 1.0);
  amps_ = amplitudes / nrm;
}

StateVector StateVector::basis(int n_qubits, uint64_t index) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_qubits);
  if (static_cast<Eigen::Index>(index) >= v.size()) throw DimensionError("basis index out of range");
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(n_qubits, v);
}

StateVector StateVector::product(std::string_view spec) {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (char c : spec) {
    Eigen::Vector2cd q;
    switch (c) {
      case '0': q << 1.0, 0.0; break;
      case '1': q << 0.0, 1.0; break;
      case '+': q << r, r; break;
      case '-': q << r, -r; break;
      case 'r': q << r, cplx(0, r); break;
      case 'l': q << r, cplx(0, -r); break;
      default: throw std::invalid_argument(std::string("unknown product-state letter '") + c + "'");
    }
    Eigen::VectorXcd next(v.size() * 2);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      next[2 * i] = v[i] * q[0];
      next[2 * i + 1] = v[i] * q[1];
    }
    v = std::move(next);
  }
  return StateVector(static_cast<int>(spec.size()), v);
}

StateVector StateVector::random(int n_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(Eigen::Index{1} << n_qubits);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = cplx(re, im);
  }
  return StateVector(n_qubits, v);
}

void check_same_dim(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw DimensionError("state dimension mismatch");
}

void check_same_dim(const StateVector& a, const Hamiltonian& h) {
  if (a.dim() != h.dim()) throw DimensionError("state/operator dimension mismatch");
}

EnergyStats energy_stats(const StateVector& state, const Hamiltonian& h) {
  check_same_dim(state, h);
  const Eigen::VectorXcd& psi = state.amplitudes();
  const Eigen::VectorXcd hp = h.apply(psi);
  EnergyStats out;
  out.energy = psi.dot(hp).real();
  out.second_moment = hp.squaredNorm();
  out.variance = (hp - out.energy * psi).squaredNorm();
  return out;
}

StateVector apply_reflection(const StateVector& state, const StateVector& axis, double theta) {
  check_same_dim(state, axis);
  const cplx overlap = axis.amplitudes().dot(state.amplitudes());
  const cplx f = std::polar(1.0, theta) - 1.0;
  return StateVector(state.n_qubits(), state.amplitudes() + (f * overlap) * axis.amplitudes());
}

StateVector apply_evolution(const StateVector& state, const Hamiltonian& h, double t) {
  check_same_dim(state, h);
  return StateVector(state.n_qubits(), h.evolve(state.amplitudes(), t));
}

Eigen::VectorXcd commutator_apply(const Eigen::VectorXcd& v, const Eigen::VectorXcd& psi,
                                  const Eigen::VectorXcd& h_psi) {
  return psi * h_psi.dot(v) - h_psi * psi.dot(v);
}

StateVector apply_commutator_exp(const StateVector& state, const StateVector& psi, const Hamiltonian& h,
                                 double s) {
  check_same_dim(state, psi);
  check_same_dim(state, h);
  const Eigen::VectorXcd& p = psi.amplitudes();
  const Eigen::VectorXcd hp = h.apply(p);
  const double e = p.dot(hp).real();
  const double var = (hp - e * p).squaredNorm();
  double a, b;
  if (var < kCommutatorLimitVariance) {
    a = s;
    b = 0.5 * s * s;
  } else {
    const double sv = std::sqrt(var);
    a = std::sin(s * sv) / sv;
    b = (1.0 - std::cos(s * sv)) / var;
  }
  const Eigen::VectorXcd& v = state.amplitudes();
  const Eigen::VectorXcd w1 = commutator_apply(v, p, hp);
  const Eigen::VectorXcd w2 = commutator_apply(w1, p, hp);
  return StateVector(state.n_qubits(), v + a * w1 + b * w2);
}

double state_distance(const StateVector& a, const StateVector& b, bool phase_aligned) {
  check_same_dim(a, b);
  if (!phase_aligned) return (a.amplitudes() - b.amplitudes()).norm();
  const cplx ov = b.amplitudes().dot(a.amplitudes());
  const double mag = std::abs(ov);
  const cplx ph = mag > 0.0 ? ov / mag : cplx(1.0, 0.0);
  return (a.amplitudes() - ph * b.amplitudes()).norm();
}

void to_json(nlohmann::json& j, const StateVector& s) {
  std::vector<double> re(static_cast<std::size_t>(s.dim())), im(re.size());
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    re[static_cast<std::size_t>(i)] = s[i].real();
    im[static_cast<std::size_t>(i)] = s[i].imag();
  }
  j = {{"n_qubits", s.n_qubits()}, {"re", re}, {"im", im}};
}

void from_json(const nlohmann::json& j, StateVector& s) {
  const int n = j.at("n_qubits").get<int>();
  auto re = j.at("re").get<std::vector<double>>();
  auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != im.size()) throw DimensionError("re/im length mismatch");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) v[static_cast<Eigen::Index>(i)] = cplx(re[i], im[i]);
  s = StateVector(n, v);
}

}  // namespace dbqsp
