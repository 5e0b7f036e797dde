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

#include "dbqsp/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dbqsp/errors.hpp"
#include "dbqsp/kernels.hpp"

namespace dbqsp {

namespace {

bool valid_letter(char c) { return c == 'I' || c == 'X' || c == 'Y' || c == 'Z'; }

// Single-qubit product table: a*b = i^k * c.
void mul_letters(char a, char b, int* k, char* c) {
  if (a == 'I') { *k = 0; *c = b; return; }
  if (b == 'I') { *k = 0; *c = a; return; }
  if (a == b) { *k = 0; *c = 'I'; return; }
  // cyclic X->Y->Z gives +i
  auto idx = [](char l) { return l == 'X' ? 0 : (l == 'Y' ? 1 : 2); };
  int ia = idx(a), ib = idx(b);
  int ic = 3 - ia - ib;
  *c = "XYZ"[ic];
  *k = ((ib - ia + 3) % 3 == 1) ? 1 : 3;
}

}  // namespace

PauliString::PauliString(int n_qubits) {
  if (n_qubits < 0) throw DimensionError("negative qubit count");
  letters_.assign(static_cast<std::size_t>(n_qubits), 'I');
}

PauliString::PauliString(std::string_view letters) : letters_(letters) {
  for (char c : letters_) {
    if (!valid_letter(c)) throw std::invalid_argument("invalid Pauli letter in '" + letters_ + "'");
  }
}

void PauliString::set(int q, char letter) {
  if (!valid_letter(letter)) throw std::invalid_argument("invalid Pauli letter");
  letters_.at(static_cast<std::size_t>(q)) = letter;
}

bool PauliString::is_identity() const {
  return std::all_of(letters_.begin(), letters_.end(), [](char c) { return c == 'I'; });
}

bool PauliString::commutes_with(const PauliString& other) const {
  if (other.n_qubits() != n_qubits()) throw DimensionError("qubit count mismatch");
  int anti = 0;
  for (int q = 0; q < n_qubits(); ++q) {
    char a = letters_[q], b = other.letters_[q];
    if (a != 'I' && b != 'I' && a != b) ++anti;
  }
  return anti % 2 == 0;
}

int PauliString::y_count() const {
  return static_cast<int>(std::count(letters_.begin(), letters_.end(), 'Y'));
}

int PauliString::weight() const {
  return static_cast<int>(letters_.size()) -
         static_cast<int>(std::count(letters_.begin(), letters_.end(), 'I'));
}

uint64_t PauliString::x_mask() const {
  if (n_qubits() > kMaxMaskQubits) throw ResourceError("too many qubits for bit masks");
  uint64_t m = 0;
  const int n = n_qubits();
  for (int q = 0; q < n; ++q) {
    if (letters_[q] == 'X' || letters_[q] == 'Y') m |= uint64_t{1} << (n - 1 - q);
  }
  return m;
}

uint64_t PauliString::z_mask() const {
  if (n_qubits() > kMaxMaskQubits) throw ResourceError("too many qubits for bit masks");
  uint64_t m = 0;
  const int n = n_qubits();
  for (int q = 0; q < n; ++q) {
    if (letters_[q] == 'Z' || letters_[q] == 'Y') m |= uint64_t{1} << (n - 1 - q);
  }
  return m;
}

PauliProduct pauli_mul(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("pauli_mul: qubit count mismatch");
  PauliString out(a.n_qubits());
  int k_total = 0;
  for (int q = 0; q < a.n_qubits(); ++q) {
    int k;
    char c;
    mul_letters(a[q], b[q], &k, &c);
    k_total += k;
    out.set(q, c);
  }
  static const cplx kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {kPowers[k_total % 4], out};
}

Observable::Observable(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits <= 0) throw DimensionError("observable needs at least one qubit");
}

Observable::Observable(int n_qubits, std::vector<PauliTerm> terms) : n_qubits_(n_qubits) {
  if (n_qubits <= 0) throw DimensionError("observable needs at least one qubit");
  std::map<PauliString, double> merged;
  for (auto& t : terms) {
    if (t.string.n_qubits() != n_qubits) throw DimensionError("term qubit count mismatch");
    if (!std::isfinite(t.weight)) throw std::invalid_argument("non-finite weight");
    merged[t.string] += t.weight;
  }
  terms_.reserve(merged.size());
  for (auto& [p, w] : merged) {
    if (w != 0.0) terms_.push_back({w, p});
  }
}

Observable Observable::scaled(double factor) const {
  std::vector<PauliTerm> t = terms_;
  for (auto& x : t) x.weight *= factor;
  return Observable(n_qubits_, std::move(t));
}

double one_norm(const Observable& h) {
  double s = 0.0;
  for (const auto& t : h.terms()) s += std::abs(t.weight);
  return s;
}

Eigen::MatrixXcd pauli_dense(const PauliString& p, int cap) {
  if (p.n_qubits() > cap) throw ResourceError("dense cap exceeded");
  const Eigen::Index dim = Eigen::Index{1} << p.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const CompiledTerm ct = compile_term(1.0, p);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const uint64_t ub = static_cast<uint64_t>(b);
    m(static_cast<Eigen::Index>(ub ^ ct.x_mask), b) = ct.coeff * parity_sign(ub & ct.z_mask);
  }
  return m;
}

Eigen::MatrixXcd to_dense(const Observable& h, int cap) {
  if (h.n_qubits() > cap) throw ResourceError("dense cap exceeded: " + std::to_string(h.n_qubits()) + " qubits");
  const Eigen::Index dim = Eigen::Index{1} << h.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    const CompiledTerm ct = compile_term(t.weight, t.string);
    for (Eigen::Index b = 0; b < dim; ++b) {
      const uint64_t ub = static_cast<uint64_t>(b);
      m(static_cast<Eigen::Index>(ub ^ ct.x_mask), b) += ct.coeff * parity_sign(ub & ct.z_mask);
    }
  }
  return m;
}

SquareExpansion square_expansion(const Observable& h) {
  SquareExpansion out{0.0, {}};
  const auto& terms = h.terms();
  for (const auto& t : terms) out.identity_weight += t.weight * t.weight;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (!terms[i].string.commutes_with(terms[j].string)) continue;
      auto prod = pauli_mul(terms[i].string, terms[j].string);
      out.cross_terms.push_back({2.0 * terms[i].weight * terms[j].weight, prod.product,
                                 prod.phase.real(), static_cast<int>(i), static_cast<int>(j)});
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const PauliString& p) { j = p.str(); }

void from_json(const nlohmann::json& j, PauliString& p) { p = PauliString(j.get<std::string>()); }

void to_json(nlohmann::json& j, const Observable& h) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : h.terms()) terms.push_back({{"w", t.weight}, {"p", t.string.str()}});
  j = {{"n_qubits", h.n_qubits()}, {"terms", terms}};
}

void from_json(const nlohmann::json& j, Observable& h) {
  const int n = j.at("n_qubits").get<int>();
  std::vector<PauliTerm> terms;
  for (const auto& t : j.at("terms")) {
    terms.push_back({t.at("w").get<double>(), PauliString(t.at("p").get<std::string>())});
  }
  h = Observable(n, std::move(terms));
}

}  // namespace dbqsp
