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

// Independent dense references for tests. Nothing here calls the library's
// Pauli, evolution or polynomial code.

#pragma once

#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli1(char c) {
  Mat m(2, 2);
  switch (c) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

// Leftmost letter is the most significant factor.
inline Mat pauli(const std::string& letters) {
  Mat m = Mat::Identity(1, 1);
  for (char c : letters) m = kron(m, pauli1(c));
  return m;
}

inline Mat pauli_sum(const std::vector<std::pair<double, std::string>>& terms) {
  const Eigen::Index dim = Eigen::Index{1} << terms.front().second.size();
  Mat h = Mat::Zero(dim, dim);
  for (const auto& [w, p] : terms) h += w * pauli(p);
  return h;
}

// Scaling and squaring with a degree-20 Taylor core.
inline Mat expm(const Mat& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Mat x = a / std::pow(2.0, squarings);
  Mat sum = Mat::Identity(a.rows(), a.cols());
  Mat term = sum;
  for (int k = 1; k <= 20; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

inline Mat projector(const Vec& psi) { return psi * psi.adjoint(); }

// e^{s [Psi, H]} v
inline Vec commutator_exp(const Vec& v, const Vec& psi, const Mat& h, double s) {
  const Mat p = projector(psi);
  return expm(s * (p * h - h * p)) * v;
}

// e^{i theta Psi} v
inline Vec reflect(const Vec& v, const Vec& psi, double theta) {
  return expm(cplx(0, theta) * projector(psi)) * v;
}

// prod (H - z) v, normalized
inline Vec poly_apply(const Vec& v, const Mat& h, const std::vector<cplx>& roots) {
  Vec out = v;
  for (const auto& z : roots) out = h * out - z * out;
  return out.normalized();
}

inline Vec random_state(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(dim);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v.normalized();
}

inline double variance(const Vec& psi, const Mat& h) {
  const cplx e = psi.dot(h * psi);
  const cplx e2 = (h * psi).squaredNorm();
  return e2.real() - e.real() * e.real();
}

}  // namespace oracle
