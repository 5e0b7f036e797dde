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

#include "dbqsp/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "dbqsp/errors.hpp"
#include "dbqsp/pauli.hpp"

namespace dbqsp {

CompiledTerm compile_term(double weight, const PauliString& p) {
  static const std::complex<double> kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return {weight * kPowers[p.y_count() % 4], p.x_mask(), p.z_mask()};
}

void apply_pauli_sum(const std::vector<CompiledTerm>& terms, const Eigen::VectorXcd& in,
                     Eigen::VectorXcd& out) {
  const Eigen::Index dim = in.size();
  out.resize(dim);
  const auto nt = static_cast<std::ptrdiff_t>(terms.size());
  const CompiledTerm* tp = terms.data();
  const std::complex<double>* src = in.data();
  std::complex<double>* dst = out.data();
#pragma omp parallel for schedule(static) if (dim >= kParallelMinDim)
  for (Eigen::Index c = 0; c < dim; ++c) {
    std::complex<double> acc = 0.0;
    const uint64_t uc = static_cast<uint64_t>(c);
    for (std::ptrdiff_t t = 0; t < nt; ++t) {
      const uint64_t b = uc ^ tp[t].x_mask;
      acc += tp[t].coeff * parity_sign(b & tp[t].z_mask) * src[b];
    }
    dst[c] = acc;
  }
}

void apply_pauli_sum_serial(const std::vector<CompiledTerm>& terms, const Eigen::VectorXcd& in,
                            Eigen::VectorXcd& out) {
  const Eigen::Index dim = in.size();
  out = Eigen::VectorXcd::Zero(dim);
  for (const auto& t : terms) {
    for (Eigen::Index b = 0; b < dim; ++b) {
      const uint64_t ub = static_cast<uint64_t>(b);
      out[static_cast<Eigen::Index>(ub ^ t.x_mask)] += t.coeff * parity_sign(ub & t.z_mask) * in[b];
    }
  }
}

double pauli_expectation(const CompiledTerm& term, const Eigen::VectorXcd& psi) {
  const Eigen::Index dim = psi.size();
  double re = 0.0;
  const std::complex<double>* p = psi.data();
#pragma omp parallel for reduction(+ : re) schedule(static) if (dim >= kParallelMinDim)
  for (Eigen::Index b = 0; b < dim; ++b) {
    const uint64_t ub = static_cast<uint64_t>(b);
    re += (std::conj(p[ub ^ term.x_mask]) * term.coeff * p[b]).real() * parity_sign(ub & term.z_mask);
  }
  return re;
}

double pauli_expectation_serial(const CompiledTerm& term, const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd out;
  apply_pauli_sum_serial({term}, psi, out);
  return psi.dot(out).real();
}

void dense_matvec(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
  if (m.cols() != v.size()) throw DimensionError("dense_matvec: size mismatch");
  const Eigen::Index rows = m.rows();
  out.resize(rows);
  constexpr Eigen::Index kBlock = 64;
  const Eigen::Index nblocks = (rows + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(static) if (rows >= kParallelMinDim)
  for (Eigen::Index blk = 0; blk < nblocks; ++blk) {
    const Eigen::Index r0 = blk * kBlock;
    const Eigen::Index len = std::min(kBlock, rows - r0);
    out.segment(r0, len).noalias() = m.middleRows(r0, len) * v;
  }
}

void dense_matvec_serial(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
  if (m.cols() != v.size()) throw DimensionError("dense_matvec: size mismatch");
  out.noalias() = m * v;
}

void dense_adjoint_matvec(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v, Eigen::VectorXcd& out) {
  if (m.rows() != v.size()) throw DimensionError("dense_adjoint_matvec: size mismatch");
  const Eigen::Index cols = m.cols();
  out.resize(cols);
#pragma omp parallel for schedule(static) if (cols >= kParallelMinDim)
  for (Eigen::Index c = 0; c < cols; ++c) {
    out[c] = m.col(c).dot(v);
  }
}

void dense_adjoint_matvec_serial(const Eigen::MatrixXcd& m, const Eigen::VectorXcd& v,
                                 Eigen::VectorXcd& out) {
  if (m.rows() != v.size()) throw DimensionError("dense_adjoint_matvec: size mismatch");
  out.noalias() = m.adjoint() * v;
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace dbqsp
