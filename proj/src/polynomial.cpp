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

#include "dbqsp/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "dbqsp/errors.hpp"
#include "dbqsp/kernels.hpp"

namespace dbqsp {

namespace {

using MatrixXcl = Eigen::Matrix<cplxl, Eigen::Dynamic, Eigen::Dynamic>;

long double l1(const cplxl& z) { return std::fabs(z.real()) + std::fabs(z.imag()); }

// Parlett-Reinsch diagonal similarity scaling.
void balance(MatrixXcl& a) {
  const Eigen::Index n = a.rows();
  const long double radix = 2.0L;
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      long double c = 0, r = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += l1(a(j, i));
        r += l1(a(i, j));
      }
      if (c == 0 || r == 0) continue;
      long double g = r / radix, f = 1, s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95L * s) {
        converged = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

cplxl horner(const std::vector<cplxl>& c, cplxl x, cplxl* deriv) {
  cplxl p = 0, dp = 0;
  for (std::size_t m = c.size(); m-- > 0;) {
    dp = dp * x + p;
    p = p * x + c[m];
  }
  if (deriv) *deriv = dp;
  return p;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::explicit_roots: return "explicit";
    case Provenance::from_coeffs: return "from_coeffs";
    case Provenance::chebyshev: return "chebyshev";
    case Provenance::inverse_approx: return "inverse_approx";
    case Provenance::sign_approx: return "sign_approx";
    case Provenance::jacobi_anger: return "jacobi_anger";
  }
  return "explicit";
}

Provenance provenance_from_string(const std::string& s) {
  for (auto p : {Provenance::explicit_roots, Provenance::from_coeffs, Provenance::chebyshev,
                 Provenance::inverse_approx, Provenance::sign_approx, Provenance::jacobi_anger}) {
    if (to_string(p) == s) return p;
  }
  throw std::invalid_argument("unknown provenance '" + s + "'");
}

std::string to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::mixed: return "mixed";
  }
  return "mixed";
}

cplx PolynomialSpec::evaluate(cplx x) const {
  cplx v = leading;
  for (const auto& z : roots) v *= (x - z);
  return v;
}

double ChebSeries::evaluate(double x) const {
  const double y = x / scale;
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) {
    const double b0 = coeffs[k] + 2.0 * y * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  const double c0 = coeffs.empty() ? 0.0 : coeffs[0];
  return c0 + y * b1 - b2;
}

std::size_t ChebSeries::degree() const {
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    if (coeffs[k] != 0.0) return k;
  }
  return 0;
}

Parity detect_parity(const std::vector<double>& coeffs) {
  bool has_even = false, has_odd = false;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    (k % 2 == 0 ? has_even : has_odd) = true;
  }
  if (has_even && has_odd) return Parity::mixed;
  if (has_odd) return Parity::odd;
  return Parity::even;
}

PolynomialSpec roots_from_coeffs(const std::vector<cplx>& coeffs, double real_snap_tol) {
  std::vector<cplxl> c(coeffs.begin(), coeffs.end());
  return roots_from_coeffs(c, real_snap_tol);
}

PolynomialSpec roots_from_coeffs(const std::vector<cplxl>& coeffs, double real_snap_tol) {
  if (coeffs.empty() || coeffs.back() == cplxl(0)) throw std::invalid_argument("zero leading coefficient");
  PolynomialSpec out;
  out.provenance = Provenance::from_coeffs;
  const cplxl lead = coeffs.back();
  out.leading = cplx(static_cast<double>(lead.real()), static_cast<double>(lead.imag()));
  const Eigen::Index k = static_cast<Eigen::Index>(coeffs.size()) - 1;
  if (k == 0) return out;

  MatrixXcl comp = MatrixXcl::Zero(k, k);
  for (Eigen::Index i = 1; i < k; ++i) comp(i, i - 1) = 1;
  for (Eigen::Index i = 0; i < k; ++i) comp(i, k - 1) = -coeffs[static_cast<std::size_t>(i)] / lead;
  balance(comp);
  Eigen::ComplexEigenSolver<MatrixXcl> es(comp, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("companion eigensolver failed");

  std::vector<cplxl> roots(es.eigenvalues().data(), es.eigenvalues().data() + k);
  for (auto& z : roots) {
    for (int it = 0; it < 4; ++it) {
      cplxl d;
      const cplxl p = horner(coeffs, z, &d);
      if (d == cplxl(0)) break;
      const cplxl next = z - p / d;
      cplxl dn;
      if (std::abs(horner(coeffs, next, &dn)) < std::abs(p)) {
        z = next;
      } else {
        break;
      }
    }
  }
  std::sort(roots.begin(), roots.end(), [](const cplxl& a, const cplxl& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (const auto& z : roots) {
    double re = static_cast<double>(z.real());
    double im = static_cast<double>(z.imag());
    if (std::abs(im) < real_snap_tol) im = 0.0;
    out.roots.emplace_back(re, im);
  }
  return out;
}

std::vector<cplxl> expand_roots(const PolynomialSpec& p) {
  std::vector<cplxl> c{cplxl(p.leading.real(), p.leading.imag())};
  for (const auto& z : p.roots) {
    const cplxl zl(z.real(), z.imag());
    std::vector<cplxl> next(c.size() + 1, cplxl(0));
    for (std::size_t m = 0; m < c.size(); ++m) {
      next[m + 1] += c[m];
      next[m] -= zl * c[m];
    }
    c = std::move(next);
  }
  return c;
}

double reconstruction_error(const PolynomialSpec& p, const std::vector<cplxl>& coeffs) {
  const auto e = expand_roots(p);
  if (e.size() != coeffs.size()) return INFINITY;
  long double scale = 0, err = 0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    scale = std::max(scale, std::abs(coeffs[m]));
    err = std::max(err, std::abs(e[m] - coeffs[m]));
  }
  return static_cast<double>(err / scale);
}

std::vector<long double> cheb_to_monomial(const ChebSeries& s) {
  const std::size_t d = s.degree();
  std::vector<long double> out(d + 1, 0.0L);
  std::vector<long double> tprev{1.0L}, tcur{0.0L, 1.0L};
  const long double inv = 1.0L / static_cast<long double>(s.scale);
  if (!s.coeffs.empty()) out[0] += s.coeffs[0];
  for (std::size_t m = 1; m <= d; ++m) {
    if (m > 1) {
      std::vector<long double> tnext(m + 1, 0.0L);
      for (std::size_t i = 0; i < tcur.size(); ++i) tnext[i + 1] += 2.0L * tcur[i];
      for (std::size_t i = 0; i < tprev.size(); ++i) tnext[i] -= tprev[i];
      tprev = std::move(tcur);
      tcur = std::move(tnext);
    }
    const long double c = s.coeffs[m];
    if (c == 0.0L) continue;
    for (std::size_t i = 0; i < tcur.size(); ++i) out[i] += c * tcur[i];
  }
  long double f = 1.0L;
  for (std::size_t i = 0; i <= d; ++i) {
    out[i] *= f;
    f *= inv;
  }
  return out;
}

PolynomialSpec cheb_to_roots(const ChebSeries& s, Provenance tag) {
  if (s.degree() > kRootDegreeCap) {
    throw ResourceError("Chebyshev-to-roots conversion is capped at degree " + std::to_string(kRootDegreeCap));
  }
  const auto mono = cheb_to_monomial(s);
  std::vector<cplxl> c(mono.begin(), mono.end());
  PolynomialSpec p = roots_from_coeffs(c);
  p.provenance = tag;
  return p;
}

StateVector apply_poly_oracle(const StateVector& state, const Hamiltonian& h, const PolynomialSpec& p) {
  check_same_dim(state, h);
  Eigen::VectorXcd v = state.amplitudes();
  for (std::size_t k = 0; k < p.roots.size(); ++k) {
    Eigen::VectorXcd w = h.apply(v) - p.roots[k] * v;
    const double nrm = w.norm();
    if (!(nrm > kOracleBreakdownNorm)) {
      throw OracleBreakdown("p(H)|state> annihilated at factor " + std::to_string(k));
    }
    v = w / nrm;
  }
  return StateVector(state.n_qubits(), v);
}

Eigen::VectorXcd apply_cheb_dense(const Eigen::VectorXcd& v, const Hamiltonian& h, const ChebSeries& s) {
  const std::size_t d = s.degree();
  const double inv = 1.0 / s.scale;
  Eigen::VectorXcd b1 = Eigen::VectorXcd::Zero(v.size()), b2 = b1;
  for (std::size_t k = d; k >= 1; --k) {
    Eigen::VectorXcd b0 = s.coeffs[k] * v + 2.0 * inv * h.apply(b1) - b2;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  const double c0 = s.coeffs.empty() ? 0.0 : s.coeffs[0];
  return c0 * v + inv * h.apply(b1) - b2;
}

PolynomialSpec ite_linear_filter(double tau, [[maybe_unused]] const Hamiltonian& h) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  PolynomialSpec p;
  p.leading = cplx(-tau, 0.0);
  p.roots = {cplx(1.0 / tau, 0.0)};
  p.provenance = Provenance::explicit_roots;
  return p;
}

Dilation hermitian_dilation(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionError("dilation needs a non-empty square matrix");
  Eigen::Index d = 1;
  while (d < a.rows()) d *= 2;
  Eigen::MatrixXcd ap = Eigen::MatrixXcd::Identity(d, d);
  ap.topLeftCorner(a.rows(), a.cols()) = a;
  Dilation out;
  out.original_dim = a.rows();
  out.padded.assign(static_cast<std::size_t>(d), false);
  for (Eigen::Index i = a.rows(); i < d; ++i) out.padded[static_cast<std::size_t>(i)] = true;
  out.matrix = Eigen::MatrixXcd::Zero(2 * d, 2 * d);
  out.matrix.topRightCorner(d, d) = ap;
  out.matrix.bottomLeftCorner(d, d) = ap.adjoint();
  out.h = Hamiltonian::from_dense(out.matrix);
  return out;
}

namespace {

SparseState sparse_apply(const SparseState& in, const std::vector<CompiledTerm>& terms, std::size_t cap) {
  SparseState out;
  for (const auto& [idx, amp] : in) {
    for (const auto& t : terms) {
      out[idx ^ t.x_mask] += t.coeff * parity_sign(idx & t.z_mask) * amp;
      if (out.size() > cap) throw ResourceError("classical moment expansion exceeded the term cap");
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    it = (it->second == cplx(0.0, 0.0)) ? out.erase(it) : std::next(it);
  }
  return out;
}

cplx sparse_dot(const SparseState& a, const SparseState& b) {
  const SparseState& small = a.size() <= b.size() ? a : b;
  const SparseState& large = a.size() <= b.size() ? b : a;
  cplx acc = 0.0;
  for (const auto& [idx, amp] : small) {
    auto it = large.find(idx);
    if (it == large.end()) continue;
    acc += (&small == &a) ? std::conj(amp) * it->second : std::conj(it->second) * amp;
  }
  return acc;
}

}  // namespace

ClassicalMoments classical_moments(const SparseState& state, const Observable& h, int l_max,
                                   double poly_exponent, std::size_t term_cap) {
  if (l_max < 0) throw std::invalid_argument("l_max must be non-negative");
  std::vector<CompiledTerm> terms;
  for (const auto& t : h.terms()) terms.push_back(compile_term(t.weight, t.string));
  const int half = (l_max + 1) / 2;
  std::vector<SparseState> phi{state};
  std::size_t peak = state.size();
  for (int j = 1; j <= half; ++j) {
    phi.push_back(sparse_apply(phi.back(), terms, term_cap));
    peak = std::max(peak, phi.back().size());
  }
  const double norm2 = sparse_dot(phi[0], phi[0]).real();
  if (!(norm2 > 0.0)) throw std::invalid_argument("sparse state has zero norm");
  ClassicalMoments out;
  for (int l = 0; l <= l_max; ++l) {
    const int a = l / 2, b = l - a;
    out.moments.push_back(sparse_dot(phi[static_cast<std::size_t>(a)], phi[static_cast<std::size_t>(b)]).real() / norm2);
  }
  auto& f = out.feasibility;
  f.m = state.size();
  f.j = h.size();
  f.n = h.n_qubits();
  f.k = std::max(0, (l_max - 2) / 2);
  f.poly_exponent = poly_exponent;
  f.rhs = std::pow(static_cast<double>(f.n), poly_exponent);
  auto lhs_at = [&](int k) {
    return static_cast<double>(f.m) * static_cast<double>(f.m) * std::pow(static_cast<double>(f.j), 2.0 * k + 2.0);
  };
  f.lhs = lhs_at(f.k);
  f.feasible = f.lhs <= f.rhs;
  f.k_max_feasible = -1;
  if (f.j <= 1) {
    f.k_max_feasible = lhs_at(0) <= f.rhs ? std::numeric_limits<int>::max() : -1;
  } else {
    for (int k = 0; k < 64 && lhs_at(k) <= f.rhs; ++k) f.k_max_feasible = k;
  }
  f.peak_terms = peak;
  return out;
}

EnergyStats stats_from_moments(const std::vector<double>& moments, const std::vector<cplx>& roots_applied) {
  PolynomialSpec p;
  p.roots = roots_applied;
  const auto c = expand_roots(p);
  const std::size_t d = c.size() - 1;
  if (moments.size() < 2 * d + 3) throw std::invalid_argument("not enough moments for the requested step");
  cplxl n0 = 0, n1 = 0, n2 = 0;
  for (std::size_t a = 0; a <= d; ++a) {
    for (std::size_t b = 0; b <= d; ++b) {
      const cplxl w = std::conj(c[a]) * c[b];
      n0 += w * static_cast<long double>(moments[a + b]);
      n1 += w * static_cast<long double>(moments[a + b + 1]);
      n2 += w * static_cast<long double>(moments[a + b + 2]);
    }
  }
  EnergyStats s;
  s.energy = static_cast<double>(n1.real() / n0.real());
  s.second_moment = static_cast<double>(n2.real() / n0.real());
  s.variance = std::max(0.0, s.second_moment - s.energy * s.energy);
  return s;
}

void to_json(nlohmann::json& j, const PolynomialSpec& p) {
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& z : p.roots) roots.push_back({z.real(), z.imag()});
  j = {{"leading", {p.leading.real(), p.leading.imag()}}, {"roots", roots}, {"provenance", to_string(p.provenance)}};
}

void from_json(const nlohmann::json& j, PolynomialSpec& p) {
  p = PolynomialSpec{};
  if (j.contains("leading")) {
    const auto& l = j.at("leading");
    p.leading = cplx(l.at(0).get<double>(), l.at(1).get<double>());
  }
  for (const auto& z : j.at("roots")) {
    if (z.is_number()) {
      p.roots.emplace_back(z.get<double>(), 0.0);
    } else {
      p.roots.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  if (j.contains("provenance")) p.provenance = provenance_from_string(j.at("provenance").get<std::string>());
}

void to_json(nlohmann::json& j, const ChebSeries& s) {
  j = {{"coeffs", s.coeffs}, {"parity", to_string(s.parity)}, {"scale", s.scale}};
}

void from_json(const nlohmann::json& j, ChebSeries& s) {
  s.coeffs = j.at("coeffs").get<std::vector<double>>();
  s.parity = detect_parity(s.coeffs);
  s.scale = j.value("scale", 1.0);
  if (j.contains("parity") && j.at("parity").get<std::string>() != to_string(s.parity)) {
    throw std::invalid_argument("parity flag inconsistent with coefficients");
  }
}

}  // namespace dbqsp
