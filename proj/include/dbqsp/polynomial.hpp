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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dbqsp/hamiltonian.hpp"
#include "dbqsp/statevector.hpp"

namespace dbqsp {

using cplxl = std::complex<long double>;

enum class Provenance { explicit_roots, from_coeffs, chebyshev, inverse_approx, sign_approx, jacobi_anger };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

// p(x) = leading * prod_k (x - roots[k])
struct PolynomialSpec {
  cplx leading{1.0, 0.0};
  std::vector<cplx> roots;
  Provenance provenance = Provenance::explicit_roots;

  std::size_t degree() const { return roots.size(); }
  cplx evaluate(cplx x) const;
};

enum class Parity { even, odd, mixed };

std::string to_string(Parity p);

/**
 * @brief p(x) = sum_m coeffs[m] T_m(x / scale).
 */
struct ChebSeries {
  std::vector<double> coeffs;
  Parity parity = Parity::mixed;
  double scale = 1.0;

  double evaluate(double x) const;
  std::size_t degree() const;
};

Parity detect_parity(const std::vector<double>& coeffs);

inline constexpr double kRealSnapTol = 1e-9;
inline constexpr std::size_t kRootDegreeCap = 40;

// coeffs[m] multiplies x^m.
PolynomialSpec roots_from_coeffs(const std::vector<cplx>& coeffs, double real_snap_tol = kRealSnapTol);
PolynomialSpec roots_from_coeffs(const std::vector<cplxl>& coeffs, double real_snap_tol = kRealSnapTol);

// Ascending monomial coefficients of leading * prod (x - z).
std::vector<cplxl> expand_roots(const PolynomialSpec& p);
// max_m |expanded_m - coeffs_m| / max_m |coeffs_m|
double reconstruction_error(const PolynomialSpec& p, const std::vector<cplxl>& coeffs);

// Ascending monomial coefficients of a Chebyshev series in x (scale applied).
std::vector<long double> cheb_to_monomial(const ChebSeries& s);
PolynomialSpec cheb_to_roots(const ChebSeries& s, Provenance tag = Provenance::chebyshev);

inline constexpr double kOracleBreakdownNorm = 1e-14;

// prod_k (H - z_k) |state>, renormalized.
StateVector apply_poly_oracle(const StateVector& state, const Hamiltonian& h, const PolynomialSpec& p);
// sum_m c_m T_m(H / scale) |state>, not normalized. Dense reference path.
Eigen::VectorXcd apply_cheb_dense(const Eigen::VectorXcd& v, const Hamiltonian& h, const ChebSeries& s);

// I - tau H = -tau (H - I/tau)
PolynomialSpec ite_linear_filter(double tau, const Hamiltonian& h);

struct Dilation {
  Hamiltonian h;
  Eigen::MatrixXcd matrix;
  std::vector<bool> padded;  // per row of the padded A block
  Eigen::Index original_dim = 0;
};

// [[0, A], [A^dagger, 0]] with A padded by an identity block to a power of two.
Dilation hermitian_dilation(const Eigen::MatrixXcd& a);

using SparseState = std::map<uint64_t, cplx>;

struct MomentFeasibility {
  std::size_t m = 0;  // support size of the input state
  std::size_t j = 0;  // number of Pauli terms
  int k = 0;          // DB-QSP steps covered by the requested moments
  int n = 0;
  double poly_exponent = 3.0;
  double lhs = 0.0;   // m^2 J^{2k+2}
  double rhs = 0.0;   // n^poly_exponent
  bool feasible = false;
  int k_max_feasible = -1;
  std::size_t peak_terms = 0;
};

struct ClassicalMoments {
  std::vector<double> moments;  // <H^l>, l = 0..l_max
  MomentFeasibility feasibility;
};

inline constexpr std::size_t kMomentTermCap = std::size_t{1} << 22;

ClassicalMoments classical_moments(const SparseState& state, const Observable& h, int l_max,
                                   double poly_exponent = 3.0, std::size_t term_cap = kMomentTermCap);

// (E_k, V_k) of prod_{j<k}(H - z_j)|Psi_0> normalized, from moments alone.
EnergyStats stats_from_moments(const std::vector<double>& moments, const std::vector<cplx>& roots_applied);

// Approximation constructions.

struct InverseApprox {
  ChebSeries series;
  PolynomialSpec poly;
  bool roots_available = false;
  int a = 0;
  int k = 0;
};

inline constexpr int kInverseCapA = 20000;

InverseApprox inverse_approx(double kappa, double epsilon, int cap_a = kInverseCapA,
                             std::size_t root_cap = kRootDegreeCap);

enum class TrigKind { cos, sin };

struct JacobiAnger {
  ChebSeries series;
  int k = 0;               // truncation index
  double measured_error = 0.0;
  double theta_form = 0.0; // asymptotic degree estimate, constants dropped
};

JacobiAnger jacobi_anger(double t, double epsilon, TrigKind kind);

// J_0(t) .. J_{m_max}(t) by normalized backward recurrence.
std::vector<double> bessel_j_sequence(double t, int m_max);

struct SignApprox {
  ChebSeries series;  // scale = 2
  double gamma = 0.0;
  double measured_error = 0.0;
  double max_abs = 0.0;
};

SignApprox sign_approx(double delta, double epsilon, int max_degree = 1001);

// Chebyshev interpolation coefficients of f on [-scale, scale] at n nodes.
std::vector<double> chebyshev_interpolate(const std::function<double(double)>& f, int n,
                                          double scale = 1.0);

void to_json(nlohmann::json& j, const PolynomialSpec& p);
void from_json(const nlohmann::json& j, PolynomialSpec& p);
void to_json(nlohmann::json& j, const ChebSeries& s);
void from_json(const nlohmann::json& j, ChebSeries& s);

}  // namespace dbqsp
