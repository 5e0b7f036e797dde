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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dbqsp/errors.hpp"
#include "dbqsp/polynomial.hpp"

namespace dbqsp {

std::vector<double> chebyshev_interpolate(const std::function<double(double)>& f, int n, double scale) {
  std::vector<double> fx(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) fx[j] = f(scale * std::cos(std::numbers::pi * (j + 0.5) / n));
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    long double acc = 0.0L;
    for (int j = 0; j < n; ++j) acc += fx[j] * std::cos(std::numbers::pi * m * (j + 0.5) / n);
    c[m] = static_cast<double>(2.0L * acc / n);
  }
  c[0] *= 0.5;
  return c;
}

InverseApprox inverse_approx(double kappa, double epsilon, int cap_a, std::size_t root_cap) {
  if (!(kappa > 1.0)) throw std::invalid_argument("kappa must exceed 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
  const double a_real = std::ceil(kappa * kappa * std::log(kappa / epsilon));
  if (a_real > cap_a) throw ResourceError("inverse_approx: a exceeds the configured cap");
  const int a = static_cast<int>(a_real);
  const int k = static_cast<int>(std::ceil(std::sqrt(a * std::log(4.0 * a / epsilon))));

  // tail[l] = sum_{j=l+1}^{a} C(2a, a+j) / 2^{2a}
  const long double log_norm = std::lgamma(2.0L * a + 1.0L) - 2.0L * a * std::log(2.0L);
  std::vector<long double> tail(static_cast<std::size_t>(a) + 2, 0.0L);
  for (int j = a; j >= 1; --j) {
    const long double b = std::exp(log_norm - std::lgamma(static_cast<long double>(a + j) + 1.0L) -
                                   std::lgamma(static_cast<long double>(a - j) + 1.0L));
    tail[static_cast<std::size_t>(j - 1)] = tail[static_cast<std::size_t>(j)] + b;
  }

  InverseApprox out;
  out.a = a;
  out.k = k;
  out.series.coeffs.assign(static_cast<std::size_t>(2 * k + 2), 0.0);
  for (int l = 0; l <= k; ++l) {
    const long double t = l < a ? tail[static_cast<std::size_t>(l)] : 0.0L;
    out.series.coeffs[static_cast<std::size_t>(2 * l + 1)] = static_cast<double>(4.0L * (l % 2 ? -t : t));
  }
  out.series.coeffs.resize(out.series.degree() + 1);
  out.series.parity = detect_parity(out.series.coeffs);
  if (out.series.degree() <= root_cap) {
    out.poly = cheb_to_roots(out.series, Provenance::inverse_approx);
    out.roots_available = true;
  }
  return out;
}

std::vector<double> bessel_j_sequence(double t, int m_max) {
  std::vector<double> out(static_cast<std::size_t>(m_max) + 1, 0.0);
  if (t == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double x = std::abs(t);
  int start = std::max(m_max, static_cast<int>(x)) + 20 + static_cast<int>(std::sqrt(40.0 * std::max(m_max, static_cast<int>(x) + 1)));
  if (start % 2) ++start;
  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[static_cast<std::size_t>(start)] = 1e-300;
  for (int k = start; k >= 1; --k) {
    j[static_cast<std::size_t>(k - 1)] = (2.0 * k / x) * j[static_cast<std::size_t>(k)] - j[static_cast<std::size_t>(k + 1)];
    if (std::abs(j[static_cast<std::size_t>(k - 1)]) > 1e250) {
      for (int i = k - 1; i <= start; ++i) j[static_cast<std::size_t>(i)] *= 1e-250;
    }
  }
  // J_0 + 2 sum J_{2k} = 1
  long double norm = j[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0L * j[static_cast<std::size_t>(k)];
  for (int m = 0; m <= m_max; ++m) {
    double v = static_cast<double>(j[static_cast<std::size_t>(m)] / norm);
    if (t < 0 && (m % 2)) v = -v;
    out[static_cast<std::size_t>(m)] = v;
  }
  return out;
}

namespace {

constexpr int kSweepPoints = 4001;

std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return g;
}

}  // namespace

JacobiAnger jacobi_anger(double t, double epsilon, TrigKind kind) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const int m_cap = static_cast<int>(std::abs(t)) * 2 + 200;
  const auto jn = bessel_j_sequence(t, m_cap + 2);
  const auto grid = uniform_grid(-1.0, 1.0, kSweepPoints);
  std::vector<double> target(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    target[i] = kind == TrigKind::cos ? std::cos(t * grid[i]) : std::sin(t * grid[i]);
  }
  JacobiAnger out;
  out.series.coeffs.clear();
  std::vector<double> partial(grid.size(), 0.0);
  for (int l = 0; 2 * l + 1 <= m_cap; ++l) {
    const int m = kind == TrigKind::cos ? 2 * l : 2 * l + 1;
    double c = (l % 2 ? -2.0 : 2.0) * jn[static_cast<std::size_t>(m)];
    if (kind == TrigKind::cos && l == 0) c = jn[0];
    out.series.coeffs.resize(static_cast<std::size_t>(m) + 1, 0.0);
    out.series.coeffs[static_cast<std::size_t>(m)] = c;
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      partial[i] += c * std::cos(m * std::acos(std::clamp(grid[i], -1.0, 1.0)));
      err = std::max(err, std::abs(partial[i] - target[i]));
    }
    if (err <= epsilon) {
      out.k = l;
      out.measured_error = err;
      break;
    }
    if (2 * l + 3 > m_cap) throw ApproximationError("jacobi_anger: truncation did not converge");
  }
  out.series.parity = detect_parity(out.series.coeffs);
  const double tp = std::exp(1.0) * std::abs(t) / 2.0;
  const double ep = 5.0 * epsilon / 4.0;
  const double lg = std::log(1.0 / ep);
  out.theta_form = tp > 0 ? tp + lg / std::log(std::exp(1.0) + lg / tp) : lg;
  return out;
}

SignApprox sign_approx(double delta, double epsilon, int max_degree) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
  // erf(gamma delta) = 1 - epsilon/4 leaves room for truncation error.
  double lo = 0.0, hi = 1.0;
  while (std::erf(hi * delta) < 1.0 - epsilon / 4.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::erf(mid * delta) < 1.0 - epsilon / 4.0 ? lo : hi) = mid;
  }
  const double gamma = hi;
  const double scale = 2.0;
  const auto full = chebyshev_interpolate([gamma](double x) { return std::erf(gamma * x); }, max_degree + 1, scale);

  const auto grid = uniform_grid(0.0, 2.0, kSweepPoints);
  std::vector<double> partial(grid.size(), 0.0);
  SignApprox out;
  out.gamma = gamma;
  for (int d = 1; d <= max_degree; d += 2) {
    const double c = full[static_cast<std::size_t>(d)];
    double err = 0.0, max_abs = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      partial[i] += c * std::cos(d * std::acos(std::clamp(grid[i] / scale, -1.0, 1.0)));
      max_abs = std::max(max_abs, std::abs(partial[i]));
    }
    const double shrink = max_abs > 1.0 ? 1.0 / max_abs : 1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i] >= delta) err = std::max(err, std::abs(shrink * partial[i] - 1.0));
    }
    if (err <= epsilon) {
      out.series.coeffs.assign(static_cast<std::size_t>(d) + 1, 0.0);
      for (int m = 1; m <= d; m += 2) out.series.coeffs[static_cast<std::size_t>(m)] = shrink * full[static_cast<std::size_t>(m)];
      out.series.parity = Parity::odd;
      out.series.scale = scale;
      out.measured_error = err;
      out.max_abs = std::min(max_abs, 1.0);
      return out;
    }
  }
  throw ApproximationError("sign_approx: sup-error target unmet at the degree cap");
}

}  // namespace dbqsp
