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

#include "dbqsp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dbqsp/csv.hpp"
#include "dbqsp/errors.hpp"
#include "dbqsp/kernels.hpp"

namespace dbqsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using u128 = unsigned __int128;
constexpr u128 kU64Max = std::numeric_limits<uint64_t>::max();

uint64_t checked(u128 v, const char* what) {
  if (v > kU64Max) throw ResourceError(std::string(what) + ": depth exceeds 64-bit range");
  return static_cast<uint64_t>(v);
}

}  // namespace

std::string to_string(RunMode m) { return m == RunMode::exact ? "exact" : "group_commutator"; }

StepParams step_params(const EnergyStats& stats, cplx z, const StepOptions& opts) {
  if (!(stats.variance > opts.eigenstate_tol)) {
    throw EigenstateBreakdown("energy variance below the eigenstate tolerance", -1);
  }
  const cplx d = stats.energy - z;
  const double gap = std::abs(d);
  const double sv = std::sqrt(stats.variance);
  const double mag = std::acos(std::clamp(gap / std::sqrt(stats.variance + gap * gap), 0.0, 1.0)) / sv;
  StepParams p;
  if (gap < kPhaseDegenerateGap) {
    p.s = -mag;
    return p;
  }
  if (opts.real_root == RealRootMode::signed_duration && z.imag() == 0.0 && d.real() < 0.0) {
    p.s = mag;
    return p;
  }
  double th = std::arg(d);
  if (th < 0.0) th += kTwoPi;
  if (th >= kTwoPi) th = 0.0;
  p.s = -mag;
  p.theta = th + 0.0;
  return p;
}

std::vector<StepParams> RunReport::schedule() const {
  std::vector<StepParams> out;
  for (const auto& r : steps) out.push_back({r.duration, r.phase});
  return out;
}

double RunReport::zeta() const {
  double z = 0.0;
  for (const auto& r : steps) z = std::max({z, std::abs(r.duration), r.phase});
  return z;
}

void to_json(nlohmann::json& j, const StepRecord& r) {
  j = {{"k", r.k},
       {"root", {r.root.real(), r.root.imag()}},
       {"energy", r.energy},
       {"variance", r.variance},
       {"duration", r.duration},
       {"phase", r.phase},
       {"depth_after", r.depth_after},
       {"exact_distance", r.exact_distance},
       {"aligned_distance", r.aligned_distance}};
}

void to_json(nlohmann::json& j, const RunReport& r) {
  j = {{"steps", r.steps},
       {"final_state", r.final_state},
       {"total_depth", r.total_depth},
       {"oracle_distance_raw", r.oracle_distance_raw},
       {"oracle_distance_aligned", r.oracle_distance_aligned},
       {"gc_repetitions", r.gc_repetitions},
       {"mode", to_string(r.mode)},
       {"seed", r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr)}};
}

void write_steps_csv(std::ostream& os, const RunReport& r) {
  os << "k,re_z,im_z,E,V,s,theta,depth_after,dist_raw,dist_aligned\n";
  for (const auto& s : r.steps) {
    os << s.k << ',' << num(s.root.real()) << ',' << num(s.root.imag()) << ',' << num(s.energy) << ','
       << num(s.variance) << ',' << num(s.duration) << ',' << num(s.phase) << ',' << s.depth_after << ','
       << num(s.exact_distance) << ',' << num(s.aligned_distance) << '\n';
  }
}

namespace {

GcStepResult gc_eigenbasis(const StateVector& state, const StateVector& psi, const Hamiltonian& h, double s,
                           double theta, int n) {
  if (n < 1) throw std::invalid_argument("gc repetitions must be at least 1");
  check_same_dim(state, psi);
  check_same_dim(state, h);
  const Spectrum& sp = h.spectrum();
  Eigen::VectorXcd x, p;
  dense_adjoint_matvec(sp.vectors, state.amplitudes(), x);
  dense_adjoint_matvec(sp.vectors, psi.amplitudes(), p);
  const double a = std::sqrt(std::abs(s) / n);
  const Eigen::ArrayXcd fwd = (cplx(0.0, a) * sp.values.array().cast<cplx>()).exp();
  const Eigen::ArrayXcd bwd = fwd.conjugate();
  const cplx rp = std::exp(cplx(0.0, a)) - 1.0;
  const cplx rm = std::exp(cplx(0.0, -a)) - 1.0;
  auto reflect = [&](cplx factor) { x += (factor * p.dot(x)) * p; };
  for (int r = 0; r < n; ++r) {
    if (s <= 0.0) {
      x.array() *= bwd;
      reflect(rm);
      x.array() *= fwd;
      reflect(rp);
    } else {
      reflect(rm);
      x.array() *= bwd;
      reflect(rp);
      x.array() *= fwd;
    }
  }
  reflect(std::exp(cplx(0.0, theta)) - 1.0);
  Eigen::VectorXcd out;
  dense_matvec(sp.vectors, x, out);
  GcStepResult res;
  res.state = StateVector(state.n_qubits(), std::move(out));
  res.evolutions = 2 * static_cast<uint64_t>(n);
  res.reflections = 2 * static_cast<uint64_t>(n) + 1;
  res.depth_added = res.evolutions + res.reflections;
  return res;
}

}  // namespace

GcStepResult gc_step(const StateVector& state, const StateVector& psi, const Hamiltonian& h, double s,
                     double theta, int n) {
  if (s > 0.0) throw ContractViolation("gc_step requires s <= 0");
  return gc_eigenbasis(state, psi, h, s, theta, n);
}

GcStepResult gc_step_signed(const StateVector& state, const StateVector& psi, const Hamiltonian& h, double s,
                            double theta, int n) {
  return gc_eigenbasis(state, psi, h, s, theta, n);
}

StateVector gc_step_reference(const StateVector& state, const StateVector& psi, const Hamiltonian& h,
                              double s, double theta, int n) {
  if (n < 1) throw std::invalid_argument("gc repetitions must be at least 1");
  const double a = std::sqrt(std::abs(s) / n);
  StateVector x = state;
  for (int r = 0; r < n; ++r) {
    if (s <= 0.0) {
      x = apply_evolution(x, h, -a);
      x = apply_reflection(x, psi, -a);
      x = apply_evolution(x, h, a);
      x = apply_reflection(x, psi, a);
    } else {
      x = apply_reflection(x, psi, -a);
      x = apply_evolution(x, h, -a);
      x = apply_reflection(x, psi, a);
      x = apply_evolution(x, h, a);
    }
  }
  return apply_reflection(x, psi, theta);
}

StateVector dbqite_step(const StateVector& psi, const Hamiltonian& h, double s) {
  if (s < 0.0) throw std::invalid_argument("dbqite_step requires s >= 0");
  const double a = std::sqrt(s);
  StateVector x = apply_evolution(psi, h, -a);
  x = apply_reflection(x, psi, a);
  return apply_evolution(x, h, a);
}

uint64_t unfolded_step_depth(uint64_t depth_before, uint64_t evolutions, uint64_t reflections) {
  const u128 d = depth_before;
  return checked(static_cast<u128>(reflections) * (2 * d + 1) + evolutions + d, "unfolded_step_depth");
}

namespace {

RunReport run_impl(const StateVector& state0, const Hamiltonian& h, const PolynomialSpec& poly, RunMode mode,
                   int n, const EstimationSpec& est, const StepOptions& opts) {
  check_same_dim(state0, h);
  if (mode == RunMode::group_commutator && n < 1) throw std::invalid_argument("gc repetitions must be at least 1");
  if (est.sampled && !h.has_observable()) {
    throw std::invalid_argument("sampled estimation needs a Pauli-sum Hamiltonian");
  }
  RunReport rep;
  rep.mode = mode;
  rep.gc_repetitions = mode == RunMode::group_commutator ? n : 0;
  if (est.sampled) rep.seed = est.seed;

  std::vector<cplx> remaining = poly.roots;
  StateVector psi = state0;
  Eigen::VectorXcd oracle = state0.amplitudes();
  uint64_t depth = 0;
  const int k_total = static_cast<int>(remaining.size());
  for (int k = 0; k < k_total; ++k) {
    EnergyStats stats;
    if (est.sampled) {
      const auto e = estimate_energy_and_variance(psi, h.observable(), est.alloc, derive_seed(est.seed, k));
      stats.energy = e.energy;
      stats.variance = e.variance;
    } else {
      stats = energy_stats(psi, h);
    }
    std::size_t pick = 0;
    if (opts.ordering == RootOrdering::greedy_gap) {
      for (std::size_t r = 1; r < remaining.size(); ++r) {
        if (std::abs(stats.energy - remaining[r]) > std::abs(stats.energy - remaining[pick])) pick = r;
      }
    }
    const cplx z = remaining[pick];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));

    StepParams p;
    try {
      p = step_params(stats, z, opts);
    } catch (const EigenstateBreakdown& e) {
      throw EigenstateBreakdown(std::string(e.what()) + " at step " + std::to_string(k), k);
    }

    if (mode == RunMode::exact) {
      psi = apply_reflection(apply_commutator_exp(psi, psi, h, p.s), psi, p.theta);
    } else {
      const GcStepResult g = gc_step_signed(psi, psi, h, p.s, p.theta, n);
      depth = unfolded_step_depth(depth, g.evolutions, g.reflections);
      psi = g.state;
    }

    oracle = h.apply(oracle) - z * oracle;
    const double on = oracle.norm();
    if (on <= kOracleBreakdownNorm) throw OracleBreakdown("oracle state annihilated at step " + std::to_string(k));
    oracle /= on;
    const StateVector ref(state0.n_qubits(), oracle);

    StepRecord rec;
    rec.k = k;
    rec.root = z;
    rec.energy = stats.energy;
    rec.variance = stats.variance;
    rec.duration = p.s;
    rec.phase = p.theta;
    rec.depth_after = depth;
    rec.exact_distance = state_distance(psi, ref);
    rec.aligned_distance = state_distance(psi, ref, true);
    rep.steps.push_back(rec);
  }
  const StateVector ref(state0.n_qubits(), oracle);
  rep.final_state = psi;
  rep.total_depth = depth;
  rep.oracle_distance_raw = state_distance(psi, ref);
  rep.oracle_distance_aligned = state_distance(psi, ref, true);
  return rep;
}

}  // namespace

RunReport exact_qsp(const StateVector& state0, const Hamiltonian& h, const PolynomialSpec& poly,
                    const StepOptions& opts) {
  return run_impl(state0, h, poly, RunMode::exact, 0, EstimationSpec::exact(), opts);
}

RunReport dbqsp_run(const StateVector& state0, const Hamiltonian& h, const PolynomialSpec& poly, int n,
                    const EstimationSpec& est, const RunOptions& opts) {
  return run_impl(state0, h, poly, opts.mode, n, est, opts.step);
}

ScheduleResult apply_schedule(const StateVector& state0, const Hamiltonian& h,
                              const std::vector<StepParams>& schedule, RunMode mode, int n) {
  ScheduleResult out;
  StateVector psi = state0;
  out.trajectory.push_back(psi);
  for (const auto& p : schedule) {
    if (mode == RunMode::exact) {
      psi = apply_reflection(apply_commutator_exp(psi, psi, h, p.s), psi, p.theta);
    } else {
      const GcStepResult g = gc_step_signed(psi, psi, h, p.s, p.theta, n);
      out.total_depth = unfolded_step_depth(out.total_depth, g.evolutions, g.reflections);
      psi = g.state;
    }
    out.trajectory.push_back(psi);
  }
  out.final_state = psi;
  return out;
}

uint64_t depth_exact(int k, int n) {
  if (k < 0 || n < 1) throw std::invalid_argument("depth_exact requires K >= 0 and N >= 1");
  const u128 b = 4 * static_cast<u128>(n) + 3;
  u128 pw = 1;
  for (int i = 0; i < k; ++i) {
    pw *= b;
    if (pw > (static_cast<u128>(1) << 66)) throw ResourceError("depth_exact: depth exceeds 64-bit range");
  }
  const u128 num_ = (4 * static_cast<u128>(n) + 1) * (pw - 1);
  return checked(num_ / (4 * static_cast<u128>(n) + 2), "depth_exact");
}

double depth_exact_log10(int k, int n) {
  if (k < 0 || n < 1) throw std::invalid_argument("depth_exact requires K >= 0 and N >= 1");
  if (k == 0) return -std::numeric_limits<double>::infinity();
  const long double b = 4.0L * n + 3.0L;
  const long double lp = k * std::log10(b);
  const long double lpm1 = lp < 15.0L ? std::log10(std::pow(b, static_cast<long double>(k)) - 1.0L) : lp;
  return static_cast<double>(std::log10(4.0L * n + 1.0L) + lpm1 - std::log10(4.0L * n + 2.0L));
}

uint64_t depth_recursion(int k, int n) {
  if (k < 0 || n < 1) throw std::invalid_argument("depth_recursion requires K >= 0 and N >= 1");
  u128 d = 0;
  for (int i = 0; i < k; ++i) {
    d = (4 * static_cast<u128>(n) + 3) * d + 4 * static_cast<u128>(n) + 1;
    checked(d, "depth_recursion");
  }
  return static_cast<uint64_t>(d);
}

uint64_t count_unfolded_depth(int k, int n) {
  if (k < 0 || n < 1) throw std::invalid_argument("count_unfolded_depth requires K >= 0 and N >= 1");
  enum class Prim { evolution, reflection };
  std::vector<Prim> step;
  for (int r = 0; r < n; ++r) {
    step.insert(step.end(), {Prim::evolution, Prim::reflection, Prim::evolution, Prim::reflection});
  }
  step.push_back(Prim::reflection);
  u128 d = 0;
  for (int i = 0; i < k; ++i) {
    u128 next = d;  // prepare Psi_i
    for (Prim p : step) next += p == Prim::evolution ? 1 : 2 * d + 1;
    d = checked(next, "count_unfolded_depth");
  }
  return static_cast<uint64_t>(d);
}

uint64_t sufficient_gc_repetitions(int k, double zeta, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (k <= 0) return 1;
  const long double v = 16.0L / 9.0L * zeta * std::pow(1.0L + 6.0L * zeta, 2.0L * k) /
                        (static_cast<long double>(epsilon) * epsilon);
  if (v > 1.8e19L) throw ResourceError("sufficient_gc_repetitions: N exceeds 64-bit range");
  return std::max<uint64_t>(1, static_cast<uint64_t>(std::ceil(v)));
}

double gc_step_bound(double s, int n) { return 8.0 * std::pow(std::abs(s), 1.5) / std::sqrt(n); }

double gc_total_bound(int k, double zeta, int n) {
  return 4.0 / 3.0 * std::sqrt(zeta) * std::pow(1.0 + 6.0 * zeta, k) / std::sqrt(n);
}

StabilityBounds stability_bounds(const StabilityInputs& in) {
  StabilityBounds b;
  const double grow = std::pow(1.0 + 6.0 * in.zeta, in.k);
  const double dp = std::max(in.delta_s, in.delta_theta);
  if (dp > 0.0) {
    b.parameter = in.zeta > 0.0 ? grow * dp / (3.0 * in.zeta) : std::numeric_limits<double>::infinity();
  }
  b.hamiltonian = grow * in.delta_h / 3.0;
  const double eta4 = std::pow(in.eta, 4);
  b.single_step = 20.0 * eta4 * std::max(in.delta_e_step, in.delta_v_step);
  b.k_step = std::pow(14.0 + 120.0 * eta4, in.k) * std::max(in.delta_e, in.delta_v);
  return b;
}

SuccessProbability postselect_success_prob(const StateVector& state, const Hamiltonian& h, double alpha,
                                           const PolynomialSpec& poly) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  check_same_dim(state, h);
  const Spectrum& sp = h.spectrum();
  Eigen::VectorXcd c;
  dense_adjoint_matvec(sp.vectors, state.amplitudes(), c);
  SuccessProbability out;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double v = std::abs(poly.evaluate(sp.values[i] / alpha));
    out.max_abs_on_spectrum = std::max(out.max_abs_on_spectrum, v);
    out.probability += v * v * std::norm(c[i]);
  }
  out.within_unit_bound = out.max_abs_on_spectrum <= 1.0 + 1e-12;
  return out;
}

}  // namespace dbqsp
