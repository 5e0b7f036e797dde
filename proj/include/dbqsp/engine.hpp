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

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbqsp/hamiltonian.hpp"
#include "dbqsp/polynomial.hpp"
#include "dbqsp/sampling.hpp"
#include "dbqsp/statevector.hpp"

namespace dbqsp {

inline constexpr double kEigenstateTolerance = 1e-12;
inline constexpr double kPhaseDegenerateGap = 1e-12;

struct StepParams {
  double s = 0.0;
  double theta = 0.0;
};

// How a real root above the energy is realized.
//   reflection:      theta = pi, s <= 0.
//   signed_duration: theta = 0, s > 0 (the state picks up a global -1).
enum class RealRootMode { reflection, signed_duration };
enum class RootOrdering { given, greedy_gap };

struct StepOptions {
  double eigenstate_tol = kEigenstateTolerance;
  RealRootMode real_root = RealRootMode::reflection;
  RootOrdering ordering = RootOrdering::given;
};

StepParams step_params(const EnergyStats& stats, cplx z, const StepOptions& opts = {});

struct StepRecord {
  int k = 0;
  cplx root;
  double energy = 0.0;
  double variance = 0.0;
  double duration = 0.0;
  double phase = 0.0;
  uint64_t depth_after = 0;
  double exact_distance = 0.0;    // raw, to the partial oracle state
  double aligned_distance = 0.0;
};

enum class RunMode { exact, group_commutator };

std::string to_string(RunMode m);

struct RunReport {
  std::vector<StepRecord> steps;
  StateVector final_state;
  uint64_t total_depth = 0;
  double oracle_distance_raw = 0.0;
  double oracle_distance_aligned = 0.0;
  int gc_repetitions = 0;
  RunMode mode = RunMode::exact;
  std::optional<uint64_t> seed;

  std::vector<StepParams> schedule() const;
  // max over k of max(|s_k|, theta_k)
  double zeta() const;
};

void to_json(nlohmann::json& j, const StepRecord& r);
void to_json(nlohmann::json& j, const RunReport& r);
// k,re_z,im_z,E,V,s,theta,depth_after,dist_raw,dist_aligned
void write_steps_csv(std::ostream& os, const RunReport& r);

RunReport exact_qsp(const StateVector& state0, const Hamiltonian& h, const PolynomialSpec& poly,
                    const StepOptions& opts = {});

struct GcStepResult {
  StateVector state;
  uint64_t depth_added = 0;  // evolutions + reflections = 4N + 1
  uint64_t evolutions = 0;
  uint64_t reflections = 0;  // about psi, including the theta reflection
};

/**
 * @brief e^{i theta psi} (e^{ia psi} e^{iaH} e^{-ia psi} e^{-iaH})^N state, a = sqrt(|s|/N).
 *
 * Runs in the cached eigenbasis of H. Throws ContractViolation for s > 0.
 */
GcStepResult gc_step(const StateVector& state, const StateVector& psi, const Hamiltonian& h, double s,
                     double theta, int n);

// As gc_step, but s > 0 uses the swapped product e^{iaH} e^{ia psi} e^{-iaH} e^{-ia psi}.
GcStepResult gc_step_signed(const StateVector& state, const StateVector& psi, const Hamiltonian& h, double s,
                            double theta, int n);

// Literal composition of apply_evolution and apply_reflection. Test reference.
StateVector gc_step_reference(const StateVector& state, const StateVector& psi, const Hamiltonian& h,
                              double s, double theta, int n);

// e^{i sqrt(s) H} e^{i sqrt(s) psi} e^{-i sqrt(s) H} |psi>, s >= 0.
StateVector dbqite_step(const StateVector& psi, const Hamiltonian& h, double s);

struct EstimationSpec {
  bool sampled = false;
  ShotAllocation alloc;
  uint64_t seed = 0;

  static EstimationSpec exact() { return {}; }
  static EstimationSpec sampling(ShotAllocation a, uint64_t seed) { return {true, std::move(a), seed}; }
};

struct RunOptions {
  StepOptions step;
  RunMode mode = RunMode::group_commutator;
};

/**
 * @brief Full recursion: estimate (E_k, V_k), derive (s_k, theta_k), apply one step.
 *
 * Sampled estimation seeds step k with derive_seed(seed, k).
 */
RunReport dbqsp_run(const StateVector& state0, const Hamiltonian& h, const PolynomialSpec& poly, int n,
                    const EstimationSpec& est = EstimationSpec::exact(), const RunOptions& opts = {});

struct ScheduleResult {
  StateVector final_state;
  std::vector<StateVector> trajectory;  // Psi_0 .. Psi_K
  uint64_t total_depth = 0;
};

// Fixed (s_k, theta_k) sequence applied to state0; n is ignored in exact mode.
ScheduleResult apply_schedule(const StateVector& state0, const Hamiltonian& h,
                              const std::vector<StepParams>& schedule, RunMode mode, int n = 1);

// Closed form (4N+1)((4N+3)^K - 1)/(4N+2). ResourceError on uint64 overflow.
uint64_t depth_exact(int k, int n);
double depth_exact_log10(int k, int n);
// N_{k+1} = (4N+3) N_k + 4N+1, N_0 = 0
uint64_t depth_recursion(int k, int n);
// Walks each step's primitive list; a reflection about Psi_k costs 2 D_k + 1,
// an evolution costs 1, and preparing Psi_k costs D_k.
uint64_t count_unfolded_depth(int k, int n);
uint64_t unfolded_step_depth(uint64_t depth_before, uint64_t evolutions, uint64_t reflections);

// ceil((16/9) zeta (1+6 zeta)^{2K} / eps^2); 1 for K = 0.
uint64_t sufficient_gc_repetitions(int k, double zeta, double epsilon);

double gc_step_bound(double s, int n);                 // 8 |s|^{3/2} / sqrt(N)
double gc_total_bound(int k, double zeta, int n);      // (4/3) sqrt(zeta) (1+6 zeta)^K / sqrt(N)

struct StabilityInputs {
  int k = 0;
  double zeta = 0.0;
  double delta_s = 0.0;
  double delta_theta = 0.0;
  double delta_h = 0.0;
  double delta_e = 0.0;
  double delta_v = 0.0;
  double delta_e_step = 0.0;  // single-step deviations
  double delta_v_step = 0.0;
  double eta = 1.0;
};

struct StabilityBounds {
  double parameter = 0.0;
  double hamiltonian = 0.0;
  double single_step = 0.0;
  double k_step = 0.0;
};

StabilityBounds stability_bounds(const StabilityInputs& in);

struct SuccessProbability {
  double probability = 0.0;
  double max_abs_on_spectrum = 0.0;
  bool within_unit_bound = true;
};

// ||p(H/alpha)|state>||^2 from the eigendecomposition; not clipped.
SuccessProbability postselect_success_prob(const StateVector& state, const Hamiltonian& h, double alpha,
                                           const PolynomialSpec& poly);

}  // namespace dbqsp
