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

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "dbqsp/engine.hpp"
#include "dbqsp/errors.hpp"
#include "dbqsp/harness.hpp"
#include "oracles.hpp"

using namespace dbqsp;
using std::numbers::pi;

namespace {

const Observable kZObs(1, {{1.0, PauliString("Z")}});
const Hamiltonian kZ(kZObs);

PolynomialSpec roots(std::vector<cplx> z) {
  PolynomialSpec p;
  p.roots = std::move(z);
  return p;
}

struct Instance {
  Observable obs;
  Hamiltonian h;
  StateVector psi;
  PolynomialSpec poly;
};

Instance random_instance(uint64_t seed, int n, int degree, double real_fraction = 0.5) {
  std::mt19937_64 rng(seed);
  Instance x;
  x.obs = random_observable(n, 2 + static_cast<int>(seed % 5), rng);
  x.h = Hamiltonian(x.obs);
  x.psi = StateVector::random(n, rng);
  x.poly.roots = random_roots(degree, rng, real_fraction);
  return x;
}

}  // namespace

TEST(StepParams, Examples) {
  const EnergyStats st{0.0, 1.0, 1.0};
  auto a = step_params(st, 0.0);
  EXPECT_NEAR(a.s, -pi / 2, 1e-15);
  EXPECT_EQ(a.theta, 0.0);
  auto b = step_params(st, cplx(0, 1));
  EXPECT_NEAR(b.s, -pi / 4, 1e-15);
  EXPECT_NEAR(b.theta, 3 * pi / 2, 1e-15);
  auto c = step_params({1.0, 0.3, 1.3}, 0.5);
  EXPECT_EQ(c.theta, 0.0);
  EXPECT_LE(c.s, 0.0);
  EXPECT_THROW(step_params({1.0, 0.0, 1.0}, 0.5), EigenstateBreakdown);
}

TEST(StepParams, RealRootAboveEnergy) {
  const EnergyStats st{0.2, 0.5, 0.54};
  const auto r = step_params(st, 1.0);
  EXPECT_NEAR(r.theta, pi, 1e-15);
  EXPECT_LT(r.s, 0.0);
  StepOptions o;
  o.real_root = RealRootMode::signed_duration;
  const auto s = step_params(st, 1.0, o);
  EXPECT_EQ(s.theta, 0.0);
  EXPECT_NEAR(s.s, -r.s, 1e-15);
}

// Property: s <= 0, theta in [0, 2 pi), |s| |E - z| <= 1.
TEST(StepParams, RangeAndDurationBound) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2, 2), v(1e-6, 2);
  for (int t = 0; t < 2000; ++t) {
    const EnergyStats st{u(rng), v(rng), 0.0};
    const cplx z(u(rng), t % 3 ? u(rng) : 0.0);
    const auto p = step_params(st, z);
    EXPECT_LE(p.s, 0.0);
    EXPECT_GE(p.theta, 0.0);
    EXPECT_LT(p.theta, 2 * pi);
    EXPECT_LE(std::abs(p.s) * std::abs(st.energy - z), 1.0 + 1e-12);
  }
}

TEST(ExactQsp, Examples) {
  const auto plus = StateVector::product("+");
  const auto a = exact_qsp(plus, kZ, roots({0.0}));
  EXPECT_LT(state_distance(a.final_state, StateVector::product("-")), 1e-12);
  const auto b = exact_qsp(plus, kZ, roots({cplx(0, 1)}));
  Eigen::VectorXcd want(2);
  want << cplx(0.5, -0.5), cplx(-0.5, -0.5);
  EXPECT_LT((b.final_state.amplitudes() - want).norm(), 1e-12);
  const auto c = exact_qsp(plus, kZ, PolynomialSpec{});
  EXPECT_LT(state_distance(c.final_state, plus), 1e-15);
  EXPECT_TRUE(c.steps.empty());
}

// Property: every partial product matches the dense oracle.
TEST(ExactQsp, MatchesDenseOracleOnRandomInstances) {
  for (uint64_t seed = 0; seed < 40; ++seed) {
    const auto x = random_instance(seed, 1 + static_cast<int>(seed % 5), 1 + static_cast<int>(seed % 6));
    const auto rep = exact_qsp(x.psi, x.h, x.poly);
    const Eigen::VectorXcd want = oracle::poly_apply(x.psi.amplitudes(), to_dense(x.obs), x.poly.roots);
    EXPECT_LT((rep.final_state.amplitudes() - want).norm(), 1e-9) << seed;
    EXPECT_LT(rep.oracle_distance_raw, 1e-9);
    for (const auto& s : rep.steps) {
      EXPECT_LE(s.duration, 0.0);
      EXPECT_LT(s.exact_distance, 1e-9);
      const double gap = std::abs(s.energy - s.root);
      if (gap > 1e-9) EXPECT_LE(std::abs(s.duration) * gap, 1.0 + 1e-12);
    }
  }
}

TEST(ExactQsp, SignedDurationDiffersByGlobalSign) {
  const auto x = random_instance(77, 3, 3, 1.0);
  RunOptions o;
  o.mode = RunMode::exact;
  o.step.real_root = RealRootMode::signed_duration;
  const auto signed_run = dbqsp_run(x.psi, x.h, x.poly, 1, EstimationSpec::exact(), o);
  const auto refl = exact_qsp(x.psi, x.h, x.poly);
  int above = 0;
  for (const auto& s : signed_run.steps) above += s.duration > 0.0;
  const double sign = above % 2 ? -1.0 : 1.0;
  EXPECT_LT((signed_run.final_state.amplitudes() - sign * refl.final_state.amplitudes()).norm(), 1e-9);
}

TEST(ExactQsp, EigenstateBreakdownCarriesStep) {
  try {
    exact_qsp(StateVector::basis(1, 0), kZ, roots({0.5}));
    FAIL();
  } catch (const EigenstateBreakdown& e) {
    EXPECT_EQ(e.step(), 0);
  }
  try {
    exact_qsp(StateVector::product("+"), kZ, roots({1.0, 1.0}));
    FAIL();
  } catch (const EigenstateBreakdown& e) {
    EXPECT_EQ(e.step(), 1);
  }
}

TEST(ExactQsp, GreedyOrderingReachesSameState) {
  const auto x = random_instance(5, 2, 4);
  RunOptions o;
  o.mode = RunMode::exact;
  o.step.ordering = RootOrdering::greedy_gap;
  const auto rep = dbqsp_run(x.psi, x.h, x.poly, 1, EstimationSpec::exact(), o);
  EXPECT_LT(rep.oracle_distance_raw, 1e-9);
}

TEST(GcStep, ZeroDurationIsIdentity) {
  std::mt19937_64 rng(1);
  const auto s = StateVector::random(2, rng), psi = StateVector::random(2, rng);
  const auto x = random_instance(1, 2, 1);
  for (int n : {1, 3, 8}) {
    const auto r = gc_step(s, psi, x.h, 0.0, 0.0, n);
    EXPECT_LT(state_distance(r.state, s), 1e-14);
    EXPECT_EQ(r.depth_added, 4u * n + 1);
    EXPECT_EQ(r.evolutions, 2u * n);
    EXPECT_EQ(r.reflections, 2u * n + 1);
  }
}

TEST(GcStep, ConvergesAtInverseSqrtN) {
  const auto plus = StateVector::product("+");
  const auto exact = apply_commutator_exp(plus, plus, kZ, -0.1);
  const double d1 = state_distance(gc_step(plus, plus, kZ, -0.1, 0.0, 1).state, exact);
  const double d100 = state_distance(gc_step(plus, plus, kZ, -0.1, 0.0, 100).state, exact);
  EXPECT_LE(d1, gc_step_bound(-0.1, 1));
  EXPECT_LT(d1, 0.2 * gc_step_bound(-0.1, 1));
  EXPECT_GT(d1 / d100, 7.0);
  EXPECT_LT(d1 / d100, 13.0);
  EXPECT_THROW(gc_step(plus, plus, kZ, 0.1, 0.0, 1), ContractViolation);
}

TEST(GcStep, EigenbasisMatchesLiteralComposition) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const auto x = random_instance(seed, 1 + static_cast<int>(seed % 4), 1);
    const auto s = StateVector::random(x.psi.n_qubits(), rng);
    const double dur = -0.05 - 0.1 * static_cast<double>(seed);
    const double th = 0.4 * static_cast<double>(seed);
    const int n = 1 + static_cast<int>(seed % 3);
    EXPECT_LT(state_distance(gc_step(s, x.psi, x.h, dur, th, n).state, gc_step_reference(s, x.psi, x.h, dur, th, n)),
              1e-12);
  }
}

// Property: the group commutator reproduces e^{a^2 [Psi,H]} to second order.
TEST(GcStep, LeadingOrderAgainstDenseOracle) {
  const auto x = random_instance(3, 2, 1);
  const Eigen::MatrixXcd h = to_dense(x.obs);
  const double s = -1e-4;
  const Eigen::VectorXcd want = oracle::commutator_exp(x.psi.amplitudes(), x.psi.amplitudes(), h, s);
  const auto got = gc_step(x.psi, x.psi, x.h, s, 0.0, 1).state;
  EXPECT_LT((got.amplitudes() - want).norm(), 8 * std::pow(std::abs(s), 1.5));
}

TEST(DbqiteStep, IsPhasedSwappedGroupCommutator) {
  const auto x = random_instance(12, 3, 1);
  for (double s : {0.01, 0.2, 0.9}) {
    const auto three = dbqite_step(x.psi, x.h, s);
    const auto g = gc_step_signed(x.psi, x.psi, x.h, s, 0.0, 1);
    EXPECT_LT((three.amplitudes() - std::exp(cplx(0, std::sqrt(s))) * g.state.amplitudes()).norm(), 1e-12);
  }
  EXPECT_THROW(dbqite_step(x.psi, x.h, -0.1), std::invalid_argument);
}

TEST(DbqspRun, CanonicalDepth) {
  const auto r = dbqsp_run(StateVector::product("+"), kZ, roots({0.0}), 1);
  EXPECT_EQ(r.total_depth, 5u);
  ASSERT_EQ(r.steps.size(), 1u);
  EXPECT_EQ(r.steps[0].depth_after, 5u);
}

TEST(DbqspRun, GroupCommutatorWithinBound) {
  const auto x = random_instance(2024, 3, 2, 0.0);
  const auto r = dbqsp_run(x.psi, x.h, x.poly, 4096);
  EXPECT_LE(r.oracle_distance_raw, gc_total_bound(2, r.zeta(), 4096));
  EXPECT_EQ(r.total_depth, depth_exact(2, 4096));
}

TEST(DbqspRun, SampledTracksExact) {
  const auto x = random_instance(2024, 3, 2, 0.0);
  RunOptions o;
  o.mode = RunMode::exact;
  const auto exact = dbqsp_run(x.psi, x.h, x.poly, 1, EstimationSpec::exact(), o);
  const auto est = EstimationSpec::sampling(ShotAllocation::uniform(x.obs, 1000000, false), 99);
  const auto a = dbqsp_run(x.psi, x.h, x.poly, 1, est, o);
  const auto b = dbqsp_run(x.psi, x.h, x.poly, 1, est, o);
  EXPECT_LT(state_distance(a.final_state, exact.final_state), 0.05);
  EXPECT_EQ(a.final_state.amplitudes(), b.final_state.amplitudes());
  ASSERT_TRUE(a.seed.has_value());
}

TEST(ApplySchedule, ExactReplaysExactQsp) {
  const auto x = random_instance(31, 3, 4);
  const auto rep = exact_qsp(x.psi, x.h, x.poly);
  const auto res = apply_schedule(x.psi, x.h, rep.schedule(), RunMode::exact);
  EXPECT_LT(state_distance(res.final_state, rep.final_state), 1e-12);
  EXPECT_EQ(res.trajectory.size(), 5u);
  EXPECT_EQ(apply_schedule(x.psi, x.h, rep.schedule(), RunMode::group_commutator, 3).total_depth, depth_exact(4, 3));
}

TEST(Depth, ClosedFormExamples) {
  EXPECT_EQ(depth_exact(1, 1), 5u);
  EXPECT_EQ(depth_exact(2, 1), 40u);
  EXPECT_EQ(depth_exact(3, 1), 285u);
  EXPECT_EQ(depth_exact(1, 2), 9u);
  EXPECT_EQ(depth_exact(0, 7), 0u);
  EXPECT_THROW(depth_exact(40, 32), ResourceError);
  EXPECT_TRUE(std::isinf(depth_exact_log10(0, 1)));
  EXPECT_NEAR(depth_exact_log10(3, 1), std::log10(285.0), 1e-12);
  EXPECT_GT(depth_exact_log10(40, 32), 19.0);
}

// Property: closed form, recursion and the primitive walker agree.
TEST(Depth, ThreeCountsAgree) {
  for (int k = 0; k <= 6; ++k) {
    for (int n = 1; n <= 40; ++n) {
      EXPECT_EQ(depth_exact(k, n), depth_recursion(k, n)) << k << "," << n;
      EXPECT_EQ(depth_exact(k, n), count_unfolded_depth(k, n)) << k << "," << n;
    }
  }
}

TEST(SufficientRepetitions, Examples) {
  EXPECT_EQ(sufficient_gc_repetitions(1, 1.0, 0.1), 8712u);
  EXPECT_EQ(sufficient_gc_repetitions(0, 3.0, 1e-3), 1u);
  const double r = static_cast<double>(sufficient_gc_repetitions(2, 1.0, 0.1)) /
                   static_cast<double>(sufficient_gc_repetitions(1, 1.0, 0.1));
  EXPECT_NEAR(r, 49.0, 0.01);
  // the prescribed N meets the total bound
  EXPECT_LE(gc_total_bound(2, 0.5, static_cast<int>(sufficient_gc_repetitions(2, 0.5, 0.1))), 0.1 + 1e-12);
}

TEST(StabilityBounds, Examples) {
  StabilityInputs a;
  a.k = 1;
  a.zeta = 1.0;
  a.delta_s = a.delta_theta = 0.01;
  EXPECT_NEAR(stability_bounds(a).parameter, 7.0 / 300.0, 1e-15);
  StabilityInputs z;
  z.k = 3;
  z.zeta = 0.5;
  const auto b = stability_bounds(z);
  EXPECT_EQ(b.parameter, 0.0);
  EXPECT_EQ(b.hamiltonian, 0.0);
  EXPECT_EQ(b.single_step, 0.0);
  EXPECT_EQ(b.k_step, 0.0);
  StabilityInputs c;
  c.k = 1;
  c.eta = 1.0;
  c.delta_e_step = c.delta_v_step = 0.001;
  EXPECT_NEAR(stability_bounds(c).single_step, 0.02, 1e-15);
}

TEST(Postselect, Examples) {
  EXPECT_NEAR(postselect_success_prob(StateVector::product("+"), kZ, 1.0, PolynomialSpec{}).probability, 1.0, 1e-15);
  EXPECT_NEAR(postselect_success_prob(StateVector::basis(1, 0), kZ, 1.0, roots({1.0})).probability, 0.0, 1e-15);
  PolynomialSpec half = roots({1.0});
  half.leading = 0.5;
  EXPECT_NEAR(postselect_success_prob(StateVector::product("+"), kZ, 1.0, half).probability, 0.5, 1e-15);
  PolynomialSpec big = roots({-3.0});
  const auto r = postselect_success_prob(StateVector::product("+"), kZ, 1.0, big);
  EXPECT_FALSE(r.within_unit_bound);
  EXPECT_GT(r.probability, 1.0);
}

TEST(RunReport, SerializesSteps) {
  const auto r = exact_qsp(StateVector::product("+"), kZ, roots({0.0}));
  std::ostringstream os;
  write_steps_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "k,re_z,im_z,E,V,s,theta,depth_after,dist_raw,dist_aligned");
  const nlohmann::json j = r;
  EXPECT_EQ(j.at("steps").size(), 1u);
  EXPECT_EQ(j.at("mode"), "exact");
}
