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
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>

#include "dbqsp/csv.hpp"
#include "dbqsp/engine.hpp"
#include "dbqsp/errors.hpp"
#include "dbqsp/harness.hpp"
#include "dbqsp/sampling.hpp"

namespace dbqsp {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

template <class F>
void parallel_for(int n, F&& f) {
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
#pragma omp critical(dbqsp_cell_error)
      {
        if (!err) err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

double elapsed(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Welford {
  uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double var() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double se() const { return std::sqrt(var() / static_cast<double>(n)); }
};

// |mean - target| in standard errors; 0 for exact agreement with zero spread.
double z_score(const Welford& w, double target) {
  const double d = std::abs(w.mean - target);
  const double se = w.se();
  if (se == 0.0) return d < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
  return d / se;
}

uint64_t seed_of(const json& cfg) { return cfg.at("seed").get<uint64_t>(); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// ---------------------------------------------------------------- verify

json verify_defaults() {
  return {{"experiment", "verify"},
          {"seed", 1234},
          {"instance", {{"n_min", 2}, {"n_max", 6}, {"degree_max", 6}, {"terms_max", 8}, {"real_fraction", 0.5}}},
          {"sweep",
           {{"instances", 100},
            {"tolerance", 1e-9},
            {"idempotence_trials", 200},
            {"idempotence_tolerance", 1e-10},
            {"runtime_budget_s", 60.0}}}};
}

ExperimentResult verify_experiment(const json& cfg) {
  const auto t0 = Clock::now();
  const auto& in = cfg.at("instance");
  const auto& sw = cfg.at("sweep");
  const uint64_t seed = seed_of(cfg);
  const int count = sw.at("instances").get<int>();
  const double tol = sw.at("tolerance").get<double>();

  struct Cell {
    int n = 0, terms = 0, degree = 0, n_real = 0;
    double raw = 0, aligned = 0, max_step = 0, max_sgap = 0;
    std::string status = "ok";
    std::vector<StepRecord> steps;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(count));
  parallel_for(count, [&](int i) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<uint64_t>(i)));
    Cell& c = cells[static_cast<std::size_t>(i)];
    c.n = uniform_int(rng, in.at("n_min").get<int>(), in.at("n_max").get<int>());
    const Observable obs = random_observable(c.n, uniform_int(rng, 2, in.at("terms_max").get<int>()), rng);
    c.terms = static_cast<int>(obs.size());
    c.degree = uniform_int(rng, 1, in.at("degree_max").get<int>());
    PolynomialSpec poly;
    poly.roots = random_roots(c.degree, rng, in.at("real_fraction").get<double>());
    for (const auto& z : poly.roots) c.n_real += z.imag() == 0.0;
    const StateVector psi0 = StateVector::random(c.n, rng);
    try {
      const RunReport rep = exact_qsp(psi0, Hamiltonian(obs), poly);
      c.raw = rep.oracle_distance_raw;
      c.aligned = rep.oracle_distance_aligned;
      for (const auto& s : rep.steps) {
        c.max_step = std::max(c.max_step, s.exact_distance);
        const double gap = std::abs(s.energy - s.root);
        if (gap > 1e-9) c.max_sgap = std::max(c.max_sgap, std::abs(s.duration) * gap);
      }
      c.steps = rep.steps;
    } catch (const EigenstateBreakdown&) {
      c.status = "breakdown";
    } catch (const OracleBreakdown&) {
      c.status = "annihilated";
    }
  });

  ExperimentResult r;
  Table& t = r.tables["instances"];
  t.columns = {"instance", "n_qubits", "n_terms", "degree", "n_real_roots", "dist_raw", "dist_aligned",
               "max_step_dist", "max_s_gap", "status"};
  Table& st = r.tables["steps"];
  st.columns = {"instance", "k", "re_z", "im_z", "E", "V", "s", "theta", "dist_raw", "dist_aligned"};
  int failed = 0;
  double max_dist = 0.0, max_sgap = 0.0;
  for (int i = 0; i < count; ++i) {
    const Cell& c = cells[static_cast<std::size_t>(i)];
    const bool ok = c.status == "ok" && c.raw < tol && c.max_step < tol;
    failed += !ok;
    max_dist = std::max({max_dist, c.raw, c.max_step});
    max_sgap = std::max(max_sgap, c.max_sgap);
    t.add({num(i), num(c.n), num(c.terms), num(c.degree), num(c.n_real), num(c.raw), num(c.aligned),
           num(c.max_step), num(c.max_sgap), ok ? c.status : "fail:" + c.status});
    for (const auto& s : c.steps) {
      st.add({num(i), num(s.k), num(s.root.real()), num(s.root.imag()), num(s.energy), num(s.variance),
              num(s.duration), num(s.phase), num(s.exact_distance), num(s.aligned_distance)});
    }
  }
  r.checks.push_back(check_le("exact_synthesis", "failed_instances", failed, 0));
  r.checks.push_back(check_le("exact_synthesis", "max_oracle_distance", max_dist, tol));
  r.checks.push_back(check_le("duration", "max_abs_s_times_gap", max_sgap, 1.0 + 1e-12));

  // single-qubit canonical case
  {
    PolynomialSpec poly;
    poly.roots = {0.0};
    const RunReport rep = exact_qsp(StateVector::product("+"), Hamiltonian(Observable(1, {{1.0, PauliString("Z")}})), poly);
    const double d = state_distance(rep.final_state, StateVector::product("-"));
    r.checks.push_back(check_le("exact_synthesis", "canonical_plus_Z_root0", d, tol));
    t.add({"canonical", "1", "1", "1", "1", num(rep.oracle_distance_raw), num(rep.oracle_distance_aligned),
           num(rep.oracle_distance_raw), num(std::abs(rep.steps[0].duration) * std::abs(rep.steps[0].energy)),
           d < tol ? "ok" : "fail:ok"});
  }
  // eigenstate start: expected failure
  {
    PolynomialSpec poly;
    poly.roots = {0.5};
    bool caught = false;
    try {
      exact_qsp(StateVector::basis(1, 0), Hamiltonian(Observable(1, {{1.0, PauliString("Z")}})), poly);
    } catch (const EigenstateBreakdown& e) {
      caught = e.step() == 0;
    }
    r.checks.push_back(check_true("exact_synthesis", "eigenstate_expected_failure", caught));
    t.add({"eigenstate", "1", "1", "1", "1", "nan", "nan", "nan", "nan", caught ? "expected_breakdown" : "fail:no_breakdown"});
  }

  // ([Psi,H])^3 v + V [Psi,H] v = 0
  const int trials = sw.at("idempotence_trials").get<int>();
  std::vector<std::pair<int, double>> idem(static_cast<std::size_t>(trials));
  parallel_for(trials, [&](int i) {
    std::mt19937_64 rng(derive_seed(seed ^ 0x1D3Bu, static_cast<uint64_t>(i)));
    const int n = uniform_int(rng, 1, 6);
    const Hamiltonian h(random_observable(n, uniform_int(rng, 1, 8), rng));
    const StateVector psi = StateVector::random(n, rng);
    const StateVector v = StateVector::random(n, rng);
    const Eigen::VectorXcd hp = h.apply(psi.amplitudes());
    const Eigen::VectorXcd w1 = commutator_apply(v.amplitudes(), psi.amplitudes(), hp);
    const Eigen::VectorXcd w3 = commutator_apply(commutator_apply(w1, psi.amplitudes(), hp), psi.amplitudes(), hp);
    const double var = energy_stats(psi, h).variance;
    idem[static_cast<std::size_t>(i)] = {n, (w3 + var * w1).norm()};
  });
  Table& it = r.tables["idempotence"];
  it.columns = {"trial", "n_qubits", "residual"};
  double max_res = 0.0;
  for (int i = 0; i < trials; ++i) {
    it.add({num(i), num(idem[static_cast<std::size_t>(i)].first), num(idem[static_cast<std::size_t>(i)].second)});
    max_res = std::max(max_res, idem[static_cast<std::size_t>(i)].second);
  }
  r.checks.push_back(check_le("idempotence", "max_residual", max_res, sw.at("idempotence_tolerance").get<double>()));
  r.checks.push_back(check_le("exact_synthesis", "runtime_s", elapsed(t0), sw.at("runtime_budget_s").get<double>()));
  return r;
}

// ---------------------------------------------------------------- gc

json gc_defaults() {
  return {{"experiment", "gc"},
          {"seed", 1234},
          {"instance", {{"instances", 5}, {"n_max", 3}, {"degree_max", 2}, {"terms_max", 6}}},
          {"sweep",
           {{"N_min", 4}, {"N_max", 4096}, {"slope_lo", -0.6}, {"slope_hi", -0.4}, {"runtime_budget_s", 300.0}}}};
}

ExperimentResult gc_experiment(const json& cfg) {
  const auto t0 = Clock::now();
  const auto& in = cfg.at("instance");
  const auto& sw = cfg.at("sweep");
  const uint64_t seed = seed_of(cfg);
  const int count = in.at("instances").get<int>();

  struct Inst {
    Hamiltonian h;
    StateVector psi0;
    int n = 0, k = 0;
    std::vector<StepParams> schedule;
    StateVector exact;
    double zeta = 0.0;
  };
  std::vector<Inst> insts(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Inst& x = insts[static_cast<std::size_t>(i)];
    PolynomialSpec poly;
    if (i == 0) {
      x.n = 1;
      x.h = Hamiltonian(Observable(1, {{1.0, PauliString("Z")}}));
      x.psi0 = StateVector::product("+");
      poly.roots = {0.0};
    } else {
      std::mt19937_64 rng(derive_seed(seed, static_cast<uint64_t>(i)));
      x.n = uniform_int(rng, 1, in.at("n_max").get<int>());
      x.h = Hamiltonian(random_observable(x.n, uniform_int(rng, 2, in.at("terms_max").get<int>()), rng));
      x.psi0 = StateVector::random(x.n, rng);
      poly.roots = random_roots(uniform_int(rng, 1, in.at("degree_max").get<int>()), rng);
    }
    const RunReport rep = exact_qsp(x.psi0, x.h, poly);
    x.k = static_cast<int>(poly.degree());
    x.schedule = rep.schedule();
    x.exact = rep.final_state;
    x.zeta = rep.zeta();
  }
  std::vector<int> ns;
  for (int n = sw.at("N_min").get<int>(); n <= sw.at("N_max").get<int>(); n *= 2) ns.push_back(n);
  const int n_cells = count * static_cast<int>(ns.size());
  std::vector<std::pair<double, double>> dist(static_cast<std::size_t>(n_cells));
  parallel_for(n_cells, [&](int c) {
    const Inst& x = insts[static_cast<std::size_t>(c) / ns.size()];
    const int n = ns[static_cast<std::size_t>(c) % ns.size()];
    const auto res = apply_schedule(x.psi0, x.h, x.schedule, RunMode::group_commutator, n);
    dist[static_cast<std::size_t>(c)] = {state_distance(res.final_state, x.exact),
                                         state_distance(res.final_state, x.exact, true)};
  });

  ExperimentResult r;
  Table& t = r.tables["points"];
  t.columns = {"instance", "n_qubits", "K", "N", "zeta", "dist_raw", "dist_aligned", "bound"};
  Table& ft = r.tables["fits"];
  ft.columns = {"instance", "n_qubits", "K", "zeta", "slope", "ratio_N_4N_mean"};
  double worst_ratio = 0.0;
  for (int i = 0; i < count; ++i) {
    const Inst& x = insts[static_cast<std::size_t>(i)];
    std::vector<double> xs, ys;
    double ratio_sum = 0.0;
    int ratio_n = 0;
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const auto [raw, aligned] = dist[static_cast<std::size_t>(i) * ns.size() + j];
      const double bound = gc_total_bound(x.k, x.zeta, ns[j]);
      worst_ratio = std::max(worst_ratio, raw / bound);
      t.add({num(i), num(x.n), num(x.k), num(ns[j]), num(x.zeta), num(raw), num(aligned), num(bound)});
      xs.push_back(ns[j]);
      ys.push_back(raw);
      if (j + 2 < ns.size()) {
        ratio_sum += raw / dist[static_cast<std::size_t>(i) * ns.size() + j + 2].first;
        ++ratio_n;
      }
    }
    const double slope = loglog_slope(xs, ys);
    ft.add({num(i), num(x.n), num(x.k), num(x.zeta), num(slope), num(ratio_n ? ratio_sum / ratio_n : 0.0)});
    r.checks.push_back(check_in("gc_order", "slope_instance_" + std::to_string(i), slope,
                                sw.at("slope_lo").get<double>(), sw.at("slope_hi").get<double>()));
  }
  r.checks.push_back(check_le("gc_order", "max_distance_over_bound", worst_ratio, 1.0));
  r.checks.push_back(check_le("gc_order", "runtime_s", elapsed(t0), sw.at("runtime_budget_s").get<double>()));
  return r;
}

// ---------------------------------------------------------------- depth

json depth_defaults() {
  return {{"experiment", "depth"},
          {"seed", 1234},
          {"instance", {{"n_qubits", 2}, {"terms", 4}}},
          {"sweep", {{"K_max", 4}, {"N_max", 32}}}};
}

ExperimentResult depth_experiment(const json& cfg) {
  const auto& in = cfg.at("instance");
  const auto& sw = cfg.at("sweep");
  const int k_max = sw.at("K_max").get<int>();
  const int n_max = sw.at("N_max").get<int>();
  std::mt19937_64 rng(derive_seed(seed_of(cfg), 0));
  const int nq = in.at("n_qubits").get<int>();
  const Hamiltonian h(random_observable(nq, in.at("terms").get<int>(), rng));
  const StateVector psi0 = StateVector::random(nq, rng);
  const std::vector<cplx> roots = random_roots(k_max, rng, 0.0);

  const int cells = (k_max + 1) * n_max;
  struct Row {
    uint64_t closed = 0, rec = 0, walk = 0, run = 0;
    double log10 = 0.0;
  };
  std::vector<Row> rows(static_cast<std::size_t>(cells));
  parallel_for(cells, [&](int c) {
    const int k = c / n_max, n = c % n_max + 1;
    Row& row = rows[static_cast<std::size_t>(c)];
    row.closed = depth_exact(k, n);
    row.rec = depth_recursion(k, n);
    row.walk = count_unfolded_depth(k, n);
    PolynomialSpec poly;
    poly.roots.assign(roots.begin(), roots.begin() + k);
    row.run = dbqsp_run(psi0, h, poly, n).total_depth;
    row.log10 = depth_exact_log10(k, n);
  });
  ExperimentResult r;
  Table& t = r.tables["grid"];
  t.columns = {"K", "N", "closed_form", "recursion", "walker", "run_counted", "log10_depth"};
  int mismatched = 0;
  for (int c = 0; c < cells; ++c) {
    const Row& row = rows[static_cast<std::size_t>(c)];
    mismatched += !(row.closed == row.rec && row.rec == row.walk && row.walk == row.run);
    t.add({num(c / n_max), num(c % n_max + 1), num(row.closed), num(row.rec), num(row.walk), num(row.run),
           num(row.log10)});
  }
  r.checks.push_back(check_le("depth", "mismatched_cells", mismatched, 0));
  const uint64_t spots[] = {0, 5, 40, 285};
  for (int k = 0; k <= std::min(3, k_max); ++k) {
    r.checks.push_back(check_true("depth", "spot_K" + std::to_string(k) + "_N1",
                                  rows[static_cast<std::size_t>(k * n_max)].run == spots[k] &&
                                      depth_exact(k, 1) == spots[k]));
  }
  return r;
}

// ---------------------------------------------------------------- stability

json stability_defaults() {
  return {{"experiment", "stability"},
          {"seed", 1234},
          {"instance", {{"instances", 10}, {"n_max", 3}, {"K_max", 3}, {"terms_max", 6}, {"norm", 0.9}}},
          {"sweep",
           {{"deltas", {1e-3, 1e-2}},
            {"trials", 20},
            {"h_deltas", {1e-3, 1e-2}},
            {"budgets", {1000, 10000, 100000, 1000000}},
            {"replicas", 20},
            {"sampled_K", 2}}}};
}

Eigen::MatrixXcd random_hermitian(Eigen::Index dim, double norm, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = cplx(g(rng), g(rng));
  }
  Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
  const double sn = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm).eigenvalues().cwiseAbs().maxCoeff();
  return herm * (norm / sn);
}

ExperimentResult stability_experiment(const json& cfg) {
  const auto& in = cfg.at("instance");
  const auto& sw = cfg.at("sweep");
  const uint64_t seed = seed_of(cfg);
  const int count = in.at("instances").get<int>();
  const int k_max = in.at("K_max").get<int>();
  const auto deltas = sw.at("deltas").get<std::vector<double>>();
  const auto h_deltas = sw.at("h_deltas").get<std::vector<double>>();
  const int trials = sw.at("trials").get<int>();

  struct Cell {
    int n = 0, k = 0;
    double zeta = 0.0;
    std::vector<std::array<double, 3>> param;  // delta, worst deviation, bound
    std::vector<std::array<double, 4>> ham;    // target, measured norm, deviation, bound
    std::string status = "ok";
  };
  const int cells_n = count * k_max;
  std::vector<Cell> cells(static_cast<std::size_t>(cells_n));
  parallel_for(cells_n, [&](int c) {
    Cell& cell = cells[static_cast<std::size_t>(c)];
    std::mt19937_64 rng(derive_seed(seed, static_cast<uint64_t>(c)));
    cell.k = c % k_max + 1;
    cell.n = uniform_int(rng, 1, in.at("n_max").get<int>());
    const Observable obs = random_observable(cell.n, uniform_int(rng, 2, in.at("terms_max").get<int>()), rng,
                                             in.at("norm").get<double>());
    const Hamiltonian h(obs);
    const StateVector psi0 = StateVector::random(cell.n, rng);
    PolynomialSpec poly;
    poly.roots = random_roots(cell.k, rng);
    RunReport rep;
    try {
      rep = exact_qsp(psi0, h, poly);
    } catch (const EigenstateBreakdown&) {
      cell.status = "breakdown";
      return;
    }
    const auto ideal = rep.schedule();
    cell.zeta = rep.zeta();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double d : deltas) {
      double worst = 0.0;
      for (int t = 0; t < trials; ++t) {
        auto pert = ideal;
        for (auto& p : pert) {
          p.s += d * u(rng);
          p.theta += d * u(rng);
        }
        const auto res = apply_schedule(psi0, h, pert, RunMode::exact);
        worst = std::max(worst, state_distance(res.final_state, rep.final_state));
      }
      StabilityInputs si;
      si.k = cell.k;
      si.zeta = cell.zeta;
      si.delta_s = si.delta_theta = d;
      cell.param.push_back({d, worst, stability_bounds(si).parameter});
    }
    for (double d : h_deltas) {
      const Eigen::MatrixXcd dh = random_hermitian(h.dim(), d, rng);
      const Hamiltonian ht = Hamiltonian::from_dense(h.dense() + dh);
      const auto res = apply_schedule(psi0, ht, ideal, RunMode::exact);
      const double dev = state_distance(res.final_state, rep.final_state);
      const double dn = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(dh).eigenvalues().cwiseAbs().maxCoeff();
      StabilityInputs si;
      si.k = cell.k;
      si.zeta = cell.zeta;
      si.delta_h = dn;
      cell.ham.push_back({d, dn, dev, stability_bounds(si).hamiltonian});
    }
  });

  ExperimentResult r;
  Table& pt = r.tables["parameter"];
  pt.columns = {"cell", "n_qubits", "K", "zeta", "delta", "trials", "max_deviation", "bound"};
  Table& ht = r.tables["hamiltonian"];
  ht.columns = {"cell", "n_qubits", "K", "zeta", "delta_h", "norm_delta_h", "deviation", "bound"};
  double worst_param = 0.0, worst_ham = 0.0;
  int breakdowns = 0;
  for (int c = 0; c < cells_n; ++c) {
    const Cell& cell = cells[static_cast<std::size_t>(c)];
    breakdowns += cell.status != "ok";
    for (const auto& p : cell.param) {
      worst_param = std::max(worst_param, p[1] / p[2]);
      pt.add({num(c), num(cell.n), num(cell.k), num(cell.zeta), num(p[0]), num(trials), num(p[1]), num(p[2])});
    }
    for (const auto& h : cell.ham) {
      worst_ham = std::max(worst_ham, h[2] / h[3]);
      ht.add({num(c), num(cell.n), num(cell.k), num(cell.zeta), num(h[0]), num(h[1]), num(h[2]), num(h[3])});
    }
  }
  r.checks.push_back(check_le("param_stability", "max_deviation_over_bound", worst_param, 1.0));
  r.checks.push_back(check_le("param_stability", "breakdown_cells", breakdowns, 0));
  r.checks.push_back(check_le("hamiltonian_stability", "max_deviation_over_bound", worst_ham, 1.0));

  // sampled estimation, exact unitaries
  const int sk = sw.at("sampled_K").get<int>();
  std::mt19937_64 rng(derive_seed(seed, 0xC6u));
  const Observable obs = random_observable(2, 4, rng, in.at("norm").get<double>());
  const Hamiltonian h(obs);
  const StateVector psi0 = StateVector::random(2, rng);
  PolynomialSpec poly;
  for (int k = 0; k < sk; ++k) {
    poly.roots.emplace_back(std::uniform_real_distribution<double>(-1.0, 1.0)(rng), k % 2 ? -0.7 : 0.7);
  }
  const RunReport ideal = exact_qsp(psi0, h, poly);
  const auto budgets = sw.at("budgets").get<std::vector<uint64_t>>();
  const int reps = sw.at("replicas").get<int>();
  RunOptions ro;
  ro.mode = RunMode::exact;
  struct Rep {
    double dev = 0, de = 0, dv = 0, eta = 1;
    bool ok = true;
  };
  std::vector<Rep> out(budgets.size() * static_cast<std::size_t>(reps));
  parallel_for(static_cast<int>(out.size()), [&](int c) {
    const std::size_t b = static_cast<std::size_t>(c) / static_cast<std::size_t>(reps);
    Rep& x = out[static_cast<std::size_t>(c)];
    try {
      const auto est = EstimationSpec::sampling(ShotAllocation::uniform(obs, budgets[b], false),
                                                derive_seed(seed, 0x5A000000u + static_cast<uint64_t>(c)));
      const RunReport noisy = dbqsp_run(psi0, h, poly, 1, est, ro);
      x.dev = state_distance(noisy.final_state, ideal.final_state);
      double zmax = 0.0;
      for (const auto& z : poly.roots) zmax = std::max(zmax, std::abs(z));
      x.eta = 1.0 + zmax;
      for (std::size_t k = 0; k < ideal.steps.size(); ++k) {
        const auto& a = ideal.steps[k];
        const auto& e = noisy.steps[k];
        x.de = std::max(x.de, std::abs(a.energy - e.energy));
        x.dv = std::max(x.dv, std::abs(a.variance - e.variance));
        x.eta = std::max({x.eta, 1.0 / std::sqrt(a.variance), 1.0 / std::sqrt(std::max(e.variance, 1e-300)),
                          1.0 / std::abs(a.energy - a.root), 1.0 / std::abs(e.energy - e.root)});
      }
    } catch (const EigenstateBreakdown&) {
      x.ok = false;
    }
  });
  Table& et = r.tables["estimation"];
  et.columns = {"budget", "replicas", "breakdowns", "mean_deviation", "max_delta_E", "max_delta_V", "eta", "bound"};
  std::vector<double> means;
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    Welford dev;
    double de = 0, dv = 0, eta = 1;
    int bd = 0;
    for (int k = 0; k < reps; ++k) {
      const Rep& x = out[b * static_cast<std::size_t>(reps) + static_cast<std::size_t>(k)];
      if (!x.ok) {
        ++bd;
        continue;
      }
      dev.add(x.dev);
      de = std::max(de, x.de);
      dv = std::max(dv, x.dv);
      eta = std::max(eta, x.eta);
    }
    StabilityInputs si;
    si.k = sk;
    si.delta_e = de;
    si.delta_v = dv;
    si.eta = eta;
    means.push_back(dev.mean);
    et.add({num(budgets[b]), num(reps), num(bd), num(dev.mean), num(de), num(dv), num(eta),
            num(stability_bounds(si).k_step)});
  }
  bool monotone = true;
  for (std::size_t b = 1; b < means.size(); ++b) monotone = monotone && means[b] < means[b - 1];
  r.checks.push_back(check_true("estimation_stability", "mean_deviation_decreases_with_budget", monotone));
  return r;
}

// ---------------------------------------------------------------- qite

json qite_defaults() {
  return {{"experiment", "qite"},
          {"seed", 1234},
          {"instance", {{"n_qubits", 4}, {"g", 1.0}, {"state", "----"}}},
          {"sweep", {{"steps", 10}, {"alpha_shift", 0.0}, {"fidelity_min", 0.99}, {"gc_N", 1}}}};
}

ExperimentResult qite_experiment(const json& cfg) {
  const auto& in = cfg.at("instance");
  const auto& sw = cfg.at("sweep");
  const int nq = in.at("n_qubits").get<int>();
  const Observable obs = normalized(transverse_ising(nq, in.at("g").get<double>()));
  const Hamiltonian h(obs);
  const StateVector psi0 = state_from_json(in.at("state"), nq);
  const Spectrum& sp = h.spectrum();
  const double alpha = sp.values[sp.values.size() - 1] + sw.at("alpha_shift").get<double>();
  const Eigen::VectorXcd ground = sp.vectors.col(0);
  const int steps = sw.at("steps").get<int>();
  PolynomialSpec poly;
  poly.roots.assign(static_cast<std::size_t>(steps), cplx(alpha, 0.0));

  auto fidelity = [&](const StateVector& s) { return std::norm(ground.dot(s.amplitudes())); };

  ExperimentResult r;
  Table& t = r.tables["trajectory"];
  t.columns = {"mode", "k", "E", "V", "s", "theta", "fidelity"};

  const RunReport ex = exact_qsp(psi0, h, poly);
  const auto traj = apply_schedule(psi0, h, ex.schedule(), RunMode::exact).trajectory;
  std::vector<double> energies, fids;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const EnergyStats st = energy_stats(traj[k], h);
    energies.push_back(st.energy);
    fids.push_back(fidelity(traj[k]));
    const double s = k < ex.steps.size() ? ex.steps[k].duration : 0.0;
    const double th = k < ex.steps.size() ? ex.steps[k].phase : 0.0;
    t.add({"exact", num(static_cast<int>(k)), num(st.energy), num(st.variance), num(s), num(th), num(fids.back())});
  }
  bool dec = true, mono = true;
  double max_step_change = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < energies.size(); ++k) {
    dec = dec && energies[k] < energies[k - 1];
    mono = mono && fids[k] >= fids[k - 1];
    max_step_change = std::max(max_step_change, energies[k] - energies[k - 1]);
  }
  r.checks.push_back(check_true("qite", "energy_strictly_decreasing", dec));
  r.checks.push_back(check_le("qite", "max_energy_increment", max_step_change, 0.0));
  r.checks.push_back(check_true("qite", "fidelity_monotone", mono));
  r.checks.push_back(check_le("qite", "one_minus_final_fidelity", 1.0 - fids.back(),
                              1.0 - sw.at("fidelity_min").get<double>()));

  // signed-duration exact run agrees up to (-1)^K
  RunOptions so;
  so.step.real_root = RealRootMode::signed_duration;
  so.mode = RunMode::exact;
  const RunReport signed_exact = dbqsp_run(psi0, h, poly, 1, EstimationSpec::exact(), so);
  r.checks.push_back(
      check_le("qite", "signed_vs_reflection_aligned", state_distance(signed_exact.final_state, ex.final_state, true), 1e-9));

  // GC with N repetitions and theta = 0 is the three-exponential step
  so.mode = RunMode::group_commutator;
  const int gn = sw.at("gc_N").get<int>();
  const RunReport gc = dbqsp_run(psi0, h, poly, gn, EstimationSpec::exact(), so);
  const auto gtraj = apply_schedule(psi0, h, gc.schedule(), RunMode::group_commutator, gn).trajectory;
  double max_equiv = 0.0;
  bool theta_zero = true;
  for (std::size_t k = 0; k < gtraj.size(); ++k) {
    const EnergyStats st = energy_stats(gtraj[k], h);
    const double s = k < gc.steps.size() ? gc.steps[k].duration : 0.0;
    const double th = k < gc.steps.size() ? gc.steps[k].phase : 0.0;
    t.add({"gc", num(static_cast<int>(k)), num(st.energy), num(st.variance), num(s), num(th), num(fidelity(gtraj[k]))});
    if (k < gc.steps.size() && gn == 1) {
      theta_zero = theta_zero && th == 0.0 && s > 0.0;
      const StateVector three = dbqite_step(gtraj[k], h, s);
      const GcStepResult g = gc_step_signed(gtraj[k], gtraj[k], h, s, 0.0, 1);
      const Eigen::VectorXcd phased = std::exp(cplx(0.0, std::sqrt(s))) * g.state.amplitudes();
      max_equiv = std::max(max_equiv, (three.amplitudes() - phased).norm());
    }
  }
  r.checks.push_back(check_true("qite", "gc_steps_theta0_positive_s", theta_zero && gn == 1));
  r.checks.push_back(check_le("qite", "three_exponential_equivalence", max_equiv, 1e-10));

  // H = Z, |+>, alpha = 1: E_1 = -1, then breakdown
  {
    PolynomialSpec p2;
    p2.roots = {1.0, 1.0};
    const Hamiltonian z(Observable(1, {{1.0, PauliString("Z")}}));
    bool ok = false;
    try {
      exact_qsp(StateVector::product("+"), z, p2);
    } catch (const EigenstateBreakdown& e) {
      PolynomialSpec p1;
      p1.roots = {1.0};
      const double e1 = energy_stats(exact_qsp(StateVector::product("+"), z, p1).final_state, z).energy;
      ok = e.step() == 1 && std::abs(e1 + 1.0) < 1e-12;
    }
    r.checks.push_back(check_true("qite", "eigenstate_expected_failure", ok));
  }
  return r;
}

// ---------------------------------------------------------------- invert

json invert_defaults() {
  return {{"experiment", "invert"},
          {"seed", 1234},
          {"instance", {{"kappa", 2.0}, {"epsilon", 0.1}, {"b", {1.0, 1.0}}}},
          {"sweep", {{"kappas", {1.5, 2.0, 3.0, 4.0, 6.0, 8.0}}, {"depth_N", {1, 16}}}}};
}

ExperimentResult invert_experiment(const json& cfg) {
  const auto& in = cfg.at("instance");
  const auto& sw = cfg.at("sweep");
  const double kappa = in.at("kappa").get<double>();
  const double eps = in.at("epsilon").get<double>();
  const auto bv = in.at("b").get<std::vector<double>>();
  Eigen::VectorXcd b(static_cast<Eigen::Index>(bv.size()));
  for (std::size_t i = 0; i < bv.size(); ++i) b[static_cast<Eigen::Index>(i)] = bv[i];
  b.normalize();
  InverseApprox inv = inverse_approx(kappa, eps);
  if (!inv.roots_available) throw ResourceError("inverse polynomial degree above the root-finding cap");
  // Alternate the two ends of the real-part order; applying all negative
  // roots first drives two-level inputs to within 1e-12 of an eigenstate.
  {
    auto sorted = inv.poly.roots;
    std::stable_sort(sorted.begin(), sorted.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    std::vector<cplx> order;
    for (std::size_t lo = 0, hi = sorted.size(); lo < hi;) {
      order.push_back(sorted[lo++]);
      if (lo < hi) order.push_back(sorted[--hi]);
    }
    inv.poly.roots = order;
  }

  ExperimentResult r;
  Table& t = r.tables["cases"];
  t.columns = {"case", "kappa", "epsilon", "degree", "dist_raw", "dist_aligned", "oracle_dist_raw", "bound"};
  auto run_case = [&](const std::string& name, const Eigen::MatrixXcd& a) {
    const Dilation d = hermitian_dilation(a);
    const Eigen::Index half = d.h.dim() / 2;
    Eigen::VectorXcd in_vec = Eigen::VectorXcd::Zero(d.h.dim());
    in_vec.head(b.size()) = b;
    const StateVector input(d.h.n_qubits(), in_vec);
    const RunReport rep = exact_qsp(input, d.h, inv.poly);
    Eigen::VectorXcd target = Eigen::VectorXcd::Zero(d.h.dim());
    target.segment(half, b.size()) = a.partialPivLu().solve(b);
    const StateVector tgt(d.h.n_qubits(), target);
    const double raw = state_distance(rep.final_state, tgt);
    const double aligned = state_distance(rep.final_state, tgt, true);
    t.add({name, num(kappa), num(eps), num(inv.poly.degree()), num(raw), num(aligned), num(rep.oracle_distance_raw),
           num(2.0 * eps)});
    r.checks.push_back(check_le("inversion", "aligned_distance_" + name, aligned, 2.0 * eps + 1e-9));
    r.checks.push_back(check_le("inversion", "synthesis_distance_" + name, rep.oracle_distance_raw, 1e-9));
  };
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(b.size(), b.size());
  a(b.size() - 1, b.size() - 1) = 1.0 / kappa;
  run_case("diag", a);
  run_case("identity", Eigen::MatrixXcd::Identity(b.size(), b.size()));

  Table& dt = r.tables["depth"];
  dt.columns = {"kappa", "a", "K_sum", "degree", "N", "log10_depth"};
  for (double kap : sw.at("kappas").get<std::vector<double>>()) {
    const InverseApprox x = inverse_approx(kap, eps, kInverseCapA, 0);
    for (int n : sw.at("depth_N").get<std::vector<int>>()) {
      dt.add({num(kap), num(x.a), num(x.k), num(static_cast<int>(x.series.degree())), num(n),
              num(depth_exact_log10(static_cast<int>(x.series.degree()), n))});
    }
  }
  return r;
}

// ---------------------------------------------------------------- compare

json compare_defaults() {
  return {{"experiment", "compare"},
          {"seed", 1234},
          {"instance", {{"n_qubits", 3}, {"terms", 6}, {"K", 4}, {"alpha", 1.0}}},
          {"sweep",
           {{"gammas", {0.5, 0.1, 0.01, 0.001}},
            {"N", 16},
            {"gamma_ref", 0.5},
            {"gamma_small", 0.001},
            {"psucc_max", 0.01}}}};
}

ExperimentResult compare_experiment(const json& cfg) {
  const auto& in = cfg.at("instance");
  const auto& sw = cfg.at("sweep");
  std::mt19937_64 rng(derive_seed(seed_of(cfg), 0));
  const int nq = in.at("n_qubits").get<int>();
  const Observable obs = random_observable(nq, in.at("terms").get<int>(), rng);
  const Hamiltonian h(obs);
  const double alpha = in.at("alpha").get<double>();
  const int kdeg = in.at("K").get<int>();
  const int n = sw.at("N").get<int>();
  const Spectrum& sp = h.spectrum();
  const Eigen::Index dim = h.dim();
  Eigen::VectorXcd upper = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index i = dim / 2; i < dim; ++i) upper += sp.vectors.col(i);
  upper.normalize();

  // ((1 - x/alpha) / 2)^K in H
  PolynomialSpec poly;
  poly.leading = std::pow(cplx(-0.5 / alpha, 0.0), kdeg);
  poly.roots.assign(static_cast<std::size_t>(kdeg), cplx(alpha, 0.0));
  PolynomialSpec filt;  // same filter in x = H / alpha
  filt.leading = std::pow(cplx(-0.5, 0.0), kdeg);
  filt.roots.assign(static_cast<std::size_t>(kdeg), cplx(1.0, 0.0));
  const double w1 = one_norm(obs);

  ExperimentResult r;
  Table& t = r.tables["crossover"];
  t.columns = {"gamma", "p_succ", "repetitions", "lcu_product", "lcu_telescoped", "dbqsp_depth", "dbqsp_dist_raw"};
  std::map<double, uint64_t> depth_of;
  std::map<double, double> psucc_of;
  double worst_tel = 0.0;
  for (double gamma : sw.at("gammas").get<std::vector<double>>()) {
    const Eigen::VectorXcd v = std::sqrt(gamma) * sp.vectors.col(0) + std::sqrt(1.0 - gamma) * upper;
    const StateVector psi(nq, v);
    const double ps = postselect_success_prob(psi, h, alpha, filt).probability;
    double prod = 1.0;
    Eigen::VectorXcd cur = psi.amplitudes(), raw = psi.amplitudes();
    double denom = 1.0;
    for (const auto& z : poly.roots) {
      const Eigen::VectorXcd f = h.apply(cur) - z * cur;
      const double fn = f.norm();
      const double scale = std::abs(z) + w1;
      prod *= fn * fn / (scale * scale);
      cur = f / fn;
      raw = h.apply(raw) - z * raw;
      denom *= scale * scale;
    }
    const double tel = raw.squaredNorm() / denom;
    worst_tel = std::max(worst_tel, std::abs(prod - tel) / tel);
    const RunReport rep = dbqsp_run(psi, h, poly, n);
    depth_of[gamma] = rep.total_depth;
    psucc_of[gamma] = ps;
    t.add({num(gamma), num(ps), num(1.0 / ps), num(prod), num(tel), num(rep.total_depth),
           num(rep.oracle_distance_raw)});
  }
  {
    PolynomialSpec id;
    const StateVector psi(nq, upper);
    const double ps = postselect_success_prob(psi, h, alpha, id).probability;
    t.add({"identity", num(ps), num(1.0 / ps), "1", "1", "0", "0"});
    r.checks.push_back(check_le("postselect", "identity_psucc_error", std::abs(ps - 1.0), 1e-12));
  }
  const double gs = sw.at("gamma_small").get<double>(), gr = sw.at("gamma_ref").get<double>();
  if (!psucc_of.count(gs) || !psucc_of.count(gr)) throw ConfigError("gamma_small and gamma_ref must be in gammas");
  r.checks.push_back(check_le("postselect", "p_succ_gamma_small", psucc_of[gs], sw.at("psucc_max").get<double>()));
  r.checks.push_back(check_true("postselect", "depth_gamma_independent",
                                depth_of[gs] == depth_of[gr] && depth_of[gs] == depth_exact(kdeg, n)));
  r.checks.push_back(check_le("postselect", "lcu_telescoping_rel_err", worst_tel, 1e-12));
  return r;
}

// ---------------------------------------------------------------- estimate

json estimate_defaults() {
  return {{"experiment", "estimate"},
          {"seed", 1234},
          {"instance", {{"instances", 20}, {"n_max", 4}, {"terms_max", 5}, {"shots_min", 2}, {"shots_max", 30}}},
          {"sweep",
           {{"resamples", 100000},
            {"z_max", 4.0},
            {"var_rel_tol", 0.05},
            {"alloc_epsilons", {0.1, 0.05}},
            {"runtime_budget_s", 600.0}}}};
}

ExperimentResult estimate_experiment(const json& cfg) {
  const auto t0 = Clock::now();
  const auto& in = cfg.at("instance");
  const auto& sw = cfg.at("sweep");
  const uint64_t seed = seed_of(cfg);
  const int count = in.at("instances").get<int>();
  const int resamples = sw.at("resamples").get<int>();
  const double z_max = sw.at("z_max").get<double>();
  const double rel_tol = sw.at("var_rel_tol").get<double>();
  const auto epsilons = sw.at("alloc_epsilons").get<std::vector<double>>();

  struct TermRow {
    double p, n, expected, mc, z;
  };
  struct AllocRow {
    double eps;
    std::string guess;
    uint64_t total;
    double cap, var, lo, hi;
  };
  struct Cell {
    int n = 0, terms = 0;
    double truth = 0.0;
    Welford unb, alt, naive_gap;
    double expected_bias = 0.0;
    double f_unb = 0, f_alt = 0, f_uncorrected = 0;
    std::vector<TermRow> term_rows;
    std::vector<AllocRow> alloc_rows;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(count));
  parallel_for(count, [&](int i) {
    Cell& c = cells[static_cast<std::size_t>(i)];
    std::mt19937_64 rng(derive_seed(seed, static_cast<uint64_t>(i)));
    c.n = uniform_int(rng, 1, in.at("n_max").get<int>());
    const Observable h = random_observable(c.n, uniform_int(rng, 1, in.at("terms_max").get<int>()), rng);
    c.terms = static_cast<int>(h.size());
    const StateVector psi = StateVector::random(c.n, rng);
    const TermExpectations ex = true_expectations(psi, h);
    c.truth = energy_stats(psi, Hamiltonian(h)).variance;
    const int lo = in.at("shots_min").get<int>(), hi = in.at("shots_max").get<int>();
    ShotAllocation alloc = ShotAllocation::uniform(h, 0, true);
    for (auto& v : alloc.singles) v = static_cast<uint64_t>(uniform_int(rng, lo, hi));
    for (auto& [k, v] : alloc.pairs) v = static_cast<uint64_t>(uniform_int(rng, lo, hi));
    for (auto& [k, v] : alloc.joints) v = static_cast<uint64_t>(uniform_int(rng, lo, hi));

    std::vector<Welford> per_term(h.size());
    for (int rep = 0; rep < resamples; ++rep) {
      const TallySet t = draw_tallies(ex, alloc, rng);
      const VarianceEstimates ve = variance_estimators(h, t);
      c.unb.add(ve.unbiased);
      c.naive_gap.add(ve.unbiased - ve.naive);
      c.alt.add(alternative_variance_estimator(h, t));
      for (std::size_t j = 0; j < h.size(); ++j) {
        const double m = t.singles[j].mean();
        per_term[j].add(m * m - unbiased_square_estimator(t.singles[j].n, t.singles[j].sum));
      }
    }
    c.expected_bias = naive_bias(h, ex, alloc);
    for (std::size_t j = 0; j < h.size(); ++j) {
      const double p = ex.singles[j], nn = static_cast<double>(alloc.singles[j]);
      const double expect = (1.0 - p * p) / nn;
      c.term_rows.push_back({p, nn, expect, per_term[j].mean, z_score(per_term[j], expect)});
    }
    c.f_unb = estimator_variance_formula(h, ex, alloc, EstimatorKind::unbiased);
    c.f_alt = estimator_variance_formula(h, ex, alloc, EstimatorKind::alternative);
    c.f_uncorrected = estimator_variance_formula(h, ex, alloc, EstimatorKind::unbiased_uncorrected);

    // allocation, with independently recomputed weights
    for (double eps : epsilons) {
      for (int g = 0; g < 2; ++g) {
        const TermExpectations guess = g == 0 ? TermExpectations::zeros(h) : ex;
        const AllocationResult ar = allocate_shots(h, guess, eps);
        const auto& tm = h.terms();
        std::vector<std::pair<double, uint64_t>> weights;
        double s = 0.0;
        for (const auto& [k, nk] : ar.alloc.pairs) {
          const double q = guess.pairs.at(k);
          weights.push_back({std::abs(tm[k.first].weight * tm[k.second].weight) * std::sqrt(1.0 - q * q), nk});
        }
        for (const auto& [k, nk] : ar.alloc.joints) {
          const double pp = guess.singles[k.first] * guess.singles[k.second];
          weights.push_back({std::abs(tm[k.first].weight * tm[k.second].weight) * std::sqrt(1.0 - pp * pp), nk});
        }
        for (const auto& w : weights) s += w.first;
        // N - ideal over counts above the floor of 2; rounding puts it in [0, 1)
        double lo = 0.0, hi = 0.0;
        for (const auto& [w, nk] : weights) {
          const double ideal = w * s / (eps * eps);
          if (nk <= 2 && ideal <= 2.0) continue;
          lo = std::min(lo, static_cast<double>(nk) - ideal);
          hi = std::max(hi, static_cast<double>(nk) - ideal);
        }
        c.alloc_rows.push_back({eps, g == 0 ? "zeros" : "true", ar.total, ar.cap,
                                estimator_variance_formula(h, guess, ar.alloc, EstimatorKind::alternative), lo, hi});
      }
    }
  });

  ExperimentResult r;
  Table& et = r.tables["estimators"];
  et.columns = {"instance", "estimator", "true_value", "mc_mean", "mc_se", "z", "formula_var", "empirical_var",
                "rel_err", "uncorrected_formula_var"};
  Table& tt = r.tables["naive_bias"];
  tt.columns = {"instance", "term", "expectation", "shots", "bias_expected", "bias_mc", "z"};
  Table& at = r.tables["allocation"];
  at.columns = {"instance", "epsilon", "guess", "total", "cap", "var_formula", "eps_sq", "min_rounding_excess", "max_rounding_excess"};
  double z_unb = 0, z_alt = 0, z_bias = 0, rel_unb = 0, rel_alt = 0, excess_lo = 0, excess_hi = 0, over_cap = 0, over_var = 0;
  for (int i = 0; i < count; ++i) {
    const Cell& c = cells[static_cast<std::size_t>(i)];
    auto rel = [](double emp, double f) {
      if (f < 1e-12) return emp < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
      return std::abs(emp - f) / f;
    };
    const double ru = rel(c.unb.var(), c.f_unb), ra = rel(c.alt.var(), c.f_alt);
    const double zu = z_score(c.unb, c.truth), za = z_score(c.alt, c.truth), zb = z_score(c.naive_gap, c.expected_bias);
    et.add({num(i), "unbiased", num(c.truth), num(c.unb.mean), num(c.unb.se()), num(zu), num(c.f_unb), num(c.unb.var()),
            num(ru), num(c.f_uncorrected)});
    et.add({num(i), "alternative", num(c.truth), num(c.alt.mean), num(c.alt.se()), num(za), num(c.f_alt),
            num(c.alt.var()), num(ra), "nan"});
    et.add({num(i), "unbiased_minus_naive", num(c.expected_bias), num(c.naive_gap.mean), num(c.naive_gap.se()),
            num(zb), "nan", num(c.naive_gap.var()), "nan", "nan"});
    z_unb = std::max(z_unb, zu);
    z_alt = std::max(z_alt, za);
    z_bias = std::max(z_bias, zb);
    rel_unb = std::max(rel_unb, ru);
    rel_alt = std::max(rel_alt, ra);
    for (std::size_t j = 0; j < c.term_rows.size(); ++j) {
      const TermRow& x = c.term_rows[j];
      tt.add({num(i), num(static_cast<int>(j)), num(x.p), num(x.n), num(x.expected), num(x.mc), num(x.z)});
      z_bias = std::max(z_bias, x.z);
    }
    for (const auto& a : c.alloc_rows) {
      at.add({num(i), num(a.eps), a.guess, num(a.total), num(a.cap), num(a.var), num(a.eps * a.eps), num(a.lo), num(a.hi)});
      excess_lo = std::min(excess_lo, a.lo);
      excess_hi = std::max(excess_hi, a.hi);
      over_cap = std::max(over_cap, static_cast<double>(a.total) / a.cap);
      over_var = std::max(over_var, a.var / (a.eps * a.eps));
    }
  }
  r.checks.push_back(check_le("estimators", "max_z_unbiased", z_unb, z_max));
  r.checks.push_back(check_le("estimators", "max_z_alternative", z_alt, z_max));
  r.checks.push_back(check_le("estimators", "max_z_naive_bias", z_bias, z_max));
  r.checks.push_back(check_le("estimators", "max_rel_err_var_formula_unbiased", rel_unb, rel_tol));
  r.checks.push_back(check_le("estimators", "max_rel_err_var_formula_alternative", rel_alt, rel_tol));
  r.checks.push_back(check_le("estimators", "runtime_s", elapsed(t0), sw.at("runtime_budget_s").get<double>()));
  r.checks.push_back(check_le("allocation", "max_rounding_excess", excess_hi, 1.0));
  r.checks.push_back(check_le("allocation", "max_rounding_shortfall", -excess_lo, 1e-9));
  r.checks.push_back(check_le("allocation", "max_total_over_cap", over_cap, 1.0));
  r.checks.push_back(check_le("allocation", "max_var_over_eps_sq", over_var, 1.0 + 1e-12));
  return r;
}

// ---------------------------------------------------------------- run

json run_defaults() {
  return {{"experiment", "run"},
          {"seed", 1234},
          {"instance",
           {{"hamiltonian", {{"n_qubits", 1}, {"terms", json::array({json{{"w", 1.0}, {"p", "Z"}}})}}},
            {"state", "+"},
            {"poly", {{"leading", {1.0, 0.0}}, {"roots", json::array({json::array({0.0, 0.0})})}, {"provenance", "explicit"}}}}},
          {"sweep",
           {{"N", 16},
            {"mode", "group_commutator"},
            {"sampled", false},
            {"shots", 100000},
            {"real_root", "reflection"},
            {"ordering", "given"},
            {"tolerance", 1e-9}}}};
}

ExperimentResult run_single(const json& cfg) {
  const auto& in = cfg.at("instance");
  const auto& sw = cfg.at("sweep");
  const Observable obs = in.at("hamiltonian").get<Observable>();
  const Hamiltonian h(obs);
  const StateVector psi0 = state_from_json(in.at("state"), obs.n_qubits());
  const PolynomialSpec poly = in.at("poly").get<PolynomialSpec>();
  RunOptions ro;
  const auto mode = sw.at("mode").get<std::string>();
  if (mode != "exact" && mode != "group_commutator") throw ConfigError("sweep.mode must be exact or group_commutator");
  ro.mode = mode == "exact" ? RunMode::exact : RunMode::group_commutator;
  const auto rr = sw.at("real_root").get<std::string>();
  if (rr != "reflection" && rr != "signed_duration") throw ConfigError("sweep.real_root must be reflection or signed_duration");
  ro.step.real_root = rr == "reflection" ? RealRootMode::reflection : RealRootMode::signed_duration;
  const auto ord = sw.at("ordering").get<std::string>();
  if (ord != "given" && ord != "greedy_gap") throw ConfigError("sweep.ordering must be given or greedy_gap");
  ro.step.ordering = ord == "given" ? RootOrdering::given : RootOrdering::greedy_gap;
  EstimationSpec est;
  if (sw.at("sampled").get<bool>()) {
    est = EstimationSpec::sampling(ShotAllocation::uniform(obs, sw.at("shots").get<uint64_t>(), false), seed_of(cfg));
  }
  const int n = sw.at("N").get<int>();
  const RunReport rep = dbqsp_run(psi0, h, poly, n, est, ro);

  ExperimentResult r;
  Table& t = r.tables["steps"];
  t.columns = {"k", "re_z", "im_z", "E", "V", "s", "theta", "depth_after", "dist_raw", "dist_aligned"};
  for (const auto& s : rep.steps) {
    t.add({num(s.k), num(s.root.real()), num(s.root.imag()), num(s.energy), num(s.variance), num(s.duration),
           num(s.phase), num(s.depth_after), num(s.exact_distance), num(s.aligned_distance)});
  }
  const double dist = rr == "reflection" ? rep.oracle_distance_raw : rep.oracle_distance_aligned;
  if (est.sampled) {
    r.checks.push_back(check_le("run", "final_state_norm_drift", rep.final_state.norm_drift(), 1e-9));
  } else if (ro.mode == RunMode::exact) {
    r.checks.push_back(check_le("run", "oracle_distance", dist, sw.at("tolerance").get<double>()));
  } else {
    r.checks.push_back(check_le("run", "oracle_distance_vs_gc_bound", dist,
                                gc_total_bound(static_cast<int>(poly.degree()), rep.zeta(), n)));
    if (poly.degree() > 0) {
      r.checks.push_back(check_true("run", "depth_matches_closed_form",
                                    rep.total_depth == depth_exact(static_cast<int>(poly.degree()), n)));
    }
  }
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> reg = {
      {"verify", verify_defaults(), verify_experiment},
      {"gc", gc_defaults(), gc_experiment},
      {"depth", depth_defaults(), depth_experiment},
      {"stability", stability_defaults(), stability_experiment},
      {"qite", qite_defaults(), qite_experiment},
      {"invert", invert_defaults(), invert_experiment},
      {"compare", compare_defaults(), compare_experiment},
      {"estimate", estimate_defaults(), estimate_experiment},
      {"run", run_defaults(), run_single},
  };
  return reg;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry()) {
    if (e.name == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace dbqsp
