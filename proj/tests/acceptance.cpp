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

// Runs every experiment at its default config and prints one line per
// acceptance criterion. Optional argv[1]: directory for the artifacts.

#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "dbqsp/harness.hpp"

namespace {

struct Criterion {
  const char* label;
  const char* experiment;
  const char* group;
};

const Criterion kCriteria[] = {
    {"exact synthesis", "verify", "exact_synthesis"},
    {"effective idempotence", "verify", "idempotence"},
    {"group-commutator order", "gc", "gc_order"},
    {"depth ledger", "depth", "depth"},
    {"duration bound", "verify", "duration"},
    {"parameter stability", "stability", "param_stability"},
    {"estimator suite", "estimate", "estimators"},
    {"shot allocation", "estimate", "allocation"},
    {"imaginary-time ground state", "qite", "qite"},
    {"matrix inversion", "invert", "inversion"},
    {"post-selection contrast", "compare", "postselect"},
};

}  // namespace

int main(int argc, char** argv) {
  std::map<std::string, dbqsp::ExperimentResult> results;
  for (const auto& c : kCriteria) {
    if (results.count(c.experiment)) continue;
    const auto& info = dbqsp::find_experiment(c.experiment);
    try {
      results[c.experiment] = dbqsp::run_experiment(info.defaults);
      if (argc > 1) {
        dbqsp::write_result(results[c.experiment], info.defaults, std::filesystem::path(argv[1]) / c.experiment);
      }
    } catch (const std::exception& e) {
      std::fprintf(stderr, "%s threw: %s\n", c.experiment, e.what());
      results[c.experiment].name = c.experiment;
      results[c.experiment].checks.push_back(dbqsp::check_true("exception", e.what(), false));
    }
  }
  int failed = 0;
  for (const auto& c : kCriteria) {
    const auto& r = results[c.experiment];
    int n = 0, bad = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::string worst_name;
    for (const auto& ch : r.checks) {
      if (ch.group != c.group && ch.group != "exception") continue;
      ++n;
      bad += !ch.pass;
      if (ch.margin < worst) {
        worst = ch.margin;
        worst_name = ch.name;
      }
    }
    const bool pass = n > 0 && bad == 0;
    failed += !pass;
    std::printf("[%s] %-28s %3d checks, %d failed, tightest %s margin %.3g (%s, %.1fs)\n", pass ? "PASS" : "FAIL",
                c.label, n, bad, worst_name.c_str(), worst, c.experiment, r.seconds);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(std::size(kCriteria)) - failed, std::size(kCriteria));
  return failed ? 1 : 0;
}
