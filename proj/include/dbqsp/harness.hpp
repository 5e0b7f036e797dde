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

// Seeded experiments. Each one is a pure function of its JSON config
// {"experiment", "seed", "instance": {...}, "sweep": {...}}.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dbqsp/hamiltonian.hpp"
#include "dbqsp/pauli.hpp"
#include "dbqsp/polynomial.hpp"
#include "dbqsp/statevector.hpp"

namespace dbqsp {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  void sort_rows();
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
};

// One asserted inequality: measured <= bound (margin = bound - measured).
struct Check {
  std::string group;
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

Check check_le(std::string group, std::string name, double measured, double bound);
Check check_in(std::string group, std::string name, double measured, double lo, double hi);
Check check_true(std::string group, std::string name, bool ok);

struct ExperimentResult {
  std::string name;
  std::map<std::string, Table> tables;
  std::vector<Check> checks;
  std::string config_hash;
  double seconds = 0.0;

  bool pass() const;
  nlohmann::json summary() const;
};

using ExperimentFn = std::function<ExperimentResult(const nlohmann::json& config)>;

struct ExperimentInfo {
  std::string name;
  nlohmann::json defaults;  // full config with "experiment" and "seed"
  ExperimentFn run;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo& find_experiment(const std::string& name);

// Recursively rejects keys absent from the defaults and type changes.
nlohmann::json merge_config(const nlohmann::json& defaults, const nlohmann::json& user);
// "a.b.c=value"; value parsed as JSON, else kept as a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

std::string config_hash(const nlohmann::json& config);

ExperimentResult run_experiment(const nlohmann::json& config);

enum class OutputFormat { csv, json };

void write_result(const ExperimentResult& r, const nlohmann::json& config, const std::filesystem::path& dir,
                  OutputFormat fmt = OutputFormat::csv);

// Instance builders.

// k-local (k <= locality) Pauli sum, weights uniform in [-1, 1], rescaled so
// that the spectral norm equals target_norm.
Observable random_observable(int n_qubits, int n_terms, std::mt19937_64& rng, double target_norm = 1.0,
                             int locality = 2);
// sum Z_i Z_{i+1} + g sum X_i, open chain.
Observable transverse_ising(int n_qubits, double g);
Observable normalized(const Observable& h, double target_norm = 1.0);
// Real roots with probability real_fraction, otherwise complex.
std::vector<cplx> random_roots(int degree, std::mt19937_64& rng, double real_fraction = 0.5);
StateVector state_from_json(const nlohmann::json& j, int n_qubits);

// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dbqsp
