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

#include "dbqsp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dbqsp/errors.hpp"

namespace dbqsp {

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width does not match its columns");
  rows.push_back(std::move(row));
}

namespace {

// Numeric cells compare by value, the rest lexicographically.
bool cell_less(const std::string& a, const std::string& b) {
  char* ea = nullptr;
  char* eb = nullptr;
  const double x = std::strtod(a.c_str(), &ea);
  const double y = std::strtod(b.c_str(), &eb);
  const bool na = !a.empty() && *ea == '\0', nb = !b.empty() && *eb == '\0';
  if (na && nb) return x < y;
  if (na != nb) return na;
  return a < b;
}

}  // namespace

void Table::sort_rows() {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (cell_less(a[i], b[i])) return true;
      if (cell_less(b[i], a[i])) return false;
    }
    return false;
  });
}

void Table::write_csv(std::ostream& os) const {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
}

nlohmann::json Table::to_json() const { return {{"columns", columns}, {"rows", rows}}; }

Check check_le(std::string group, std::string name, double measured, double bound) {
  const bool ok = measured <= bound;
  return {std::move(group), std::move(name), measured, bound, bound - measured, ok};
}

Check check_in(std::string group, std::string name, double measured, double lo, double hi) {
  const bool ok = measured >= lo && measured <= hi;
  // bound records the nearer edge
  const double edge = std::abs(measured - lo) < std::abs(hi - measured) ? lo : hi;
  return {std::move(group), std::move(name), measured, edge, std::min(measured - lo, hi - measured), ok};
}

Check check_true(std::string group, std::string name, bool ok) {
  return {std::move(group), std::move(name), ok ? 1.0 : 0.0, 1.0, ok ? 0.0 : -1.0, ok};
}

bool ExperimentResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json ExperimentResult::summary() const {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : checks) {
    cells.push_back({{"group", c.group},
                     {"name", c.name},
                     {"measured", c.measured},
                     {"bound", c.bound},
                     {"margin", c.margin},
                     {"pass", c.pass}});
  }
  return {{"experiment", name}, {"pass", pass()}, {"cells", cells}, {"config_hash", config_hash},
          {"seconds", seconds}};
}

namespace {

bool compatible(const nlohmann::json& def, const nlohmann::json& val) {
  if (def.is_null()) return true;
  if (def.is_number()) return val.is_number();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) return val.is_array();
  if (def.is_object()) return val.is_object();
  return false;
}

nlohmann::json merge_at(const nlohmann::json& def, const nlohmann::json& user, const std::string& path) {
  if (!def.is_object() || !user.is_object()) {
    if (!compatible(def, user)) throw ConfigError("type mismatch at '" + path + "'");
    return user;
  }
  nlohmann::json out = def;
  for (const auto& [key, val] : user.items()) {
    const std::string sub = path.empty() ? key : path + "." + key;
    if (!def.contains(key)) throw ConfigError("unknown key '" + sub + "'");
    out[key] = merge_at(def[key], val, sub);
  }
  return out;
}

}  // namespace

nlohmann::json merge_config(const nlohmann::json& defaults, const nlohmann::json& user) {
  return merge_at(defaults, user, "");
}

void apply_override(nlohmann::json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  nlohmann::json* node = &config;
  std::stringstream ss(path);
  std::string seg, walked;
  std::vector<std::string> segs;
  while (std::getline(ss, seg, '.')) segs.push_back(seg);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    walked += (i ? "." : "") + segs[i];
    if (!node->is_object() || !node->contains(segs[i])) throw ConfigError("unknown key '" + walked + "'");
    node = &(*node)[segs[i]];
  }
  if (!compatible(*node, value)) throw ConfigError("type mismatch at '" + path + "'");
  *node = value;
}

std::string config_hash(const nlohmann::json& config) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentResult run_experiment(const nlohmann::json& config) {
  const std::string name = config.at("experiment").get<std::string>();
  const auto& info = find_experiment(name);
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult r = info.run(config);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.name = name;
  r.config_hash = config_hash(config);
  for (auto& [k, t] : r.tables) t.sort_rows();
  return r;
}

void write_result(const ExperimentResult& r, const nlohmann::json& config, const std::filesystem::path& dir,
                  OutputFormat fmt) {
  std::filesystem::create_directories(dir);
  if (fmt == OutputFormat::csv) {
    for (const auto& [name, t] : r.tables) {
      std::ofstream os(dir / (name + ".csv"));
      t.write_csv(os);
    }
  } else {
    nlohmann::json all;
    for (const auto& [name, t] : r.tables) all[name] = t.to_json();
    std::ofstream(dir / "tables.json") << all.dump(2) << '\n';
  }
  std::ofstream(dir / "summary.json") << r.summary().dump(2) << '\n';
  std::ofstream(dir / "config.json") << config.dump(2) << '\n';
}

Observable random_observable(int n_qubits, int n_terms, std::mt19937_64& rng, double target_norm, int locality) {
  if (n_qubits < 1) throw std::invalid_argument("n_qubits must be positive");
  const int k = std::clamp(locality, 1, n_qubits);
  // distinct strings of weight 1..k
  double possible = 0.0, choose = 1.0;
  for (int w = 1; w <= k; ++w) {
    choose = choose * (n_qubits - w + 1) / w;
    possible += choose * std::pow(3.0, w);
  }
  const int target = std::max(1, static_cast<int>(std::min<double>(n_terms, possible)));
  std::uniform_int_distribution<int> pick_w(1, k), pick_q(0, n_qubits - 1), pick_l(0, 2);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  std::set<std::string> seen;
  std::vector<PauliTerm> terms;
  while (static_cast<int>(terms.size()) < target) {
    PauliString p(n_qubits);
    const int w = pick_w(rng);
    int placed = 0;
    while (placed < w) {
      const int q = pick_q(rng);
      if (p[q] != 'I') continue;
      p.set(q, "XYZ"[pick_l(rng)]);
      ++placed;
    }
    if (!seen.insert(p.str()).second) continue;
    double wt = 0.0;
    while (wt == 0.0) wt = weight(rng);
    terms.push_back({wt, p});
  }
  return normalized(Observable(n_qubits, std::move(terms)), target_norm);
}

Observable transverse_ising(int n_qubits, double g) {
  std::vector<PauliTerm> terms;
  for (int i = 0; i + 1 < n_qubits; ++i) {
    PauliString p(n_qubits);
    p.set(i, 'Z');
    p.set(i + 1, 'Z');
    terms.push_back({1.0, p});
  }
  for (int i = 0; i < n_qubits; ++i) {
    PauliString p(n_qubits);
    p.set(i, 'X');
    terms.push_back({g, p});
  }
  return Observable(n_qubits, std::move(terms));
}

Observable normalized(const Observable& h, double target_norm) {
  const double norm = Hamiltonian(h).spectral_norm();
  if (norm == 0.0) return h;
  return h.scaled(target_norm / norm);
}

std::vector<cplx> random_roots(int degree, std::mt19937_64& rng, double real_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<cplx> out;
  for (int k = 0; k < degree; ++k) {
    const double re = -1.5 + 3.0 * u(rng);
    if (u(rng) < real_fraction) {
      out.emplace_back(re, 0.0);
    } else {
      const double im = (0.1 + 0.9 * u(rng)) * (u(rng) < 0.5 ? -1.0 : 1.0);
      out.emplace_back(re, im);
    }
  }
  return out;
}

StateVector state_from_json(const nlohmann::json& j, int n_qubits) {
  if (j.is_string()) {
    const auto spec = j.get<std::string>();
    if (static_cast<int>(spec.size()) != n_qubits) throw DimensionError("state spec length != n_qubits");
    return StateVector::product(spec);
  }
  StateVector s = j.get<StateVector>();
  if (s.n_qubits() != n_qubits) throw DimensionError("state qubit count != n_qubits");
  return s;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace dbqsp
