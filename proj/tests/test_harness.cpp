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

#include <fstream>
#include <sstream>

#include "dbqsp/harness.hpp"

using namespace dbqsp;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json small(const std::string& name, const json& patch) {
  json cfg = find_experiment(name).defaults;
  return merge_config(cfg, patch);
}

}  // namespace

TEST(Config, MergeRejectsUnknownKeysAndTypeChanges) {
  const json def = {{"a", 1}, {"b", {{"c", "x"}}}};
  EXPECT_EQ(merge_config(def, {{"a", 2}})["a"], 2);
  EXPECT_EQ(merge_config(def, {{"b", {{"c", "y"}}}})["b"]["c"], "y");
  EXPECT_THROW(merge_config(def, {{"z", 1}}), ConfigError);
  EXPECT_THROW(merge_config(def, {{"b", {{"d", 1}}}}), ConfigError);
  EXPECT_THROW(merge_config(def, {{"a", "text"}}), ConfigError);
}

TEST(Config, Override) {
  json cfg = {{"sweep", {{"N_max", 4096}, {"mode", "exact"}, {"list", {1, 2}}}}};
  apply_override(cfg, "sweep.N_max=1024");
  EXPECT_EQ(cfg["sweep"]["N_max"], 1024);
  apply_override(cfg, "sweep.mode=group_commutator");
  EXPECT_EQ(cfg["sweep"]["mode"], "group_commutator");
  apply_override(cfg, "sweep.list=[3,4,5]");
  EXPECT_EQ(cfg["sweep"]["list"].size(), 3u);
  EXPECT_THROW(apply_override(cfg, "sweep.nope=1"), ConfigError);
  EXPECT_THROW(apply_override(cfg, "sweep.N_max=abc"), ConfigError);
  EXPECT_THROW(apply_override(cfg, "no_equals"), ConfigError);
}

TEST(Config, HashIsStableAndSensitive) {
  const json a = {{"x", 1}, {"y", 2}};
  EXPECT_EQ(config_hash(a), config_hash(json::parse(R"({"y":2,"x":1})")));
  EXPECT_NE(config_hash(a), config_hash({{"x", 1}, {"y", 3}}));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Table, SortsNumericCellsByValue) {
  Table t;
  t.columns = {"id", "v"};
  t.add({"10", "a"});
  t.add({"2", "b"});
  t.add({"canonical", "c"});
  t.add({"2", "a"});
  t.sort_rows();
  EXPECT_EQ(t.rows[0], (std::vector<std::string>{"2", "a"}));
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"2", "b"}));
  EXPECT_EQ(t.rows[2][0], "10");
  EXPECT_EQ(t.rows[3][0], "canonical");
  EXPECT_THROW(t.add({"1"}), std::logic_error);
}

TEST(Checks, MarginsAndPass) {
  const auto a = check_le("g", "n", 0.5, 1.0);
  EXPECT_TRUE(a.pass);
  EXPECT_DOUBLE_EQ(a.margin, 0.5);
  EXPECT_FALSE(check_le("g", "n", 2.0, 1.0).pass);
  EXPECT_TRUE(check_in("g", "n", -0.5, -0.6, -0.4).pass);
  EXPECT_FALSE(check_in("g", "n", -0.3, -0.6, -0.4).pass);
  EXPECT_FALSE(check_true("g", "n", false).pass);
}

TEST(Builders, RandomObservableIsNormalizedAndLocal) {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 5; ++n) {
    const auto h = random_observable(n, 6, rng);
    EXPECT_NEAR(Hamiltonian(h).spectral_norm(), 1.0, 1e-12);
    for (const auto& t : h.terms()) EXPECT_LE(t.string.weight(), 2);
  }
  EXPECT_NEAR(Hamiltonian(normalized(transverse_ising(4, 1.0), 0.9)).spectral_norm(), 0.9, 1e-12);
  EXPECT_NEAR(loglog_slope({1, 4, 16}, {1, 0.5, 0.25}), -0.5, 1e-12);
}

TEST(Registry, AllExperimentsPresent) {
  for (const char* n : {"verify", "gc", "depth", "stability", "qite", "invert", "compare", "estimate", "run"}) {
    const auto& e = find_experiment(n);
    EXPECT_EQ(e.defaults.at("experiment"), n);
    EXPECT_TRUE(e.defaults.contains("seed"));
    EXPECT_TRUE(e.defaults.contains("instance"));
    EXPECT_TRUE(e.defaults.contains("sweep"));
  }
  EXPECT_THROW(find_experiment("figures"), ConfigError);
}

TEST(Experiments, ReducedConfigsPass) {
  const std::vector<json> cfgs = {
      small("verify", {{"sweep", {{"instances", 8}, {"idempotence_trials", 10}}}}),
      small("gc", {{"instance", {{"instances", 2}}}, {"sweep", {{"N_max", 256}}}}),
      small("depth", {{"sweep", {{"K_max", 3}, {"N_max", 4}}}}),
      small("stability", {{"instance", {{"instances", 2}}}, {"sweep", {{"trials", 3}, {"replicas", 4}, {"budgets", {1000, 100000}}}}}),
      small("qite", json::object()),
      small("invert", json::object()),
      small("compare", json::object()),
      small("estimate", {{"instance", {{"instances", 3}}}, {"sweep", {{"resamples", 20000}, {"var_rel_tol", 0.15}}}}),
      small("run", json::object()),
  };
  for (const auto& c : cfgs) {
    const auto r = run_experiment(c);
    EXPECT_TRUE(r.pass()) << r.summary().dump(1);
    EXPECT_FALSE(r.tables.empty());
  }
}

TEST(Experiments, RunModesAndTolerance) {
  json c = small("run", {{"sweep", {{"mode", "exact"}}}});
  EXPECT_TRUE(run_experiment(c).pass());
  c = small("run", {{"sweep", {{"mode", "exact"}, {"tolerance", -1.0}}}});
  EXPECT_FALSE(run_experiment(c).pass());
  c = small("run", {{"sweep", {{"mode", "sideways"}}}});
  EXPECT_THROW(run_experiment(c), ConfigError);
}

// Property: identical configs give byte-identical CSV output.
TEST(Experiments, DeterministicOutput) {
  const auto dir = std::filesystem::temp_directory_path() / "dbqsp_det";
  std::filesystem::remove_all(dir);
  const json cfg = small("verify", {{"sweep", {{"instances", 6}, {"idempotence_trials", 5}}}});
  write_result(run_experiment(cfg), cfg, dir / "a");
  write_result(run_experiment(cfg), cfg, dir / "b");
  for (const char* t : {"instances.csv", "steps.csv", "idempotence.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / t), slurp(dir / "b" / t)) << t;
    EXPECT_FALSE(slurp(dir / "a" / t).empty());
  }
  const json s = json::parse(slurp(dir / "a" / "summary.json"));
  EXPECT_EQ(s.at("experiment"), "verify");
  EXPECT_TRUE(s.at("pass").get<bool>());
  EXPECT_TRUE(s.at("cells").at(0).contains("margin"));
  std::filesystem::remove_all(dir);
}
