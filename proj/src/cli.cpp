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

#include "dbqsp/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbqsp/errors.hpp"
#include "dbqsp/harness.hpp"
#include "dbqsp/kernels.hpp"

namespace dbqsp {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Invocation {
  std::string subcommand;
  std::vector<std::string> experiments;
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed;
  int jobs = 0;
  fs::path output_dir;
  OutputFormat format = OutputFormat::csv;
};

json read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed config '" + path + "': " + e.what());
  }
}

bool has_path(const json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) return true;  // let apply_override report it
  const json* node = &cfg;
  std::size_t start = 0;
  const std::string path = assignment.substr(0, eq);
  while (true) {
    const auto dot = path.find('.', start);
    const std::string seg = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(seg)) return false;
    node = &(*node)[seg];
    if (dot == std::string::npos) return true;
    start = dot + 1;
  }
}

// Effective config for one experiment: defaults, then file, then --set, then --seed.
json effective_config(const Invocation& inv, const std::string& name, const json* file) {
  const ExperimentInfo& info = find_experiment(name);
  json cfg = info.defaults;
  if (file) {
    json user = *file;
    if (user.contains("experiments")) {
      // {"experiments": {"gc": {...}, ...}} applies per experiment
      if (user.size() != 1 || !user["experiments"].is_object()) {
        throw ConfigError("a multi-experiment config may only hold the 'experiments' key");
      }
      user = user["experiments"].contains(name) ? user["experiments"][name] : json::object();
    } else if (inv.experiments.size() > 1) {
      throw ConfigError("running several experiments needs an {\"experiments\": {...}} config");
    }
    if (user.contains("experiment") && user["experiment"] != name) {
      throw ConfigError("config is for experiment '" + user["experiment"].get<std::string>() + "', not '" + name + "'");
    }
    cfg = merge_config(cfg, user);
  }
  for (const auto& o : inv.overrides) {
    if (inv.experiments.size() > 1 && !has_path(cfg, o)) continue;
    apply_override(cfg, o);
  }
  if (inv.seed) cfg["seed"] = *inv.seed;
  return cfg;
}

std::string one_line(const ExperimentResult& r, const fs::path& dir) {
  const auto passed = std::count_if(r.checks.begin(), r.checks.end(), [](const Check& c) { return c.pass; });
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %s  %ld/%zu checks  %.2fs  -> ", r.name.c_str(), r.pass() ? "PASS" : "FAIL",
                static_cast<long>(passed), r.checks.size(), r.seconds);
  return buf + dir.string();
}

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  std::optional<json> file;
  if (!inv.config_path.empty()) file = read_config_file(inv.config_path);
  for (const auto& o : inv.overrides) {
    if (inv.experiments.size() <= 1) continue;
    const bool anywhere = std::any_of(inv.experiments.begin(), inv.experiments.end(), [&](const std::string& n) {
      return has_path(find_experiment(n).defaults, o);
    });
    if (!anywhere) throw ConfigError("override matches no selected experiment: " + o);
  }
  // validate everything before running anything
  std::vector<json> configs;
  for (const auto& name : inv.experiments) configs.push_back(effective_config(inv, name, file ? &*file : nullptr));

  set_threads(inv.jobs);
  bool all_pass = true;
  for (const auto& cfg : configs) {
    const ExperimentResult r = run_experiment(cfg);
    const fs::path dir = inv.output_dir / r.name;
    write_result(r, cfg, dir, inv.format);
    out << one_line(r, dir) << '\n';
    for (const auto& c : r.checks) {
      if (!c.pass) err << "  failed " << c.group << "/" << c.name << ": measured " << c.measured << ", bound " << c.bound << '\n';
    }
    all_pass = all_pass && r.pass();
  }
  return all_pass ? kExitPass : kExitFail;
}

int report(const Invocation& inv, std::ostream& out) {
  std::vector<fs::path> dirs;
  if (fs::is_directory(inv.output_dir)) {
    for (const auto& e : fs::directory_iterator(inv.output_dir)) {
      if (e.is_directory() && fs::exists(e.path() / "summary.json")) dirs.push_back(e.path());
    }
  }
  if (dirs.empty()) throw ConfigError("no summary.json under '" + inv.output_dir.string() + "'");
  std::sort(dirs.begin(), dirs.end());

  std::ofstream md(inv.output_dir / "report.md");
  md << "# dbqsp report\n\n| experiment | pass | checks | failed | seconds |\n|---|---|---|---|---|\n";
  std::string detail;
  bool all_pass = true;
  for (const auto& d : dirs) {
    std::ifstream is(d / "summary.json");
    const json s = json::parse(is);
    const auto& cells = s.at("cells");
    std::size_t failed = 0;
    detail += "\n## " + s.at("experiment").get<std::string>() + "\n\n| group | name | measured | bound | margin | pass |\n|---|---|---|---|---|---|\n";
    for (const auto& c : cells) {
      failed += !c.at("pass").get<bool>();
      char row[512];
      std::snprintf(row, sizeof row, "| %s | %s | %.6g | %.6g | %.6g | %s |\n", c.at("group").get<std::string>().c_str(),
                    c.at("name").get<std::string>().c_str(), c.at("measured").get<double>(),
                    c.at("bound").get<double>(), c.at("margin").get<double>(), c.at("pass").get<bool>() ? "yes" : "NO");
      detail += row;
    }
    std::vector<std::string> tables;
    for (const auto& e : fs::directory_iterator(d)) {
      if (e.path().extension() == ".csv") tables.push_back(e.path().filename().string());
    }
    std::sort(tables.begin(), tables.end());
    detail += "\nTables:";
    for (const auto& t : tables) detail += " " + t;
    detail += "\n";
    const bool pass = s.at("pass").get<bool>();
    all_pass = all_pass && pass;
    char line[256];
    std::snprintf(line, sizeof line, "| %s | %s | %zu | %zu | %.2f |\n", s.at("experiment").get<std::string>().c_str(),
                  pass ? "yes" : "NO", cells.size(), failed, s.value("seconds", 0.0));
    md << line;
    out << s.at("experiment").get<std::string>() << (pass ? " PASS" : " FAIL") << '\n';
  }
  md << detail;
  out << "report -> " << (inv.output_dir / "report.md").string() << '\n';
  return all_pass ? kExitPass : kExitFail;
}

fs::path default_output() {
  const char* env = std::getenv("DBQSP_OUTPUT_DIR");
  return env && *env ? fs::path(env) : fs::path("dbqsp_out");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dbqsp: double-bracket quantum signal processing experiments", "dbqsp"};
  app.require_subcommand(1);
  app.fallthrough();

  Invocation inv;
  std::string output, format = "csv";
  app.add_option("--config", inv.config_path, "JSON config file (comments allowed)");
  app.add_option("--seed", inv.seed, "Override the config seed");
  app.add_option("--jobs", inv.jobs, "Worker threads for sweep cells (default: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--output", output, "Output directory (default: $DBQSP_OUTPUT_DIR, else ./dbqsp_out)");
  app.add_option("--set", inv.overrides, "Config override key.path=value (repeatable)")->take_all();
  app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));

  auto* run = app.add_subcommand("run", "Single DB-QSP run from an instance config");
  auto* verify = app.add_subcommand("verify", "Exact synthesis, duration bound and idempotence checks");
  bool all = false;
  verify->add_flag("--all", all, "Run every experiment");
  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps");
  std::string kind;
  sweep->add_option("kind", kind, "gc | depth | stability")->required()->check(CLI::IsMember({"gc", "depth", "stability"}));
  app.add_subcommand("estimate", "Variance estimators and shot allocation");
  app.add_subcommand("qite", "Ground-state preparation on an Ising chain");
  app.add_subcommand("invert", "Matrix inversion through a Hermitian dilation");
  app.add_subcommand("compare", "Post-selection cost against deterministic depth");
  app.add_subcommand("report", "Summarize every summary.json under the output directory");
  (void)run;

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  inv.subcommand = app.get_subcommands().front()->get_name();
  inv.output_dir = output.empty() ? default_output() : fs::path(output);
  inv.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
  if (inv.subcommand == "verify" && all) {
    for (const auto& e : experiment_registry()) {
      if (e.name != "run") inv.experiments.push_back(e.name);
    }
  } else if (inv.subcommand == "sweep") {
    inv.experiments = {kind};
  } else if (inv.subcommand != "report") {
    inv.experiments = {inv.subcommand};
  }

  try {
    if (inv.subcommand == "report") return report(inv, out);
    return execute(inv, out, err);
  } catch (const ResourceError& e) {
    err << "resource cap: " << e.what() << '\n';
    return kExitResource;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace dbqsp
