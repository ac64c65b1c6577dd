// Copyright 2026 The ergolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ergolab run <experiment> [--config PATH] [flags]
//
// Exit codes: 0 pass, 1 assertion failure, 2 config error, 3 resource guard.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ergolab.hpp"

namespace {

using ergolab::cli::ConfigError;
using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGuard = 3;

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse '" + item + "' as an integer");
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

struct Flags {
  std::string experiment;
  std::string config;
  std::string model, geometry, initial, policy, mps_source, mps_path, n_grid, betas, json_out, csv_out;
  std::optional<int> n;
  std::optional<std::uint64_t> seed, model_seed;
  std::optional<double> epsilon, time, t_max, horizon;
  std::optional<std::size_t> samples, initial_states, observables, time_samples, mps_count, budget;
  bool print_config = false;
};

json build_document(const Flags& f) {
  json doc = json::object();
  if (!f.config.empty()) {
    try {
      doc = ergolab::io::read_json_file(f.config);
    } catch (const json::exception& e) {
      throw ConfigError(f.config + ": " + e.what());
    } catch (const ergolab::Error& e) {
      throw ConfigError(e.what());
    }
    if (!doc.is_object()) throw ConfigError(f.config + ": top level must be an object");
    // MPS files named in a config resolve against the config's directory.
    if (doc.contains("mps") && doc["mps"].is_object() && doc["mps"].contains("path") && doc["mps"]["path"].is_string()) {
      const std::filesystem::path p = doc["mps"]["path"].get<std::string>();
      if (p.is_relative()) doc["mps"]["path"] = (std::filesystem::path(f.config).parent_path() / p).string();
    }
  }
  if (!f.experiment.empty()) {
    if (doc.contains("experiment") && doc["experiment"] != f.experiment)
      throw ConfigError("experiment '" + f.experiment + "' conflicts with the config file's '" +
                        doc["experiment"].get<std::string>() + "'");
    doc["experiment"] = f.experiment;
  }
  auto set = [&](const char* key, const auto& v) { doc[key] = v; };
  auto set_in = [&](const char* group, const char* key, const auto& v) {
    if (!doc.contains(group)) doc[group] = json::object();
    doc[group][key] = v;
  };
  if (!f.model.empty()) set("model", f.model);
  if (!f.geometry.empty()) set("geometry", f.geometry);
  if (!f.initial.empty()) set("initial", f.initial);
  if (f.n) set("N", *f.n);
  if (!f.n_grid.empty()) set("N_grid", parse_int_list(f.n_grid));
  if (f.seed) set("seed", *f.seed);
  if (f.model_seed) set("model_seed", *f.model_seed);
  if (f.epsilon) set("epsilon", *f.epsilon);
  if (f.time) set("T", *f.time);
  if (f.t_max) set("t_max", *f.t_max);
  if (f.horizon) set("horizon", *f.horizon);
  if (f.samples) set("samples", *f.samples);
  if (f.initial_states) set("initial_states", *f.initial_states);
  if (f.observables) set("observables", *f.observables);
  if (f.time_samples) set("time_samples", *f.time_samples);
  if (!f.betas.empty()) set("betas", parse_double_list(f.betas));
  if (!f.policy.empty()) set_in("policy", "mode", f.policy);
  if (f.budget) set_in("policy", "sample_budget", *f.budget);
  if (!f.mps_source.empty()) set_in("mps", "source", f.mps_source);
  if (!f.mps_path.empty()) set_in("mps", "path", f.mps_path);
  if (f.mps_count) set_in("mps", "count", *f.mps_count);
  if (!f.json_out.empty()) set_in("output", "json", f.json_out);
  if (!f.csv_out.empty()) set_in("output", "csv", f.csv_out);
  return doc;
}

int run(const Flags& f) {
  const auto config = ergolab::cli::config_from_json(build_document(f));
  if (f.print_config) {
    std::cout << config.to_json().dump(2) << '\n';
    return kExitPass;
  }
  const auto result = ergolab::cli::run(config);
  const std::string text = result.report.dump(2) + "\n";
  if (config.output_json.empty()) std::cout << text;
  else ergolab::io::write_text(config.output_json, text);
  if (!config.output_csv.empty() && result.csv) result.csv->write(config.output_csv);
  std::cerr << "ergolab " << ergolab::cli::to_string(config.experiment) << ": " << (result.pass ? "PASS" : "FAIL")
            << " (config " << config.hash() << ")\n";
  return result.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: entanglement and equilibration experiments on small spin chains"};
  app.require_subcommand(1);
  Flags f;
  auto* cmd = app.add_subcommand("run", "Run one experiment");
  std::vector<std::string> names;
  for (const auto& [k, v] : ergolab::cli::experiment_names()) names.push_back(v);
  cmd->add_option("experiment", f.experiment, "Experiment name")->check(CLI::IsMember(names));
  cmd->add_option("--config", f.config, "JSON config file; flags override its keys");
  cmd->add_option("--model", f.model, "Model name");
  cmd->add_option("--geometry", f.geometry, "chain-open or chain-periodic");
  cmd->add_option("--initial", f.initial, "Initial state recipe: neel or random-product");
  cmd->add_option("--N", f.n, "Number of sites");
  cmd->add_option("--N-grid", f.n_grid, "Comma-separated sizes");
  cmd->add_option("--seed", f.seed, "Random seed");
  cmd->add_option("--model-seed", f.model_seed, "Disorder seed of the model");
  cmd->add_option("--epsilon", f.epsilon, "Epsilon of the counterexample state");
  cmd->add_option("--T", f.time, "Time of the quasi-local unitary");
  cmd->add_option("--t-max", f.t_max, "Last time of the integrated-bound grid");
  cmd->add_option("--horizon", f.horizon, "Time horizon for sampled averages");
  cmd->add_option("--samples", f.samples, "Sample count (experiment specific)");
  cmd->add_option("--initial-states", f.initial_states, "Random initial states");
  cmd->add_option("--observables", f.observables, "Observables per initial state");
  cmd->add_option("--time-samples", f.time_samples, "Time samples for sampled averages");
  cmd->add_option("--betas", f.betas, "Comma-separated inverse temperatures");
  cmd->add_option("--policy", f.policy, "Subsystem search mode");
  cmd->add_option("--sample-budget", f.budget, "Random subsystems in random-sample mode");
  cmd->add_option("--mps-source", f.mps_source, "random, file, ghz, aklt or product");
  cmd->add_option("--mps-path", f.mps_path, "MPS JSON file");
  cmd->add_option("--mps-count", f.mps_count, "Number of random MPS");
  cmd->add_option("--json", f.json_out, "Write the JSON report here instead of stdout");
  cmd->add_option("--csv", f.csv_out, "Write the CSV table here");
  cmd->add_flag("--print-config", f.print_config, "Print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  try {
    if (f.experiment.empty() && f.config.empty()) throw ConfigError("give an experiment name or --config");
    return run(f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ergolab::ResourceGuardError& e) {
    std::cerr << "resource guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const ergolab::UnsupportedError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
