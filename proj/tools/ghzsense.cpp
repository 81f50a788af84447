// Copyright 2026 The ghzsense Authors
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

// Command-line front end: every subcommand fills a RunConfig (config file first, flags on top)
// and hands it to ghzsense::run.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ghzsense/errors.hpp"
#include "ghzsense/experiments.hpp"

namespace {

struct Flags {
  std::string config;
  std::vector<int> n;
  std::vector<double> tau_c;
  double theta = 0, phi = 0, omega = 0, gamma = 0, gamma0 = 0, gamma_prime = 0, T = 0, t = 0, t_min = 0, t_max = 0;
  int t_points = 0, seeds = 0;
  std::uint64_t seed = 0;
  std::string scheme, output;
};

struct Registered {
  CLI::App* app;
  std::vector<std::pair<std::string, CLI::Option*>> options;  // JSON key, option
};

Registered add_run_command(CLI::App& root, const std::string& name, const std::string& help, Flags& f) {
  Registered r{root.add_subcommand(name, help), {}};
  auto* a = r.app;
  a->add_option("--config", f.config, "flat JSON config; flags override its values");
  r.options = {
      {"n", a->add_option("--n", f.n, "qubit count(s), strictly increasing")},
      {"theta", a->add_option("--theta", f.theta, "polar angle of the z' axis [rad]")},
      {"phi", a->add_option("--phi", f.phi, "azimuth of the z' axis [rad]")},
      {"Omega", a->add_option("--Omega", f.omega, "global field strength")},
      {"gamma", a->add_option("--gamma", f.gamma, "Markovian collective dephasing rate")},
      {"gamma0", a->add_option("--gamma0", f.gamma0, "Lorentzian collective dephasing rate")},
      {"tau_c", a->add_option("--tau-c", f.tau_c, "Lorentzian correlation time (fig3 accepts several)")},
      {"gamma_prime", a->add_option("--gamma-prime", f.gamma_prime, "independent dephasing rate")},
      {"T", a->add_option("--T", f.T, "total protocol time")},
      {"t", a->add_option("--t", f.t, "evolution time")},
      {"t_min", a->add_option("--t-min", f.t_min, "sweep start")},
      {"t_max", a->add_option("--t-max", f.t_max, "sweep end")},
      {"t_points", a->add_option("--t-points", f.t_points, "sweep points (log spaced)")},
      {"scheme", a->add_option("--scheme", f.scheme, "ghz or qfi")},
      {"output", a->add_option("--output,-o", f.output, "output CSV (or directory for fig2/fig3)")},
      {"seed", a->add_option("--seed", f.seed, "base random seed")},
      {"seeds", a->add_option("--seeds", f.seeds, "random configurations per n")},
  };
  return r;
}

nlohmann::json given_flags(const Registered& r, const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  auto given = [&](const std::string& key) {
    for (const auto& [k, opt] : r.options) {
      if (k == key) return opt->count() > 0;
    }
    return false;
  };
  if (given("n")) j["n"] = f.n;
  if (given("theta")) j["theta"] = f.theta;
  if (given("phi")) j["phi"] = f.phi;
  if (given("Omega")) j["Omega"] = f.omega;
  if (given("gamma")) j["gamma"] = f.gamma;
  if (given("gamma0")) j["gamma0"] = f.gamma0;
  if (given("tau_c")) j["tau_c"] = f.tau_c.size() == 1 ? nlohmann::json(f.tau_c.front()) : nlohmann::json(f.tau_c);
  if (given("gamma_prime")) j["gamma_prime"] = f.gamma_prime;
  if (given("T")) j["T"] = f.T;
  if (given("t")) j["t"] = f.t;
  if (given("t_min")) j["t_min"] = f.t_min;
  if (given("t_max")) j["t_max"] = f.t_max;
  if (given("t_points")) j["t_points"] = f.t_points;
  if (given("scheme")) j["scheme"] = f.scheme;
  if (given("output")) j["output"] = f.output;
  if (given("seed")) j["seed"] = f.seed;
  if (given("seeds")) j["seeds"] = f.seeds;
  return j;
}

int plot(const std::vector<std::string>& csv, std::string stem) {
  if (csv.empty()) {
    std::cerr << "configuration error: plot needs at least one CSV file\n";
    return 2;
  }
  if (stem.empty()) stem = (std::filesystem::path(csv.front()).parent_path() / std::filesystem::path(csv.front()).stem()).string();
  const std::string data_path = stem + ".dat";
  try {
    const auto files = ghzsense::emit_plotdata(csv, std::filesystem::path(data_path).filename().string());
    std::ofstream(data_path, std::ios::binary) << files.data;
    std::ofstream(stem + ".gp", std::ios::binary) << files.script;
  } catch (const ghzsense::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
  std::cout << "wrote " << data_path << " and " << stem << ".gp\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parameter estimation with GHZ states under collective and independent dephasing"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<Registered> commands = {
      add_run_command(app, "evolve", "evolve the GHZ state to time t and report P and block observables", flags),
      add_run_command(app, "sweep", "uncertainty over a logarithmic grid of evolution times", flags),
      add_run_command(app, "optimize", "minimize the uncertainty over the evolution time", flags),
      add_run_command(app, "qfi", "quantum Fisher information and its Cramer-Rao bound at time t", flags),
      add_run_command(app, "oracle-check", "compare the block solver with dense simulation on random configurations", flags),
      add_run_command(app, "fig2", "scaling of the minimized uncertainty for the four Markovian schemes", flags),
      add_run_command(app, "fig3", "field scheme against Lorentzian collective dephasing", flags),
  };
  std::vector<std::string> plot_inputs;
  std::string plot_stem;
  auto* plot_cmd = app.add_subcommand("plot", "gnuplot data and script with HL and SQL reference lines");
  plot_cmd->add_option("csv", plot_inputs, "CSV files written by the other subcommands");
  plot_cmd->add_option("--output,-o", plot_stem, "output stem (writes <stem>.dat and <stem>.gp)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (plot_cmd->parsed()) return plot(plot_inputs, plot_stem);
  for (const auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    ghzsense::RunConfig cfg;
    try {
      if (!flags.config.empty()) cfg = ghzsense::load_config_file(flags.config);
      ghzsense::apply_json(cfg, given_flags(cmd, flags));
    } catch (const ghzsense::ConfigError& e) {
      std::cerr << "configuration error: " << e.what() << '\n';
      return 2;
    }
    cfg.mode = cmd.app->get_name();
    return ghzsense::run(cfg, std::cout, std::cerr);
  }
  return 2;
}
