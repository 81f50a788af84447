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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghzsense/estimation.hpp"
#include "ghzsense/evolution.hpp"

namespace ghzsense {

struct RunConfig {
  std::string mode;  ///< evolve | sweep | optimize | qfi | oracle-check | fig2 | fig3
  std::vector<int> n;
  double theta = 1.0;
  double phi = 0.0;
  double omega = 0.0;
  std::optional<double> gamma;
  std::optional<double> gamma0;
  std::optional<double> tau_c;
  std::vector<double> tau_c_list;  ///< fig3 only; empty picks the defaults for theta
  double gamma_prime = 0.0;
  double T = 1.0;
  std::optional<double> t;
  std::optional<double> t_min;
  std::optional<double> t_max;
  int t_points = 50;
  Scheme scheme = Scheme::kGhzProjection;
  std::string output;  ///< file (or "-") for single-table modes, directory for fig2/fig3
  std::uint64_t seed = 1;
  int seeds = 20;

  /// Collective model from gamma XOR (gamma0, tau_c); neither means gamma = 0.
  NoiseParams noise() const;
  void validate() const;
};

/// Overlay the keys of a flat JSON object on cfg. Unknown keys or wrong types throw ConfigError.
void apply_json(RunConfig& cfg, const nlohmann::json& flat);
RunConfig load_config_file(const std::string& path);

/// Exit codes: 0 success, 2 configuration, 3 sensitivity or no information, 4 internal consistency.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct CsvRow {
  int n = 0;
  double theta = 0.0;
  double phi = 0.0;
  NoiseParams params;
  double T = 1.0;
  Scheme scheme = Scheme::kGhzProjection;
  double t = 0.0;
  double P = 0.0;  ///< NaN prints as an empty field
  double dPdtheta = 0.0;
  double delta_theta = 0.0;
};

std::string csv_header();
std::string csv_line(const CsvRow& row);
void write_csv(const std::string& path, const std::vector<CsvRow>& rows);

struct Curve {
  std::string name;
  Scheme scheme = Scheme::kGhzProjection;
  NoiseParams params;
  std::vector<int> n;
};

struct CurveResult {
  Curve curve;
  std::vector<CsvRow> rows;
  std::vector<double> t_star;
  ScalingFit fit;
  double last_local_slope = 0.0;  ///< slope between the two largest n
};

std::vector<Curve> fig2_curves();
std::vector<double> fig3_default_tau_c(double theta);
std::vector<Curve> fig3_curves(const std::vector<double>& tau_c);

/// Optimizes every (curve, n) point across the worker pool; output order is fixed.
std::vector<CurveResult> run_curves(const std::vector<Curve>& curves, double theta, double T);

/// Writes one CSV per curve plus slopes.txt into dir.
void write_figure(const std::string& dir, const std::string& prefix, const std::vector<CurveResult>& results);

/// GHZSENSE_WORKERS if set and positive, otherwise the hardware concurrency.
int worker_count();

struct OracleCase {
  std::uint64_t seed = 0;
  int n = 0;
  Angles angles;
  NoiseParams params;
  double t = 0.0;
  double p_error = 0.0;
  double purity_error = 0.0;
  double qfi_rel_error = 0.0;
};

struct OracleReport {
  std::vector<OracleCase> cases;
  double max_p_error = 0.0;
  double max_purity_error = 0.0;
  double max_qfi_rel_error = 0.0;
  bool passed() const { return max_p_error <= 1e-8 && max_purity_error <= 1e-8 && max_qfi_rel_error <= 1e-6; }
};

/// Randomized block-versus-dense comparison over n = 1..4, `seeds` configurations per n.
OracleReport oracle_check(int seeds, std::uint64_t base_seed);

struct PlotFiles {
  std::string data;    ///< gnuplot data, one index block per curve
  std::string script;  ///< log-log script with HL and SQL reference lines
};

/// Throws ConfigError for unreadable, malformed or empty CSV input.
PlotFiles emit_plotdata(const std::vector<std::string>& csv_paths, const std::string& data_file_name);

}  // namespace ghzsense
