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

// Fisher information, Cramer-Rao bounds and evolution-time optimization.

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ghzsense/collective_algebra.hpp"
#include "ghzsense/evolution.hpp"
#include "ghzsense/initial_state.hpp"

namespace ghzsense {

struct ProtocolBudget {
  double T_total = 1.0;
  double M = 1.0;  ///< repetitions, T_total / t_evolve

  /// Throws DomainError unless 0 < t <= T_total.
  static ProtocolBudget for_time(double T_total, double t_evolve);
};

enum class Scheme { kGhzProjection, kQfiBound };

std::string_view scheme_name(Scheme scheme);

struct UncertaintyResult {
  double t = 0.0;
  double P = 0.0;
  double dPdtheta = 0.0;
  double fisher = 0.0;  ///< per-shot information behind delta_theta
  double delta_theta = 0.0;
  Scheme scheme = Scheme::kGhzProjection;
};

double survival_derivative(int n, const Angles& angles, const NoiseParams& params, double t);

/// |dP|^2 / (P (1 - P)). The three-argument form takes 1 - P separately.
double classical_fisher_ghz(double P, double dPdtheta);
double classical_fisher_ghz(double P, double one_minus_P, double dPdtheta);

UncertaintyResult uncertainty_ghz(int n, const Angles& angles, const NoiseParams& params, double t, double T_total);
UncertaintyResult uncertainty_ghz(const SurvivalModel& model, double t, double T_total);

/// Blockwise quantum Fisher information of the evolved GHZ family at phi = 0.
/// The overlaps, spin matrices and tables are built once; at() may be called for many t.
class QfiModel {
 public:
  QfiModel(int n, double theta, const NoiseParams& params);

  int qubits() const { return table_.qubits(); }
  double at(double t) const;

 private:
  IrrepTable table_;
  NoiseParams params_;
  Eigen::MatrixXcd rho_;   // v v^dagger on the top sector
  Eigen::MatrixXcd drho_;  // dv v^dagger + v dv^dagger
  std::vector<Eigen::MatrixXcd> jy_;
};

double quantum_fisher(int n, double theta, const NoiseParams& params, double t);
/// Throws UnsupportedConfiguration for phi != 0.
double quantum_fisher(int n, const Angles& angles, const NoiseParams& params, double t);

double quantum_crb(double F_Q, double M);

UncertaintyResult uncertainty_qfi(const QfiModel& model, double t, double T_total);

struct ScanPoint {
  double t = 0.0;
  double objective = 0.0;  ///< delta_theta, +inf where undefined
};

struct OptimizationResult {
  double t_star = 0.0;
  UncertaintyResult best;
  double coarse_best = 0.0;
  std::vector<ScanPoint> scan;
};

struct TimeGrid {
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 400;
};

TimeGrid default_time_grid(int n, const NoiseParams& params, double T_total);

OptimizationResult optimize_time(int n, const Angles& angles, const NoiseParams& params, double T_total, Scheme scheme);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS of the log-space residuals
};

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points);

}  // namespace ghzsense
