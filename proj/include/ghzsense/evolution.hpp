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

// Exact propagation of the GHZ probe under a global field along z', collective
// dephasing along z' (Markovian or Lorentzian), and independent single-site dephasing.
//
// The state lives in the irrep basis as one (2j+1)x(2j+1) coefficient block per sector:
//   rho(t) = sum_j sum_{m,m'} c_j[m,m'] avg|j,m><j,m'|
// where avg|j,m><j,m'| averages over the d_j multiplicity copies (unit trace).
// Within a block, row r corresponds to m = j - r.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <variant>
#include <vector>

#include "ghzsense/collective_algebra.hpp"
#include "ghzsense/initial_state.hpp"

namespace ghzsense {

struct MarkovianDephasing {
  double gamma = 0.0;
};

/// Lorentzian-bath collective dephasing; accumulated exponent
/// Gamma(t) = gamma0 tau_c (-1 + exp(-t/tau_c) + t/tau_c).
struct LorentzianDephasing {
  double gamma0 = 0.0;
  double tau_c = 1.0;
};

using CollectiveModel = std::variant<MarkovianDephasing, LorentzianDephasing>;

struct NoiseParams {
  double omega = 0.0;
  CollectiveModel collective = MarkovianDephasing{};
  double gamma_prime = 0.0;

  static NoiseParams markovian(double omega, double gamma, double gamma_prime);
  static NoiseParams lorentzian(double omega, double gamma0, double tau_c, double gamma_prime);

  void validate() const;
  bool is_lorentzian() const { return std::holds_alternative<LorentzianDephasing>(collective); }
  /// gamma (Markovian) or gamma0 (Lorentzian).
  double collective_rate() const;
};

/// Accumulated collective dephasing exponent Gamma(t); equals gamma t in the Markovian case.
double accumulated_dephasing(const CollectiveModel& model, double t);

/// Instantaneous rate dGamma/dt.
double instantaneous_dephasing_rate(const CollectiveModel& model, double t);

/// exp(-2 i Omega dm t - 2 Gamma(t) dm^2): the factor multiplying c[m, m'] with dm = m - m'.
std::complex<double> collective_weight(int delta_m, double t, const NoiseParams& params);

/// Streaming evaluation of the k-flip conjugation coefficients A^(k)_{j,m,m'} by the
/// three-term recurrence in k. Keeps only the k-1 and k levels.
///
/// The recurrence amplifies rounding exponentially with n, so it runs in long double
/// (relative trace error about 1e-10 at n = 30, against 1e-9 in double). It is exact
/// algebra; the evolution routines use the nonnegative-term propagators below instead.
class KFlipRecurrence {
 public:
  using Real = long double;
  using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  KFlipRecurrence(const IrrepTable& table, HalfInt m, HalfInt mp);

  int k() const { return k_; }
  int qubits() const { return n_; }
  /// A^(k) indexed by IrrepTable::sector_index.
  const RealVector& exact() const { return current_; }
  Eigen::VectorXd current() const { return current_.cast<double>(); }
  /// Step to k + 1. Returns false (and does nothing) once k = n.
  bool advance();

 private:
  int n_;
  int k_ = 0;
  int first_;  // lowest sector index that can hold (m, m')
  RealVector diag_, from_above_, from_below_;
  RealVector previous_, current_;
};

KFlipRecurrence ak_stream(const IrrepTable& table, HalfInt m, HalfInt mp);

/// Independent dephasing restricted to the sector chain of one (m, m') pair:
///   K(tau) = exp(tau (M - n)) e_top,  tau = gamma' t,
/// with M the tridiagonal matrix of 4(a, b, c). K_j = sum_k alpha^{n-k} beta^k A^(k)_j.
/// M - n has nonnegative off-diagonals, so uniformization sums nonnegative terms only.
class SectorChain {
 public:
  SectorChain(const IrrepTable& table, HalfInt m, HalfInt mp);

  /// Sector index of the lowest j >= max(|m|, |m'|).
  int first_sector() const { return first_; }
  int size() const { return static_cast<int>(diag_.size()); }
  /// Generator entries (for tests): M(i, i), M(i, i+1), M(i+1, i) over the chain.
  Eigen::MatrixXd generator() const;

  /// Coefficients over the chain (ascending j) at tau = gamma' t >= 0.
  Eigen::VectorXd propagate(double tau) const;

 private:
  int n_;
  int first_;
  Eigen::VectorXd diag_;   // M(i, i) - n
  Eigen::VectorXd upper_;  // M(i, i+1) = 4 b(j_{i+1})
  Eigen::VectorXd lower_;  // M(i+1, i) = 4 c(j_i)
};

/// The j = n/2 entries K_top(m, m'; tau) in closed form:
///   sum_o C(mu, o) C(n - mu, mu' - o) / C(n, mu') exp(-2 tau (mu + mu' - 2 o)),
/// a hypergeometric average over the Hamming distance between the two Dicke components.
class TopSectorKernel {
 public:
  explicit TopSectorKernel(int n);

  int qubits() const { return n_; }
  /// kernel(i, i') and its complement 1 - kernel(i, i'), indices as in GhzOverlaps.
  void evaluate(double tau, Eigen::MatrixXd& kernel, Eigen::MatrixXd& complement) const;

 private:
  int n_;
  std::vector<std::size_t> offsets_;  // (n+1)^2 + 1 entries into the flat arrays
  std::vector<int> distance_;
  std::vector<double> weight_;
};

/// Per-sector real matrices K_j[m, m'] (rows m = j - r) for tau = gamma' t.
std::vector<Eigen::MatrixXd> independent_dephasing_weights(const IrrepTable& table, double tau);

struct BlockState {
  int n = 0;
  double t = 0.0;
  std::vector<Eigen::MatrixXcd> blocks;  ///< indexed by IrrepTable::sector_index

  const Eigen::MatrixXcd& block(const IrrepTable& table, HalfInt j) const {
    return blocks[static_cast<std::size_t>(table.sector_index(j))];
  }
  double trace() const;
  /// trace(rho^2) = sum_j trace(c_j^2) / d_j
  double purity(const IrrepTable& table) const;
  /// <L_z'> and <L_z'^2> with L_z' = sum_i sigma_z'^(i) = 2 J_z'.
  double lz_mean(const IrrepTable& table) const;
  double lz2_mean(const IrrepTable& table) const;
};

BlockState evolve(int n, const Angles& angles, const NoiseParams& params, double t);

/// Survival probability of the GHZ projection with its complement and theta-derivative.
struct SurvivalPoint {
  double t = 0.0;
  double p = 1.0;           ///< <GHZ| rho(t) |GHZ>
  double complement = 0.0;  ///< 1 - p, accumulated without cancellation
  double dp_dtheta = 0.0;
};

/// Precomputed overlaps and kernel for one (n, angles, params); evaluates many times cheaply.
class SurvivalModel {
 public:
  SurvivalModel(int n, const Angles& angles, const NoiseParams& params);

  int qubits() const { return n_; }
  const GhzOverlaps& overlaps() const { return overlaps_; }
  SurvivalPoint at(double t) const;
  std::vector<SurvivalPoint> at(std::span<const double> times) const;

 private:
  int n_;
  NoiseParams params_;
  GhzOverlaps overlaps_;
  Eigen::VectorXd db_;
  TopSectorKernel kernel_;
};

double survival_probability(int n, const Angles& angles, const NoiseParams& params, double t);

/// First-order short-time expansion 1 - gamma t (n^2 cos^2 + n sin^2) - gamma' t n, n >= 3.
double short_time_probability(int n, double theta, double gamma_eff, double gamma_prime, double t);

}  // namespace ghzsense
