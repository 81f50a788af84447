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

// Brute-force reference on the full 2^n Hilbert space. Qubit q is bit (n-1-q) of the
// basis index, with 0 = up along z.

#include <Eigen/Dense>

#include "ghzsense/collective_algebra.hpp"
#include "ghzsense/evolution.hpp"
#include "ghzsense/initial_state.hpp"

namespace ghzsense {

inline constexpr int kOracleMaxQubits = 5;
inline constexpr int kOracleMaxQfiQubits = 4;

enum class DenseMethod {
  kAuto,         ///< exponential for Markovian noise up to n = 4, Runge-Kutta otherwise
  kExponential,  ///< exp of the vectorized generator (Markovian only)
  kRungeKutta,   ///< adaptive Dormand-Prince on the operator equation
};

struct DenseState {
  int n = 0;
  double t = 0.0;
  Eigen::MatrixXcd rho;
};

/// Single-qubit rotation taking the z eigenvectors to the z' eigenvectors (columns up, down).
Eigen::Matrix2cd axis_rotation(const Angles& angles);
Eigen::Matrix2cd sigma_z_prime(const Angles& angles);

/// op acting on qubit q of n.
Eigen::MatrixXcd embed(const Eigen::Matrix2cd& op, int qubit, int n);
/// op applied to every qubit.
Eigen::MatrixXcd tensor_power(const Eigen::Matrix2cd& op, int n);
/// sum_q op^(q)
Eigen::MatrixXcd collective(const Eigen::Matrix2cd& op, int n);

Eigen::VectorXcd ghz_vector(int n);

DenseState dense_evolve(int n, const Angles& angles, const NoiseParams& params, double t,
                        DenseMethod method = DenseMethod::kAuto);

double dense_survival(const DenseState& state);

/// SLD quantum Fisher information from Richardson-checked central differences in theta.
double dense_qfi(int n, double theta, const NoiseParams& params, double t);

/// Pure-state formula 4(<d psi|d psi> - |<psi|d psi>|^2) for the noiseless drive.
double dense_pure_qfi(int n, double theta, double omega, double t);

struct DenseObservables {
  double purity = 0.0;
  double lz_mean = 0.0;
  double lz2_mean = 0.0;
};

DenseObservables dense_observables(const DenseState& state, const Angles& angles);

/// The d_j-averaged unit (1/d_j) sum_i |j,m,i><j,m',i| along z', built from ladder operators
/// and spectral projectors only.
Eigen::MatrixXcd dense_averaged_unit(int n, const Angles& angles, HalfInt j, HalfInt m, HalfInt mp);

/// sum_j c_j[m,m'] times the averaged units.
Eigen::MatrixXcd dense_from_blocks(const BlockState& state, const Angles& angles);

/// Coefficients of X on the averaged units of sector j: c[m,m'] = d_j tr(E_{m,m'}^dagger X).
Eigen::MatrixXcd dense_block_coefficients(const Eigen::MatrixXcd& x, int n, const Angles& angles, HalfInt j);

}  // namespace ghzsense
