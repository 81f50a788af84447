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

// Overlaps of the GHZ state with the Dicke basis quantized along the tilted axis z'.
// Amplitudes are held as (log |x|, phase) so that n in the hundreds neither
// overflows the binomial prefactor nor underflows the trigonometric powers.

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <span>
#include <vector>

namespace ghzsense {

/// Orientation of the z' axis: polar angle theta in [0, pi], azimuth phi.
struct Angles {
  double theta = 0.0;
  double phi = 0.0;

  /// Throws DomainError unless theta in [0, pi] and phi finite.
  void validate() const;
};

/// Complex number stored as log-magnitude and unit phase.
struct LogAmplitude {
  double log_abs = -std::numeric_limits<double>::infinity();
  std::complex<double> phase{1.0, 0.0};

  bool is_zero() const { return log_abs == -std::numeric_limits<double>::infinity(); }
  std::complex<double> value() const;
};

/// Signed log-sum-exp: the sum of the terms, rescaled by the largest magnitude before adding.
LogAmplitude log_sum(std::span<const LogAmplitude> terms);

/// GHZ overlaps v_m = <n/2, m|_{z'} GHZ> and their theta-derivatives.
/// Index i = 0..n corresponds to m = n/2 - i (same ordering as the top spin block).
struct GhzOverlaps {
  int n = 0;
  Angles angles;
  std::vector<LogAmplitude> v;
  std::vector<LogAmplitude> dv;
  Eigen::VectorXd weights;  ///< B_m = |v_m|^2

  double m_of(int i) const { return 0.5 * n - i; }
  Eigen::VectorXcd amplitudes() const;
  Eigen::VectorXcd derivative_amplitudes() const;
  /// dB_m / dtheta = 2 Re(conj(v_m) dv_m)
  Eigen::VectorXd weight_derivatives() const;
  /// rho_{m,m'} = v_m conj(v_m')
  Eigen::MatrixXcd density() const;
};

GhzOverlaps ghz_overlaps(int n, const Angles& angles);
std::vector<LogAmplitude> ghz_overlap_derivative(int n, const Angles& angles);

struct BMoments {
  double sum = 0.0;     ///< sum_m B_m
  double first = 0.0;   ///< sum_m m B_m
  double second = 0.0;  ///< sum_m m^2 B_m
};

BMoments b_moments(const GhzOverlaps& overlaps);

}  // namespace ghzsense
