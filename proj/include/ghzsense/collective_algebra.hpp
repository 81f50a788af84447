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

// Irrep (Dicke) decomposition of n spin-1/2 systems: sector labels, multiplicities,
// tail sums, and the coefficients of the single-site dephasing map in the sector basis.

#include <Eigen/Dense>

#include <compare>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ghzsense/errors.hpp"

namespace ghzsense {

/// Integer or half-integer quantum number, held as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(int whole) : twice_(2 * whole) {}

  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  constexpr auto operator<=>(const HalfInt&) const = default;

  std::string str() const;

 private:
  int twice_ = 0;
};

constexpr HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }
constexpr int sector_dim(HalfInt j) { return j.twice() + 1; }

/// ln C(n, k) via lgamma; -inf outside 0 <= k <= n.
double log_binomial(int n, int k);

/// Exact binomial coefficient, valid for n <= 62.
std::uint64_t exact_binomial(int n, int k);

/// Multiplicity of a sector: exact for n <= 60, log-magnitude always.
struct Degeneracy {
  std::optional<std::uint64_t> exact;
  double log_value = 0.0;

  double value() const;
};

/// Sector data for a fixed qubit count. Built once, read-only afterwards.
class IrrepTable {
 public:
  static constexpr int kExactLimit = 60;

  explicit IrrepTable(int n);

  int qubits() const { return n_; }
  HalfInt j_min() const { return HalfInt::from_twice(n_ % 2); }
  HalfInt j_max() const { return HalfInt::from_twice(n_); }
  int sector_count() const { return n_ / 2 + 1; }
  int sector_index(HalfInt j) const { return (j.twice() - n_ % 2) / 2; }
  HalfInt sector(int index) const { return HalfInt::from_twice(n_ % 2 + 2 * index); }

  /// True when j has the parity of n and lies in [j_min, n/2].
  bool valid_sector(HalfInt j) const;

  Degeneracy degeneracy(HalfInt j) const;
  /// alpha_j = sum_{j' >= j} d_{j'}; j = n/2 + 1 is allowed and gives zero.
  Degeneracy tail(HalfInt j) const;

  double log_degeneracy(HalfInt j) const;
  double log_tail(HalfInt j) const;
  /// ln C(n, k), tabulated.
  double log_binom(int k) const { return log_binom_[static_cast<std::size_t>(k)]; }

  /// alpha_{j'} / d_j formed without leaving log space when the exact path is unavailable.
  double tail_over_degeneracy(HalfInt tail_j, HalfInt deg_j) const { return tail_over_degeneracy_as<double>(tail_j, deg_j); }
  template <typename Real>
  Real tail_over_degeneracy_as(HalfInt tail_j, HalfInt deg_j) const;

 private:
  void require_sector(HalfInt j, bool allow_above_top) const;

  int n_;
  std::vector<double> log_binom_;
  std::vector<double> log_d_;
  std::vector<double> log_alpha_;
  std::vector<std::uint64_t> d_exact_;
  std::vector<std::uint64_t> alpha_exact_;
};

Degeneracy degeneracy(int n, HalfInt j);
Degeneracy multiplicity_tail(int n, HalfInt j);

/// Coefficients of  sum_i s_i X s_i = 4 (a X_j + b X_{j-1} + c X_{j+1})  on the averaged
/// matrix unit X_j = avg |j,m><j,m'|.
template <typename Real>
struct BasicMixingCoefficients {
  Real a = 0;
  Real b = 0;
  Real c = 0;
};

using MixingCoefficients = BasicMixingCoefficients<double>;

/// Instantiated for double and long double.
template <typename Real>
BasicMixingCoefficients<Real> mixing_coefficients_as(const IrrepTable& table, HalfInt j, HalfInt m, HalfInt mp);

MixingCoefficients mixing_coefficients(const IrrepTable& table, HalfInt j, HalfInt m, HalfInt mp);
MixingCoefficients mixing_coefficients(int n, HalfInt j, HalfInt m, HalfInt mp);

/// Spin-j matrices in the |j, m> basis ordered m = j, j-1, ..., -j (row i <-> m = j - i).
template <typename Scalar = double>
struct SpinOperators {
  using Complex = std::complex<Scalar>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  HalfInt j;
  Matrix jz;
  Matrix jplus;
  Matrix jminus;
  Matrix jy;
};

template <typename Scalar = double>
SpinOperators<Scalar> spin_operators(HalfInt j) {
  if (j.twice() < 0) throw DomainError("spin_operators: negative j = " + j.str());
  using Ops = SpinOperators<Scalar>;
  using Complex = typename Ops::Complex;
  const int dim = sector_dim(j);
  const Scalar jv = static_cast<Scalar>(j.value());

  Ops ops;
  ops.j = j;
  ops.jz = Ops::Matrix::Zero(dim, dim);
  ops.jplus = Ops::Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const Scalar m = jv - static_cast<Scalar>(i);
    ops.jz(i, i) = Complex(m, 0);
    if (i > 0) {
      // J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and m+1 sits one row up.
      ops.jplus(i - 1, i) = Complex(std::sqrt(jv * (jv + 1) - m * (m + 1)), 0);
    }
  }
  ops.jminus = ops.jplus.adjoint();
  ops.jy = (ops.jplus - ops.jminus) / Complex(0, 2);
  return ops;
}

}  // namespace ghzsense
