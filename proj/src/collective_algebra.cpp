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

#include "ghzsense/collective_algebra.hpp"

#include <cmath>
#include <limits>

namespace ghzsense {

std::string HalfInt::str() const {
  if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::uint64_t exact_binomial(int n, int k) {
  if (n > 62) throw DomainError("exact_binomial: n = " + std::to_string(n) + " overflows 64 bits");
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  // r * (n - k + i) stays below 2^64 for n <= 62 because r = C(n - k + i - 1, i - 1).
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

double Degeneracy::value() const {
  if (exact) return static_cast<double>(*exact);
  return std::exp(log_value);
}

IrrepTable::IrrepTable(int n) : n_(n) {
  if (n < 1) throw DomainError("IrrepTable: qubit count must be >= 1, got " + std::to_string(n));
  log_binom_.resize(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) log_binom_[static_cast<std::size_t>(k)] = log_binomial(n, k);

  const int sectors = sector_count();
  log_d_.resize(static_cast<std::size_t>(sectors));
  log_alpha_.assign(static_cast<std::size_t>(sectors + 1), -std::numeric_limits<double>::infinity());
  for (int s = 0; s < sectors; ++s) {
    const int two_j = n % 2 + 2 * s;
    const int k = (n - two_j) / 2;  // n/2 - j
    // d_j = C(n,k) (2j+1) / (n/2 + j + 1)
    log_d_[static_cast<std::size_t>(s)] = log_binom_[static_cast<std::size_t>(k)] + std::log(two_j + 1.0) - std::log(n - k + 1.0);
    log_alpha_[static_cast<std::size_t>(s)] = log_binom_[static_cast<std::size_t>(k)];
  }

  if (n <= kExactLimit) {
    d_exact_.resize(static_cast<std::size_t>(sectors));
    alpha_exact_.assign(static_cast<std::size_t>(sectors + 1), 0);
    for (int s = 0; s < sectors; ++s) {
      const int k = (n - (n % 2 + 2 * s)) / 2;
      d_exact_[static_cast<std::size_t>(s)] = exact_binomial(n, k) - (k > 0 ? exact_binomial(n, k - 1) : 0);
    }
    for (int s = sectors - 1; s >= 0; --s) {
      alpha_exact_[static_cast<std::size_t>(s)] =
          alpha_exact_[static_cast<std::size_t>(s + 1)] + d_exact_[static_cast<std::size_t>(s)];
    }
  }
}

bool IrrepTable::valid_sector(HalfInt j) const {
  return j.twice() >= n_ % 2 && j.twice() <= n_ && (j.twice() - n_) % 2 == 0;
}

void IrrepTable::require_sector(HalfInt j, bool allow_above_top) const {
  if (valid_sector(j)) return;
  if (allow_above_top && j.twice() == n_ + 2) return;
  throw DomainError("sector j = " + j.str() + " is not valid for n = " + std::to_string(n_));
}

Degeneracy IrrepTable::degeneracy(HalfInt j) const {
  require_sector(j, false);
  const auto s = static_cast<std::size_t>(sector_index(j));
  Degeneracy d;
  d.log_value = log_d_[s];
  if (!d_exact_.empty()) d.exact = d_exact_[s];
  return d;
}

Degeneracy IrrepTable::tail(HalfInt j) const {
  require_sector(j, true);
  const auto s = static_cast<std::size_t>(sector_index(j));
  Degeneracy a;
  a.log_value = log_alpha_[s];
  if (!alpha_exact_.empty()) a.exact = alpha_exact_[s];
  return a;
}

double IrrepTable::log_degeneracy(HalfInt j) const {
  require_sector(j, false);
  return log_d_[static_cast<std::size_t>(sector_index(j))];
}

double IrrepTable::log_tail(HalfInt j) const {
  require_sector(j, true);
  return log_alpha_[static_cast<std::size_t>(sector_index(j))];
}

template <typename Real>
Real IrrepTable::tail_over_degeneracy_as(HalfInt tail_j, HalfInt deg_j) const {
  require_sector(tail_j, true);
  require_sector(deg_j, false);
  const auto t = static_cast<std::size_t>(sector_index(tail_j));
  const auto d = static_cast<std::size_t>(sector_index(deg_j));
  if (!d_exact_.empty()) return static_cast<Real>(alpha_exact_[t]) / static_cast<Real>(d_exact_[d]);
  if (std::isinf(log_alpha_[t])) return Real(0);
  return std::exp(static_cast<Real>(log_alpha_[t]) - static_cast<Real>(log_d_[d]));
}

template double IrrepTable::tail_over_degeneracy_as<double>(HalfInt, HalfInt) const;
template long double IrrepTable::tail_over_degeneracy_as<long double>(HalfInt, HalfInt) const;

Degeneracy degeneracy(int n, HalfInt j) { return IrrepTable(n).degeneracy(j); }

Degeneracy multiplicity_tail(int n, HalfInt j) { return IrrepTable(n).tail(j); }

template <typename Real>
BasicMixingCoefficients<Real> mixing_coefficients_as(const IrrepTable& table, HalfInt j, HalfInt m, HalfInt mp) {
  const int n = table.qubits();
  if (!table.valid_sector(j)) {
    throw DomainError("mixing_coefficients: j = " + j.str() + " invalid for n = " + std::to_string(n));
  }
  const int J = j.twice();
  const int M = m.twice();
  const int Mp = mp.twice();
  if (std::abs(M) > J || std::abs(Mp) > J || (J - M) % 2 != 0 || (J - Mp) % 2 != 0) {
    throw DomainError("mixing_coefficients: (m, m') = (" + m.str() + ", " + mp.str() + ") outside sector j = " + j.str());
  }

  const Real jv = Real(J) / 2;
  const Real mv = Real(M) / 2;
  const Real mpv = Real(Mp) / 2;
  const HalfInt one(1);
  const Real r_above = table.tail_over_degeneracy_as<Real>(j + one, j);  // alpha_{j+1} / d_j

  BasicMixingCoefficients<Real> out;
  if (J > 0) out.a = mv * mpv / (2 * jv) * (1 + (2 * jv + 1) * r_above / (jv + 1));
  if (J > n % 2) {
    // (j+m)(j-m) = (J+M)(J-M)/4
    const Real down = std::sqrt(static_cast<Real>((J + M) * (J - M)) * static_cast<Real>((J + Mp) * (J - Mp))) / 4;
    out.b = down * table.tail_over_degeneracy_as<Real>(j, j) / (2 * jv);
  }
  if (J < n) {
    const Real up = std::sqrt(static_cast<Real>((J + M + 2) * (J - M + 2)) * static_cast<Real>((J + Mp + 2) * (J - Mp + 2))) / 4;
    out.c = up * r_above / (2 * (jv + 1));
  }
  return out;
}

template BasicMixingCoefficients<double> mixing_coefficients_as<double>(const IrrepTable&, HalfInt, HalfInt, HalfInt);
template BasicMixingCoefficients<long double> mixing_coefficients_as<long double>(const IrrepTable&, HalfInt, HalfInt, HalfInt);

MixingCoefficients mixing_coefficients(const IrrepTable& table, HalfInt j, HalfInt m, HalfInt mp) {
  return mixing_coefficients_as<double>(table, j, m, mp);
}

MixingCoefficients mixing_coefficients(int n, HalfInt j, HalfInt m, HalfInt mp) {
  return mixing_coefficients(IrrepTable(n), j, m, mp);
}

}  // namespace ghzsense
