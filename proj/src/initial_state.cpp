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

#include "ghzsense/initial_state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ghzsense/collective_algebra.hpp"
#include "ghzsense/errors.hpp"

namespace ghzsense {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// cos(theta/2) and sin(theta/2) in log form; exact zeros at the poles.
struct HalfAngleLogs {
  double log_cos;
  double log_sin;
};

HalfAngleLogs half_angle_logs(double theta) {
  const double c = theta == std::numbers::pi ? 0.0 : std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  return {c > 0.0 ? std::log(c) : kNegInf, s > 0.0 ? std::log(s) : kNegInf};
}

// log(cos^p sin^q) with 0^0 = 1.
double log_monomial(const HalfAngleLogs& h, int p, int q) {
  double r = 0.0;
  if (p > 0) r += p * h.log_cos;
  if (q > 0) r += q * h.log_sin;
  return r;
}

LogAmplitude term(double log_abs, std::complex<double> phase) { return {log_abs, phase}; }

}  // namespace

void Angles::validate() const {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw DomainError("theta=" + std::to_string(theta) + " outside [0, pi]");
  }
  if (!std::isfinite(phi)) throw DomainError("phi must be finite");
}

std::complex<double> LogAmplitude::value() const {
  if (is_zero()) return {0.0, 0.0};
  return std::exp(log_abs) * phase;
}

LogAmplitude log_sum(std::span<const LogAmplitude> terms) {
  double top = kNegInf;
  for (const auto& t : terms) top = std::max(top, t.log_abs);
  if (top == kNegInf) return {};
  std::complex<double> acc{0.0, 0.0};
  for (const auto& t : terms) {
    if (!t.is_zero()) acc += std::exp(t.log_abs - top) * t.phase;
  }
  const double mag = std::abs(acc);
  if (mag == 0.0) return {};
  return {top + std::log(mag), acc / mag};
}

Eigen::VectorXcd GhzOverlaps::amplitudes() const {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i].value();
  return out;
}

Eigen::VectorXcd GhzOverlaps::derivative_amplitudes() const {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(dv.size()));
  for (std::size_t i = 0; i < dv.size(); ++i) out(static_cast<Eigen::Index>(i)) = dv[i].value();
  return out;
}

Eigen::VectorXd GhzOverlaps::weight_derivatives() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].is_zero() || dv[i].is_zero()) {
      out(static_cast<Eigen::Index>(i)) = 0.0;
      continue;
    }
    const double mag = std::exp(v[i].log_abs + dv[i].log_abs);
    out(static_cast<Eigen::Index>(i)) = 2.0 * mag * std::real(std::conj(v[i].phase) * dv[i].phase);
  }
  return out;
}

Eigen::MatrixXcd GhzOverlaps::density() const {
  const Eigen::VectorXcd a = amplitudes();
  return a * a.adjoint();
}

namespace {

// Shared worker: fills v (and dv when requested) for index i <-> mu = n - i up-spins along z'.
void fill_overlaps(int n, const Angles& angles, std::vector<LogAmplitude>* v, std::vector<LogAmplitude>* dv) {
  if (n < 1) throw DomainError("ghz_overlaps: n must be >= 1");
  angles.validate();
  const HalfAngleLogs h = half_angle_logs(angles.theta);
  const std::complex<double> twist = std::polar(1.0, -static_cast<double>(n) * angles.phi);
  const double log_half = std::log(0.5);

  if (v) v->resize(static_cast<std::size_t>(n + 1));
  if (dv) dv->resize(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) {
    const int mu = n - i;
    const int nu = i;
    // sqrt(C(n,mu)/2) [ cos^mu (-sin)^nu + e^{-i n phi} sin^mu cos^nu ]  (half angles)
    const double pre = 0.5 * (log_binomial(n, mu) + log_half);
    const double sign = nu % 2 == 0 ? 1.0 : -1.0;
    if (v) {
      const LogAmplitude parts[2] = {term(pre + log_monomial(h, mu, nu), sign),
                                     term(pre + log_monomial(h, nu, mu), twist)};
      (*v)[static_cast<std::size_t>(i)] = log_sum(parts);
    }
    if (dv) {
      // d/dtheta cos^p sin^q = (1/2)(-p cos^{p-1} sin^{q+1} + q cos^{p+1} sin^{q-1})
      LogAmplitude parts[4];
      int count = 0;
      const double log_half_factor = log_half;
      if (mu > 0) parts[count++] = term(pre + log_half_factor + std::log(mu) + log_monomial(h, mu - 1, nu + 1), -sign);
      if (nu > 0) parts[count++] = term(pre + log_half_factor + std::log(nu) + log_monomial(h, mu + 1, nu - 1), sign);
      // second term: sin^mu cos^nu = cos^nu sin^mu
      if (nu > 0) parts[count++] = term(pre + log_half_factor + std::log(nu) + log_monomial(h, nu - 1, mu + 1), -twist);
      if (mu > 0) parts[count++] = term(pre + log_half_factor + std::log(mu) + log_monomial(h, nu + 1, mu - 1), twist);
      (*dv)[static_cast<std::size_t>(i)] = log_sum(std::span<const LogAmplitude>(parts, static_cast<std::size_t>(count)));
    }
  }
}

}  // namespace

GhzOverlaps ghz_overlaps(int n, const Angles& angles) {
  GhzOverlaps out;
  out.n = n;
  out.angles = angles;
  fill_overlaps(n, angles, &out.v, &out.dv);
  out.weights.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    const auto& a = out.v[static_cast<std::size_t>(i)];
    out.weights(i) = a.is_zero() ? 0.0 : std::exp(2.0 * a.log_abs);
  }
  return out;
}

std::vector<LogAmplitude> ghz_overlap_derivative(int n, const Angles& angles) {
  std::vector<LogAmplitude> dv;
  fill_overlaps(n, angles, nullptr, &dv);
  return dv;
}

BMoments b_moments(const GhzOverlaps& overlaps) {
  BMoments out;
  for (int i = 0; i <= overlaps.n; ++i) {
    const double b = overlaps.weights(i);
    const double m = overlaps.m_of(i);
    out.sum += b;
    out.first += m * b;
    out.second += m * m * b;
  }
  return out;
}

}  // namespace ghzsense
