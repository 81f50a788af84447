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

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "reference.hpp"

#include "ghzsense/errors.hpp"
#include "ghzsense/estimation.hpp"
#include "ghzsense/oracle.hpp"

using namespace ghzsense;

namespace {
std::mt19937_64 rng(2026);
double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
}  // namespace

TEST_CASE("budget") {
  CHECK(ProtocolBudget::for_time(1.0, 0.25).M == 4.0);
  CHECK_THROWS_AS(ProtocolBudget::for_time(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(ProtocolBudget::for_time(1.0, 0.0), DomainError);
  CHECK(scheme_name(Scheme::kQfiBound) == "qfi");
}

TEST_CASE("survival derivative closed forms") {
  for (double th : {0.4, 1.0, 2.6})
    for (double t : {0.01, 0.3}) {
      const double g = 1.1, gp = 0.4;
      const double expect = std::sin(th) * std::cos(th) * (1 - std::exp(-2 * (g + gp) * t));
      CHECK(survival_derivative(1, {th, 0.0}, NoiseParams::markovian(0, g, gp), t) == doctest::Approx(expect).epsilon(1e-12));
    }
  for (int n : {3, 8}) {
    const double t = 1e-6 / (n * n);
    CHECK(std::abs(survival_derivative(n, {0.0, 0.0}, NoiseParams::markovian(0, 1, 1), t)) <= 1e-14);
  }
}

TEST_CASE("survival derivative agrees with finite differences") {
  for (int rep = 0; rep < 8; ++rep) {
    const int n = 12;
    const double ph = rep % 2 ? 0.0 : uni(0, 6.28);
    const auto p = NoiseParams::markovian(uni(0, 2), uni(0, 2), uni(0, 2));
    const double t = uni(1e-3, 0.1);
    const double th = 0.9;
    const double fd = ref::richardson([&](double x) { return survival_probability(n, {x, ph}, p, t); }, th, 1e-5);
    const double an = survival_derivative(n, {th, ph}, p, t);
    CHECK(std::abs(an - fd) <= std::max(1e-6 * std::abs(fd), 1e-10));
  }
}

TEST_CASE("two-outcome Fisher information") {
  CHECK(classical_fisher_ghz(0.5, 1.0) == 4.0);
  CHECK(classical_fisher_ghz(0.3, 0.0) == 0.0);
  CHECK_THROWS_AS(classical_fisher_ghz(1.0, 0.2), DegenerateMeasurementError);
  CHECK_THROWS_AS(classical_fisher_ghz(0.0, 0.2), DegenerateMeasurementError);
}

TEST_CASE("uncertainty of the GHZ projection") {
  const int n = 6;
  const Angles a{0.8, 0.0};
  const auto p = NoiseParams::markovian(0.3, 1, 0.5);
  for (double t : {1e-4, 0.01, 0.2}) {
    const auto r = uncertainty_ghz(n, a, p, t, 1.0);
    CHECK(r.delta_theta * std::sqrt(1.0 / t) == doctest::Approx(std::sqrt(r.P * (1 - r.P)) / std::abs(r.dPdtheta)).epsilon(1e-12));
    CHECK(r.delta_theta > 0);
  }
  // n = 1 by hand
  const double th = std::numbers::pi / 4, t = 0.1, e = std::exp(-2 * t);
  const double P = (1 + 0.5 + 0.5 * e) / 2, dP = 0.5 * (1 - e);
  const auto r1 = uncertainty_ghz(1, {th, 0.0}, NoiseParams::markovian(0, 1, 0), t, 1.0);
  CHECK(r1.delta_theta == doctest::Approx(std::sqrt(P * (1 - P)) / (dP * std::sqrt(10.0))).epsilon(1e-12));
  CHECK_THROWS_AS(uncertainty_ghz(4, {0.0, 0.0}, NoiseParams::markovian(0, 1, 0), 1e-3, 1.0), SensitivityError);
  try {
    uncertainty_ghz(4, {0.0, 0.0}, NoiseParams::markovian(0, 1, 0), 1e-3, 1.0);
  } catch (const SensitivityError& e) {
    CHECK(std::string(e.what()).starts_with("theta=0"));
  }
}

TEST_CASE("rotation convention maps z-up to the z'-up eigenvector") {
  for (double th : {0.0, 0.4, 1.7, std::numbers::pi}) {
    const Eigen::Matrix2cd u = axis_rotation({th, 0.0});
    const ref::Vec up = ref::bloch_up(th, 0.0);
    CHECK((u.col(0) - up).norm() <= 1e-15);
    // and U = exp(-i theta S_y) with S_y the spin-1/2 matrix used by the QFI
    const Eigen::MatrixXcd sy = spin_operators(HalfInt::from_twice(1)).jy;
    const Eigen::MatrixXcd expected = std::cos(th / 2) * Eigen::Matrix2cd::Identity() - std::complex<double>(0, 2 * std::sin(th / 2)) * sy;
    CHECK((u - expected).norm() <= 1e-15);
    CHECK((sigma_z_prime({th, 0.0}) * u.col(0) - u.col(0)).norm() <= 1e-15);
  }
}

TEST_CASE("quantum Fisher information basics") {
  CHECK(quantum_fisher(5, 1.0, NoiseParams::markovian(1, 1, 1), 0.0) == 0.0);
  CHECK_THROWS_AS(quantum_fisher(3, Angles{1.0, 0.2}, NoiseParams::markovian(1, 0, 0), 0.1), UnsupportedConfiguration);
  // noiseless drive depends on Omega t only
  const double f1 = quantum_fisher(6, 0.9, NoiseParams::markovian(1.0, 0, 0), 0.3);
  const double f2 = quantum_fisher(6, 0.9, NoiseParams::markovian(0.5, 0, 0), 0.6);
  CHECK(f1 == doctest::Approx(f2).epsilon(1e-12));
  for (int n = 2; n <= 4; ++n)
    CHECK(quantum_fisher(n, 0.9, NoiseParams::markovian(1.0, 0, 0), 0.3) == doctest::Approx(dense_pure_qfi(n, 0.9, 1.0, 0.3)).epsilon(1e-8));
}

TEST_CASE("blockwise QFI matches the dense oracle and bounds the classical information") {
  for (int n = 1; n <= 4; ++n)
    for (int rep = 0; rep < 3; ++rep) {
      const double th = uni(0.1, std::numbers::pi - 0.1);
      const auto p = NoiseParams::markovian(uni(0, 2), uni(0, 2), uni(0, 2));
      const double t = uni(0.01, 0.5);
      const double fq = quantum_fisher(n, th, p, t);
      const double fd = dense_qfi(n, th, p, t);
      CHECK(std::abs(fq - fd) <= 1e-6 * fd);
      const SurvivalModel sm(n, {th, 0.0}, p);
      const auto sp = sm.at(t);
      CHECK(classical_fisher_ghz(sp.p, sp.complement, sp.dp_dtheta) <= fq * (1 + 1e-9));
    }
}

TEST_CASE("quantum Cramer-Rao bound") {
  CHECK(quantum_crb(4, 25) == doctest::Approx(0.1));
  CHECK(quantum_crb(3, 8) * std::sqrt(2.0) == doctest::Approx(quantum_crb(3, 4)));
  CHECK_THROWS_AS(quantum_crb(0, 4), NoInformationError);
  CHECK_THROWS_AS(quantum_crb(1, 0.5), DomainError);
  const double f = dense_pure_qfi(2, 0.7, 1.0, 0.4);
  CHECK(quantum_crb(quantum_fisher(2, 0.7, NoiseParams::markovian(1, 0, 0), 0.4), 1) == doctest::Approx(1 / std::sqrt(f)).epsilon(1e-9));
}

TEST_CASE("uncertainty is invariant under a change of time unit") {
  const Angles a{1.0, 0.0};
  for (double s : {0.1, 7.0}) {
    const auto p = NoiseParams::markovian(0.5, 1.0, 0.7);
    const auto q = NoiseParams::markovian(0.5 / s, 1.0 / s, 0.7 / s);
    CHECK(uncertainty_ghz(8, a, q, 0.01 * s, s).delta_theta == doctest::Approx(uncertainty_ghz(8, a, p, 0.01, 1).delta_theta).epsilon(1e-10));
    const QfiModel m1(8, 1.0, p), m2(8, 1.0, q);
    CHECK(uncertainty_qfi(m2, 0.01 * s, s).delta_theta == doctest::Approx(uncertainty_qfi(m1, 0.01, 1).delta_theta).epsilon(1e-9));
  }
}

TEST_CASE("time grid") {
  const TimeGrid g = default_time_grid(8, NoiseParams::markovian(0, 1, 1), 1.0);
  CHECK(g.t_min == doctest::Approx(1e-6 / (64.0 * 1.0)));
  CHECK(g.t_max == 1.0);
  CHECK(g.points == 400);
  const TimeGrid h = default_time_grid(4, NoiseParams::markovian(0, 0, 0), 2.0);
  CHECK(h.t_max == 2.0);
  CHECK(h.t_min < h.t_max);
}

TEST_CASE("optimizer returns a local optimum that beats the coarse scan") {
  for (Scheme sc : {Scheme::kGhzProjection, Scheme::kQfiBound}) {
    const auto p = sc == Scheme::kGhzProjection ? NoiseParams::markovian(0.5, 1, 1) : NoiseParams::markovian(1, 0, 1);
    const auto r = optimize_time(8, {1.0, 0.0}, p, 1.0, sc);
    CHECK(r.best.delta_theta <= r.coarse_best);
    CHECK(r.best.t == r.t_star);
    std::size_t best = 0;
    for (std::size_t i = 0; i < r.scan.size(); ++i)
      if (r.scan[i].objective < r.scan[best].objective) best = i;
    if (best > 0) CHECK(r.best.delta_theta <= r.scan[best - 1].objective);
    if (best + 1 < r.scan.size()) CHECK(r.best.delta_theta <= r.scan[best + 1].objective);
  }
  // an interior optimum: the field scheme without dephasing peaks at finite t
  const auto r = optimize_time(6, {1.0, 0.0}, NoiseParams::markovian(1, 0, 1), 1.0, Scheme::kQfiBound);
  const double h = 1e-3 * r.t_star;
  const QfiModel m(6, 1.0, NoiseParams::markovian(1, 0, 1));
  if (r.t_star + h <= 1.0) {
    CHECK(r.best.delta_theta <= uncertainty_qfi(m, r.t_star + h, 1.0).delta_theta);
    CHECK(r.best.delta_theta <= uncertainty_qfi(m, r.t_star - h, 1.0).delta_theta);
  }
}

TEST_CASE("optimizer reports an insensitive configuration") {
  CHECK_THROWS_AS(optimize_time(8, {0.0, 0.0}, NoiseParams::markovian(0, 1, 0), 1.0, Scheme::kGhzProjection), SensitivityError);
  CHECK_THROWS_AS(optimize_time(8, {1.0, 0.3}, NoiseParams::markovian(1, 0, 0), 1.0, Scheme::kQfiBound), UnsupportedConfiguration);
}

TEST_CASE("scaling fit") {
  std::vector<std::pair<double, double>> hl, sql;
  for (double n : {4.0, 8.0, 16.0, 32.0}) {
    hl.emplace_back(n, 3 / n);
    sql.emplace_back(n, 2 / std::sqrt(n));
  }
  const auto a = fit_scaling(hl), b = fit_scaling(sql);
  CHECK(a.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(a.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(a.residual <= 1e-12);
  CHECK(b.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(b.residual <= 1e-12);
  std::vector<std::pair<double, double>> bad{{1, 1}, {2, 0}, {3, 1}};
  CHECK_THROWS_AS(fit_scaling(bad), DomainError);
  CHECK_THROWS_AS(fit_scaling(std::span(hl).first(2)), DomainError);
}
