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
#include <random>

#include "doctest.h"
#include "reference.hpp"

#include "ghzsense/errors.hpp"
#include "ghzsense/oracle.hpp"

using namespace ghzsense;

namespace {

void check_state(const DenseState& s) {
  CHECK(std::abs(s.rho.trace() - std::complex<double>(1.0)) <= 1e-10);
  CHECK((s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.rho);
  CHECK(es.eigenvalues().minCoeff() >= -1e-9);
}

}  // namespace

TEST_CASE("operator helpers follow the qubit ordering") {
  const Angles a{0.9, 0.4};
  CHECK((sigma_z_prime(a) - Eigen::Matrix2cd(ref::pauli_along(0.9, 0.4))).norm() <= 1e-15);
  const Eigen::Matrix2cd x = ref::pauli('x');
  CHECK((embed(x, 0, 3) - ref::site(x, 0, 3)).norm() == 0.0);
  CHECK((embed(x, 2, 3) - ref::site(x, 2, 3)).norm() == 0.0);
  CHECK((collective(x, 3) - ref::total(x, 3)).norm() <= 1e-15);
  CHECK((ghz_vector(4) - ref::ghz(4)).norm() <= 1e-15);
  const Eigen::Matrix2cd u = axis_rotation(a);
  CHECK((u.adjoint() * u - Eigen::Matrix2cd::Identity()).norm() <= 1e-15);
  CHECK((tensor_power(u, 2) - ref::kron(u, u)).norm() <= 1e-15);
}

TEST_CASE("initial state") {
  for (int n = 1; n <= 5; ++n) {
    const Angles a{1.0, 0.0};
    const DenseState s = dense_evolve(n, a, NoiseParams::markovian(1, 1, 1), 0.0);
    const ref::Vec g = ref::ghz(n);
    CHECK((s.rho - g * g.adjoint()).norm() <= 1e-15);
    const auto obs = dense_observables(s, a);
    CHECK(obs.purity == doctest::Approx(1.0));
    CHECK(dense_survival(s) == doctest::Approx(1.0));
    if (n >= 3) CHECK(obs.lz2_mean == doctest::Approx(n * n * std::cos(1.0) * std::cos(1.0) + n * std::sin(1.0) * std::sin(1.0)));
  }
}

TEST_CASE("single-qubit closed form") {
  const double g = 0.6, gp = 0.9;
  for (double th : {0.4, 2.0})
    for (double t : {0.05, 0.7}) {
      const double expect = (1 + std::sin(th) * std::sin(th) + std::exp(-2 * (g + gp) * t) * std::cos(th) * std::cos(th)) / 2;
      for (DenseMethod m : {DenseMethod::kExponential, DenseMethod::kRungeKutta})
        CHECK(dense_survival(dense_evolve(1, {th, 0.0}, NoiseParams::markovian(0, g, gp), t, m)) == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("extremal coherence decay at theta = 0") {
  const double g = 0.5, gp = 0.8, t = 0.07;
  const DenseState s = dense_evolve(3, {0.0, 0.0}, NoiseParams::markovian(0, g, gp), t);
  CHECK(std::abs(s.rho(0, 7)) == doctest::Approx(0.5 * std::exp(-2 * g * t * 9 - 2 * gp * t * 3)).epsilon(1e-12));
}

TEST_CASE("exponential and Runge-Kutta integration agree") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 1; n <= 3; ++n) {
    const Angles a{0.1 + 2.9 * u(rng), 6.28 * u(rng)};
    const auto p = NoiseParams::markovian(2 * u(rng), 2 * u(rng), 2 * u(rng));
    const double t = 0.5 * u(rng);
    const DenseState e = dense_evolve(n, a, p, t, DenseMethod::kExponential);
    const DenseState r = dense_evolve(n, a, p, t, DenseMethod::kRungeKutta);
    CHECK((e.rho - r.rho).cwiseAbs().maxCoeff() <= 1e-9);
    check_state(e);
    check_state(r);
  }
}

TEST_CASE("Lorentzian noise integrates a time-dependent rate") {
  // Theta = 0 coherence follows the accumulated dephasing exactly.
  const auto p = NoiseParams::lorentzian(0, 1.3, 0.05, 0.2);
  const double t = 0.3;
  const DenseState s = dense_evolve(2, {0.0, 0.0}, p, t);
  const double big = accumulated_dephasing(p.collective, t);
  CHECK(std::abs(s.rho(0, 3)) == doctest::Approx(0.5 * std::exp(-2 * big * 4 - 2 * 0.2 * t * 2)).epsilon(1e-9));
  check_state(s);
  CHECK_THROWS_AS(dense_evolve(2, {0.0, 0.0}, p, t, DenseMethod::kExponential), UnsupportedConfiguration);
}

TEST_CASE("capacity limits") {
  CHECK_THROWS_AS(dense_evolve(6, {1.0, 0.0}, NoiseParams::markovian(0, 1, 0), 0.1), CapacityError);
  CHECK_THROWS_AS(dense_qfi(5, 1.0, NoiseParams::markovian(0, 1, 0), 0.1), CapacityError);
  CHECK_THROWS_AS(dense_evolve(3, {1.0, 0.0}, NoiseParams::markovian(0, 1, 0), -0.1), DomainError);
}

TEST_CASE("five qubits stay physical") {
  const DenseState s = dense_evolve(5, {1.1, 0.3}, NoiseParams::markovian(0.7, 0.4, 0.9), 0.2);
  check_state(s);
  const double p = dense_survival(s);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
}

TEST_CASE("dense QFI") {
  CHECK(dense_qfi(3, 1.0, NoiseParams::markovian(1, 1, 1), 0.0) == doctest::Approx(0.0).epsilon(1e-12));
  for (int n = 1; n <= 4; ++n)
    for (double t : {0.1, 0.8}) {
      const double mixed = dense_qfi(n, 0.9, NoiseParams::markovian(1.0, 0, 0), t);
      CHECK(std::abs(mixed - dense_pure_qfi(n, 0.9, 1.0, t)) <= 1e-8 * std::max(1.0, mixed));
    }
  // A pure qubit's QFI is the squared speed of its Bloch vector.
  const double th = 0.8, w = 1.0, t = 0.6;
  auto bloch = [&](double x) {
    const DenseState s = dense_evolve(1, {x, 0.0}, NoiseParams::markovian(w, 0, 0), t);
    Eigen::Vector3d r;
    r << (s.rho(0, 1) + s.rho(1, 0)).real(), (std::complex<double>(0, 1) * (s.rho(0, 1) - s.rho(1, 0))).real(), (s.rho(0, 0) - s.rho(1, 1)).real();
    return r;
  };
  const Eigen::Vector3d dr = ref::richardson(bloch, th, 1e-4);
  CHECK(dense_qfi(1, th, NoiseParams::markovian(w, 0, 0), t) == doctest::Approx(dr.squaredNorm()).epsilon(1e-7));
  CHECK_THROWS_AS(dense_qfi(2, 1e-6, NoiseParams::markovian(1, 0, 0), 0.1), DomainError);
}

TEST_CASE("averaged units") {
  const Angles a{0.7, 1.1};
  for (int n = 1; n <= 5; ++n) {
    const IrrepTable table(n);
    for (int s = 0; s < table.sector_count(); ++s) {
      const HalfInt j = table.sector(s);
      const double d = table.degeneracy(j).value();
      const Eigen::MatrixXcd e = dense_averaged_unit(n, a, j, j, j);
      CHECK(std::abs(e.trace() - std::complex<double>(1.0)) <= 1e-12);
      CHECK(std::abs((e * e).trace().real() - 1.0 / d) <= 1e-12);
      if (j.twice() >= 2) {
        const Eigen::MatrixXcd off = dense_averaged_unit(n, a, j, j, j - HalfInt(1));
        CHECK(std::abs(off.trace()) <= 1e-12);
        CHECK(std::abs((off * off.adjoint()).trace().real() - 1.0 / d) <= 1e-12);
      }
    }
    // Top sector: the rank-one projector onto the rotated Dicke state.
    const ref::Vec dk = ref::rotated_dicke(n, 1, a.theta, a.phi);
    const Eigen::MatrixXcd top = dense_averaged_unit(n, a, table.j_max(), table.j_max() - HalfInt(1), table.j_max() - HalfInt(1));
    CHECK((top - dk * dk.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
