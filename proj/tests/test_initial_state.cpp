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

#include "doctest.h"
#include "reference.hpp"

#include "ghzsense/errors.hpp"
#include "ghzsense/initial_state.hpp"

using namespace ghzsense;

TEST_CASE("theta = 0 populates only the extremal states") {
  for (int n : {1, 2, 7, 50}) {
    const auto o = ghz_overlaps(n, {0.0, 0.4});
    CHECK(o.weights(0) == doctest::Approx(0.5));
    CHECK(o.weights(n) == doctest::Approx(0.5));
    for (int i = 1; i < n; ++i) CHECK(o.weights(i) == 0.0);
  }
}

TEST_CASE("single qubit weights and slope") {
  for (double th : {0.2, 1.0, 2.5}) {
    const auto o = ghz_overlaps(1, {th, 0.0});
    CHECK(o.weights(0) == doctest::Approx((1 + std::sin(th)) / 2).epsilon(1e-14));
    CHECK(o.weights(1) == doctest::Approx((1 - std::sin(th)) / 2).epsilon(1e-14));
    CHECK(o.weight_derivatives()(0) == doctest::Approx(std::cos(th) / 2).epsilon(1e-13));
  }
}

TEST_CASE("weights equal brute-force overlaps with rotated Dicke states") {
  for (int n = 1; n <= 7; ++n)
    for (double th : {0.3, 1.0, 2.2})
      for (double ph : {0.0, 0.3, 1.9}) {
        const auto o = ghz_overlaps(n, {th, ph});
        const ref::Vec g = ref::ghz(n);
        for (int k = 0; k <= n; ++k) {
          const double b = std::norm(ref::rotated_dicke(n, k, th, ph).dot(g));
          CHECK(std::abs(o.weights(k) - b) <= 1e-13);
        }
      }
}

TEST_CASE("normalization and moments over a wide range of n") {
  const double pi = std::numbers::pi;
  for (int n = 1; n <= 200; ++n)
    for (double th : {0.0, 0.5, 1.0, pi / 2, pi})
      for (double ph : {0.0, 0.3}) {
        CAPTURE(n);
        CAPTURE(th);
        const auto mo = b_moments(ghz_overlaps(n, {th, ph}));
        CHECK(std::abs(mo.sum - 1) <= 1e-12);
        if (n >= 2) CHECK(std::abs(mo.first) <= 1e-12);
        if (n >= 3) {
          const double c2 = std::cos(th) * std::cos(th);
          const double expect = n * n / 4.0 * c2 + n / 4.0 * (1 - c2);
          CHECK(std::abs(mo.second / expect - 1) <= 1e-10);
        }
      }
}

TEST_CASE("moment examples") {
  CHECK(std::abs(b_moments(ghz_overlaps(7, {1.0, 0.3})).sum - 1) <= 1e-12);
  CHECK(std::abs(b_moments(ghz_overlaps(5, {1.0, 0.0})).sum - 1) <= 1e-12);
  CHECK(std::abs(b_moments(ghz_overlaps(4, {0.7, 0.0})).first) <= 1e-12);
  const double c2 = std::cos(0.9) * std::cos(0.9);
  CHECK(b_moments(ghz_overlaps(6, {0.9, 0.0})).second == doctest::Approx(9 * c2 + 1.5 * (1 - c2)).epsilon(1e-10));
  // Below the identities' range the GHZ cross terms survive.
  CHECK(b_moments(ghz_overlaps(1, {0.8, 0.0})).first == doctest::Approx(std::sin(0.8) / 2).epsilon(1e-13));
}

TEST_CASE("analytic derivative agrees with Richardson differences") {
  for (int n : {1, 4, 10, 33}) {
    for (double th : {0.3, 1.0, 2.0}) {
      for (double ph : {0.0, 0.7}) {
        const auto o = ghz_overlaps(n, {th, ph});
        const Eigen::VectorXcd dv = o.derivative_amplitudes();
        const Eigen::VectorXcd fd =
            ref::richardson([&](double x) -> Eigen::VectorXcd { return ghz_overlaps(n, {x, ph}).amplitudes(); }, th, 1e-5);
        const Eigen::VectorXcd v = o.amplitudes();
        for (int i = 0; i <= n; ++i) CHECK(std::abs(dv(i) - fd(i)) <= 1e-7 * std::max(1.0, std::abs(v(i))));
        CHECK(std::abs(o.weight_derivatives().sum()) <= 1e-12);
      }
    }
  }
}

TEST_CASE("derivative at the endpoints is the one-sided limit") {
  for (double th : {0.0, std::numbers::pi}) {
    const double dir = th == 0.0 ? 1.0 : -1.0;
    const auto o = ghz_overlaps(5, {th, 0.0});
    const Eigen::VectorXcd dv = o.derivative_amplitudes();
    CHECK(dv.allFinite());
    const double h = 1e-6;
    // second-order one-sided difference
    const Eigen::VectorXcd f0 = o.amplitudes();
    const Eigen::VectorXcd f1 = ghz_overlaps(5, {th + dir * h, 0.0}).amplitudes();
    const Eigen::VectorXcd f2 = ghz_overlaps(5, {th + dir * 2 * h, 0.0}).amplitudes();
    const Eigen::VectorXcd fd = dir * (-3.0 * f0 + 4.0 * f1 - f2) / (2 * h);
    CHECK((dv - fd).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("density is a rank-one projector") {
  const auto o = ghz_overlaps(9, {1.1, 0.4});
  const Eigen::MatrixXcd rho = o.density();
  CHECK((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(std::abs(rho.trace() - 1.0) <= 1e-12);
  CHECK((rho * rho - rho).cwiseAbs().maxCoeff() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  CHECK(es.eigenvalues().minCoeff() >= -1e-14);
}

TEST_CASE("azimuth enters only through the cross term") {
  // B(phi) - B(0) = +-C(n, k) sin^n(theta) (1 - cos(n phi)) / 2^n, hence at most twice C sin^n / 2^n.
  const double th = 1.0;
  for (int n : {6, 20, 31}) {
    const auto b0 = ghz_overlaps(n, {th, 0.0}).weights;
    for (double ph : {0.5, 1.0, 2.0}) {
      const auto b = ghz_overlaps(n, {th, ph}).weights;
      for (int i = 0; i <= n; ++i) {
        const double scale = std::pow(std::sin(th) / 2, n) * ref::binomial(n, i);
        CHECK(std::abs(b(i) - b0(i)) == doctest::Approx(scale * (1 - std::cos(n * ph))).epsilon(1e-9));
        CHECK(std::abs(b(i) - b0(i)) <= 2 * scale * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("large n stays finite") {
  const auto o = ghz_overlaps(400, {1.3, 0.2});
  CHECK(o.weights.allFinite());
  CHECK(o.weight_derivatives().allFinite());
  CHECK(std::abs(o.weights.sum() - 1) <= 1e-12);
}

TEST_CASE("signed log-sum") {
  std::vector<LogAmplitude> terms{{std::log(3.0), {1, 0}}, {std::log(3.0), {-1, 0}}};
  CHECK(log_sum(terms).value() == std::complex<double>(0));
  terms = {{std::log(2.0), {0, 1}}, {std::log(1.0), {1, 0}}};
  CHECK(std::abs(log_sum(terms).value() - std::complex<double>(1, 2)) <= 1e-15);
  CHECK(log_sum({}).is_zero());
}

TEST_CASE("angles outside the domain are rejected") {
  CHECK_THROWS_AS(ghz_overlaps(3, {-0.1, 0.0}), DomainError);
  CHECK_THROWS_AS(ghz_overlaps(3, {3.2, 0.0}), DomainError);
  CHECK_THROWS_AS(ghz_overlaps(3, {1.0, NAN}), DomainError);
}
