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

#include "ghzsense/oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ghzsense/errors.hpp"

namespace ghzsense {
namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

void require_capacity(int n, int limit, const char* what) {
  if (n < 1) throw DomainError(std::string(what) + ": n must be >= 1");
  if (n > limit) {
    throw CapacityError(std::string(what) + ": n=" + std::to_string(n) + " exceeds the dense limit " + std::to_string(limit));
  }
}

// Column-major vec: vec(A X B) = (B^T kron A) vec(X).
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index k = 0; k < a.cols(); ++k) out.block(i * b.rows(), k * b.cols(), b.rows(), b.cols()) = a(i, k) * b;
  }
  return out;
}

struct Operators {
  Eigen::MatrixXcd l;                  // sum_q sigma_z'^(q)
  Eigen::MatrixXcd l2;                 // l * l
  std::vector<Eigen::MatrixXcd> sigma;  // sigma_z'^(q)
};

Operators build_operators(int n, const Angles& angles) {
  Operators ops;
  const Eigen::Matrix2cd sz = sigma_z_prime(angles);
  for (int q = 0; q < n; ++q) ops.sigma.push_back(embed(sz, q, n));
  ops.l = collective(sz, n);
  ops.l2 = ops.l * ops.l;
  return ops;
}

double collective_rate_at(const NoiseParams& params, double t) {
  if (const auto* m = std::get_if<MarkovianDephasing>(&params.collective)) return m->gamma;
  const auto& l = std::get<LorentzianDephasing>(params.collective);
  return l.gamma0 * (1.0 - std::exp(-t / l.tau_c));
}

Eigen::MatrixXcd lindblad_rhs(const Operators& ops, const NoiseParams& params, double t, const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd lr = ops.l * rho;
  const Eigen::MatrixXcd rl = rho * ops.l;
  Eigen::MatrixXcd out = -kI * params.omega * (lr - rl);
  const double g = collective_rate_at(params, t);
  if (g != 0.0) out += g * (lr * ops.l - 0.5 * (ops.l2 * rho + rho * ops.l2));
  if (params.gamma_prime != 0.0) {
    for (const auto& s : ops.sigma) out += params.gamma_prime * (s * rho * s - rho);
  }
  return out;
}

Eigen::MatrixXcd evolve_exponential(const Operators& ops, const NoiseParams& params, double t, const Eigen::MatrixXcd& rho0) {
  const auto dim = rho0.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  const double g = std::get<MarkovianDephasing>(params.collective).gamma;
  Eigen::MatrixXcd gen = -kI * params.omega * (kron(id, ops.l) - kron(ops.l.transpose(), id));
  gen += g * (kron(ops.l.transpose(), ops.l) - 0.5 * kron(id, ops.l2) - 0.5 * kron(ops.l2.transpose(), id));
  for (const auto& s : ops.sigma) {
    gen += params.gamma_prime * kron(s.transpose(), s);
    gen.diagonal().array() -= params.gamma_prime;
  }
  const Eigen::MatrixXcd prop = (gen * t).exp();
  const Eigen::VectorXcd vec = prop * Eigen::Map<const Eigen::VectorXcd>(rho0.data(), dim * dim);
  return Eigen::Map<const Eigen::MatrixXcd>(vec.data(), dim, dim);
}

// Dormand-Prince 5(4) with the usual step-size controller.
Eigen::MatrixXcd evolve_runge_kutta(const Operators& ops, const NoiseParams& params, double t_end, const Eigen::MatrixXcd& rho0) {
  constexpr double kTol = 1e-12;
  static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
  };
  static constexpr double b5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
  static constexpr double b4[7] = {5179.0 / 57600, 0.0, 7571.0 / 16695, 393.0 / 640, -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  Eigen::MatrixXcd rho = rho0;
  if (t_end == 0.0) return rho;
  const double scale = std::abs(params.omega) * ops.l.cwiseAbs().maxCoeff() + params.collective_rate() * ops.l2.cwiseAbs().maxCoeff() +
                       2.0 * params.gamma_prime * static_cast<double>(ops.sigma.size());
  double h = std::min(t_end, scale > 0.0 ? 1e-3 / scale : t_end);
  double t = 0.0;
  std::vector<Eigen::MatrixXcd> k(7);
  while (t < t_end) {
    h = std::min(h, t_end - t);
    k[0] = lindblad_rhs(ops, params, t, rho);
    for (int s = 1; s < 7; ++s) {
      Eigen::MatrixXcd stage = rho;
      for (int r = 0; r < s; ++r) {
        if (a[s][r] != 0.0) stage += h * a[s][r] * k[static_cast<std::size_t>(r)];
      }
      k[static_cast<std::size_t>(s)] = lindblad_rhs(ops, params, t + c[s] * h, stage);
    }
    Eigen::MatrixXcd high = rho;
    Eigen::MatrixXcd diff = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    for (int s = 0; s < 7; ++s) {
      if (b5[s] != 0.0) high += h * b5[s] * k[static_cast<std::size_t>(s)];
      diff += h * (b5[s] - b4[s]) * k[static_cast<std::size_t>(s)];
    }
    const double err = diff.cwiseAbs().maxCoeff() / (kTol * (1.0 + high.cwiseAbs().maxCoeff()));
    if (err <= 1.0) {
      t += h;
      rho = high;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-14 * std::max(t_end, 1.0)) throw StepSizeError("dense Runge-Kutta step collapsed at t=" + std::to_string(t));
  }
  return rho;
}

Eigen::MatrixXcd rho_at(int n, double theta, const NoiseParams& params, double t) {
  return dense_evolve(n, Angles{theta, 0.0}, params, t).rho;
}

// Central differences at h and h/2 combined by Richardson; throws when the two disagree.
template <typename F>
auto richardson(F&& f, double x, double h, const char* what) {
  const auto d1 = ((f(x + h) - f(x - h)) / (2.0 * h)).eval();
  const auto d2 = ((f(x + 0.5 * h) - f(x - 0.5 * h)) / h).eval();
  const auto est = ((4.0 * d2 - d1) / 3.0).eval();
  const double size = est.cwiseAbs().maxCoeff();
  if (size > 0.0 && (est - d2).cwiseAbs().maxCoeff() > 1e-5 * size) {
    throw StepSizeError(std::string(what) + ": Richardson check failed at theta=" + std::to_string(x));
  }
  return est;
}

void require_interior(double theta, double h) {
  if (theta - h < 0.0 || theta + h > std::numbers::pi) {
    throw DomainError("theta=" + std::to_string(theta) + " too close to 0 or pi for central differences");
  }
}

double factorial(int k) { return std::tgamma(k + 1.0); }

}  // namespace

Eigen::Matrix2cd axis_rotation(const Angles& angles) {
  const double c = std::cos(0.5 * angles.theta);
  const double s = std::sin(0.5 * angles.theta);
  const Complex e = std::exp(kI * angles.phi);
  Eigen::Matrix2cd u;
  u << c, -s, e * s, e * c;
  return u;
}

Eigen::Matrix2cd sigma_z_prime(const Angles& angles) {
  const Eigen::Matrix2cd u = axis_rotation(angles);
  Eigen::Matrix2cd sz;
  sz << 1, 0, 0, -1;
  return u * sz * u.adjoint();
}

Eigen::MatrixXcd embed(const Eigen::Matrix2cd& op, int qubit, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 0; q < n; ++q) out = kron(out, q == qubit ? Eigen::MatrixXcd(op) : Eigen::MatrixXcd::Identity(2, 2));
  return out;
}

Eigen::MatrixXcd tensor_power(const Eigen::Matrix2cd& op, int n) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int q = 0; q < n; ++q) out = kron(out, op);
  return out;
}

Eigen::MatrixXcd collective(const Eigen::Matrix2cd& op, int n) {
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int q = 0; q < n; ++q) out += embed(op, q, n);
  return out;
}

Eigen::VectorXcd ghz_vector(int n) {
  const auto dim = Eigen::Index{1} << n;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(0) = psi(dim - 1) = 1.0 / std::sqrt(2.0);
  return psi;
}

DenseState dense_evolve(int n, const Angles& angles, const NoiseParams& params, double t, DenseMethod method) {
  require_capacity(n, kOracleMaxQubits, "dense_evolve");
  angles.validate();
  params.validate();
  if (t < 0.0) throw DomainError("dense_evolve: time must be >= 0, got t=" + std::to_string(t));
  if (method == DenseMethod::kAuto) {
    method = params.is_lorentzian() || n > 4 ? DenseMethod::kRungeKutta : DenseMethod::kExponential;
  }
  if (method == DenseMethod::kExponential && params.is_lorentzian()) {
    throw UnsupportedConfiguration("dense_evolve: the exponential path needs a time-independent generator");
  }
  const Operators ops = build_operators(n, angles);
  const Eigen::VectorXcd psi = ghz_vector(n);
  const Eigen::MatrixXcd rho0 = psi * psi.adjoint();
  DenseState state;
  state.n = n;
  state.t = t;
  state.rho = method == DenseMethod::kExponential ? evolve_exponential(ops, params, t, rho0) : evolve_runge_kutta(ops, params, t, rho0);
  return state;
}

double dense_survival(const DenseState& state) {
  const Eigen::VectorXcd psi = ghz_vector(state.n);
  const Complex p = psi.dot(state.rho * psi);
  if (std::abs(p.imag()) > 1e-10 || p.real() < -1e-10 || p.real() > 1.0 + 1e-10) {
    throw ConsistencyError("dense survival probability out of range");
  }
  return std::clamp(p.real(), 0.0, 1.0);
}

double dense_qfi(int n, double theta, const NoiseParams& params, double t) {
  require_capacity(n, kOracleMaxQfiQubits, "dense_qfi");
  constexpr double h = 1e-5;
  require_interior(theta, h);
  const Eigen::MatrixXcd rho = rho_at(n, theta, params, t);
  const Eigen::MatrixXcd drho = richardson([&](double x) { return rho_at(n, x, params, t); }, theta, h, "dense_qfi");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
  const Eigen::MatrixXcd d = eig.eigenvectors().adjoint() * drho * eig.eigenvectors();
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  double f = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    for (Eigen::Index l = 0; l < lambda.size(); ++l) {
      const double den = lambda(k) + lambda(l);
      if (den > 1e-12) f += 2.0 * std::norm(d(k, l)) / den;
    }
  }
  return f;
}

double dense_pure_qfi(int n, double theta, double omega, double t) {
  require_capacity(n, kOracleMaxQfiQubits, "dense_pure_qfi");
  constexpr double h = 1e-5;
  require_interior(theta, h);
  const Eigen::VectorXcd psi0 = ghz_vector(n);
  auto state = [&](double x) -> Eigen::VectorXcd {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(collective(sigma_z_prime(Angles{x, 0.0}), n));
    const Eigen::VectorXcd phases = (-kI * omega * t * eig.eigenvalues().cast<Complex>()).array().exp();
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint() * psi0;
  };
  const Eigen::VectorXcd psi = state(theta);
  const Eigen::VectorXcd dpsi = richardson(state, theta, h, "dense_pure_qfi");
  return 4.0 * (dpsi.squaredNorm() - std::norm(psi.dot(dpsi)));
}

DenseObservables dense_observables(const DenseState& state, const Angles& angles) {
  const Eigen::MatrixXcd l = collective(sigma_z_prime(angles), state.n);
  const Eigen::MatrixXcd rl = state.rho * l;
  DenseObservables obs;
  obs.purity = (state.rho * state.rho).trace().real();
  obs.lz_mean = rl.trace().real();
  obs.lz2_mean = (rl * l).trace().real();
  return obs;
}

namespace {

// Rows N_m J-^{j-m} Q_j for m = j, j-1, ..., -j, with Q_j the projector onto highest-weight vectors of j.
struct LadderFamily {
  std::vector<Eigen::MatrixXcd> rows;
  double multiplicity = 0.0;
};

LadderFamily ladder_family(int n, HalfInt j) {
  const IrrepTable table(n);
  if (!table.valid_sector(j)) throw DomainError("dense_averaged_unit: j = " + j.str() + " is not a sector of n = " + std::to_string(n));
  Eigen::Matrix2cd up;
  up << 0, 1, 0, 0;
  Eigen::Matrix2cd half_z;
  half_z << 0.5, 0, 0, -0.5;
  const Eigen::MatrixXcd jp = collective(up, n);
  const Eigen::MatrixXcd jm = jp.adjoint();
  const Eigen::MatrixXcd jz = collective(half_z, n);
  const Eigen::MatrixXcd casimir = jz * jz + 0.5 * (jp * jm + jm * jp);
  const auto dim = casimir.rows();
  const double jv = j.value();

  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    if (std::abs(jz(b, b).real() - jv) < 1e-9) q(b, b) = 1.0;
  }
  for (int s = 0; s < table.sector_count(); ++s) {
    const double other = table.sector(s).value();
    if (table.sector(s) == j) continue;
    q = (casimir - other * (other + 1) * Eigen::MatrixXcd::Identity(dim, dim)) * q / (jv * (jv + 1) - other * (other + 1));
  }
  LadderFamily fam;
  fam.multiplicity = q.trace().real();
  Eigen::MatrixXcd lowered = q;
  const int twice_j = j.twice();
  for (int r = 0; r <= twice_j; ++r) {
    const double norm = std::sqrt(factorial(twice_j - r) / (factorial(r) * factorial(twice_j)));
    fam.rows.push_back(norm * lowered);
    lowered = jm * lowered;
  }
  return fam;
}

}  // namespace

Eigen::MatrixXcd dense_averaged_unit(int n, const Angles& angles, HalfInt j, HalfInt m, HalfInt mp) {
  require_capacity(n, kOracleMaxQubits, "dense_averaged_unit");
  if (abs(m) > j || abs(mp) > j || (j - m).twice() % 2 != 0 || (j - mp).twice() % 2 != 0) {
    throw DomainError("dense_averaged_unit: (m, m') = (" + m.str() + ", " + mp.str() + ") outside sector j = " + j.str());
  }
  const LadderFamily fam = ladder_family(n, j);
  const auto& a = fam.rows[static_cast<std::size_t>((j - m).twice() / 2)];
  const auto& b = fam.rows[static_cast<std::size_t>((j - mp).twice() / 2)];
  const Eigen::MatrixXcd r = tensor_power(axis_rotation(angles), n);
  return r * (a * b.adjoint() / fam.multiplicity) * r.adjoint();
}

Eigen::MatrixXcd dense_from_blocks(const BlockState& state, const Angles& angles) {
  const int n = state.n;
  require_capacity(n, kOracleMaxQubits, "dense_from_blocks");
  const IrrepTable table(n);
  const auto dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd z_frame = Eigen::MatrixXcd::Zero(dim, dim);
  for (int s = 0; s < table.sector_count(); ++s) {
    const LadderFamily fam = ladder_family(n, table.sector(s));
    const auto& c = state.blocks[static_cast<std::size_t>(s)];
    for (Eigen::Index r = 0; r < c.rows(); ++r) {
      for (Eigen::Index rp = 0; rp < c.cols(); ++rp) {
        if (c(r, rp) == Complex(0.0)) continue;
        z_frame += c(r, rp) * fam.rows[static_cast<std::size_t>(r)] * fam.rows[static_cast<std::size_t>(rp)].adjoint() / fam.multiplicity;
      }
    }
  }
  const Eigen::MatrixXcd u = tensor_power(axis_rotation(angles), n);
  return u * z_frame * u.adjoint();
}

Eigen::MatrixXcd dense_block_coefficients(const Eigen::MatrixXcd& x, int n, const Angles& angles, HalfInt j) {
  require_capacity(n, kOracleMaxQubits, "dense_block_coefficients");
  const LadderFamily fam = ladder_family(n, j);
  const Eigen::MatrixXcd u = tensor_power(axis_rotation(angles), n);
  const Eigen::MatrixXcd z_frame = u.adjoint() * x * u;
  const int dim = sector_dim(j);
  Eigen::MatrixXcd c(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int rp = 0; rp < dim; ++rp) {
      // d_j tr(E^dagger X) with E = A B^dagger / d_j
      const auto& a = fam.rows[static_cast<std::size_t>(r)];
      const auto& b = fam.rows[static_cast<std::size_t>(rp)];
      c(r, rp) = (b * a.adjoint() * z_frame).trace();
    }
  }
  return c;
}

}  // namespace ghzsense
