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

#include "ghzsense/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

#include "ghzsense/errors.hpp"

namespace ghzsense {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

ProtocolBudget ProtocolBudget::for_time(double T_total, double t_evolve) {
  if (!(T_total > 0.0)) throw DomainError("T must be > 0, got T=" + num(T_total));
  if (!(t_evolve > 0.0) || t_evolve > T_total) {
    throw DomainError("evolution time t=" + num(t_evolve) + " must lie in (0, T=" + num(T_total) + "]");
  }
  return {T_total, T_total / t_evolve};
}

std::string_view scheme_name(Scheme scheme) { return scheme == Scheme::kGhzProjection ? "ghz" : "qfi"; }

double survival_derivative(int n, const Angles& angles, const NoiseParams& params, double t) {
  return SurvivalModel(n, angles, params).at(t).dp_dtheta;
}

double classical_fisher_ghz(double P, double dPdtheta) { return classical_fisher_ghz(P, 1.0 - P, dPdtheta); }

double classical_fisher_ghz(double P, double one_minus_P, double dPdtheta) {
  if (!(P > 0.0) || !(one_minus_P > 0.0)) {
    throw DegenerateMeasurementError("P=" + num(P) + ": two-outcome measurement is deterministic");
  }
  return dPdtheta * dPdtheta / (P * one_minus_P);
}

UncertaintyResult uncertainty_ghz(const SurvivalModel& model, double t, double T_total) {
  const ProtocolBudget budget = ProtocolBudget::for_time(T_total, t);
  const SurvivalPoint sp = model.at(t);
  if (std::abs(sp.dp_dtheta) < 1e-14) {
    throw SensitivityError("theta=" + num(model.overlaps().angles.theta) + ": estimation insensitive (|dP/dtheta| = " +
                           num(std::abs(sp.dp_dtheta)) + " at t=" + num(t) + ")");
  }
  UncertaintyResult r;
  r.scheme = Scheme::kGhzProjection;
  r.t = t;
  r.P = sp.p;
  r.dPdtheta = sp.dp_dtheta;
  r.fisher = classical_fisher_ghz(sp.p, sp.complement, sp.dp_dtheta);
  r.delta_theta = std::sqrt(sp.p * sp.complement) / (std::abs(sp.dp_dtheta) * std::sqrt(budget.M));
  return r;
}

UncertaintyResult uncertainty_ghz(int n, const Angles& angles, const NoiseParams& params, double t, double T_total) {
  return uncertainty_ghz(SurvivalModel(n, angles, params), t, T_total);
}

QfiModel::QfiModel(int n, double theta, const NoiseParams& params) : table_(n), params_(params) {
  params_.validate();
  const GhzOverlaps ov = ghz_overlaps(n, Angles{theta, 0.0});
  const Eigen::VectorXcd v = ov.amplitudes();
  const Eigen::VectorXcd dv = ov.derivative_amplitudes();
  rho_ = v * v.adjoint();
  drho_ = dv * v.adjoint() + v * dv.adjoint();
  for (int s = 0; s < table_.sector_count(); ++s) jy_.push_back(spin_operators(table_.sector(s)).jy);
}

double QfiModel::at(double t) const {
  if (t < 0.0) throw DomainError("quantum_fisher: time must be >= 0, got t=" + num(t));
  if (t == 0.0) return 0.0;  // the initial state does not depend on theta
  const int n = table_.qubits();
  const auto weights = independent_dephasing_weights(table_, params_.gamma_prime * t);
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(2 * n + 1));
  for (int d = -n; d <= n; ++d) phase[static_cast<std::size_t>(d + n)] = collective_weight(d, t, params_);

  double fisher = 0.0;
  for (int s = 0; s < table_.sector_count(); ++s) {
    const Eigen::MatrixXd& w = weights[static_cast<std::size_t>(s)];
    if (w.cwiseAbs().maxCoeff() == 0.0) continue;
    const int dim = static_cast<int>(w.rows());
    const int offset = (n - table_.sector(s).twice()) / 2;
    Eigen::MatrixXcd c(dim, dim), dc(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int rp = 0; rp < dim; ++rp) {
        const std::complex<double> f = phase[static_cast<std::size_t>(rp - r + n)] * w(r, rp);
        c(r, rp) = rho_(offset + r, offset + rp) * f;
        dc(r, rp) = drho_(offset + r, offset + rp) * f;
      }
    }
    const Eigen::MatrixXcd& jy = jy_[static_cast<std::size_t>(s)];
    const Eigen::MatrixXcd d = dc - std::complex<double>(0.0, 1.0) * (jy * c - c * jy);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(c);
    Eigen::VectorXd lambda = eig.eigenvalues();
    if (lambda.minCoeff() < -1e-10) {
      throw ConsistencyError("block j=" + table_.sector(s).str() + " has eigenvalue " + num(lambda.minCoeff()));
    }
    lambda = lambda.cwiseMax(0.0);
    const double floor = 1e-12 * c.trace().real();
    const Eigen::MatrixXcd dt = eig.eigenvectors().adjoint() * d * eig.eigenvectors();
    for (int k = 0; k < dim; ++k) {
      for (int l = 0; l < dim; ++l) {
        const double den = lambda(k) + lambda(l);
        if (den > floor) fisher += 2.0 * std::norm(dt(k, l)) / den;
      }
    }
  }
  return fisher;
}

double quantum_fisher(int n, double theta, const NoiseParams& params, double t) {
  return QfiModel(n, theta, params).at(t);
}

double quantum_fisher(int n, const Angles& angles, const NoiseParams& params, double t) {
  angles.validate();
  if (angles.phi != 0.0) throw UnsupportedConfiguration("phi=" + num(angles.phi) + ": quantum Fisher information requires phi = 0");
  return quantum_fisher(n, angles.theta, params, t);
}

double quantum_crb(double F_Q, double M) {
  if (!(M >= 1.0)) throw DomainError("M=" + num(M) + ": repetition count must be >= 1");
  if (!(F_Q > 0.0)) throw NoInformationError("F_Q=" + num(F_Q) + ": state carries no information about theta");
  return 1.0 / std::sqrt(M * F_Q);
}

UncertaintyResult uncertainty_qfi(const QfiModel& model, double t, double T_total) {
  const ProtocolBudget budget = ProtocolBudget::for_time(T_total, t);
  UncertaintyResult r;
  r.scheme = Scheme::kQfiBound;
  r.t = t;
  r.P = kNaN;
  r.dPdtheta = kNaN;
  r.fisher = model.at(t);
  r.delta_theta = quantum_crb(r.fisher, budget.M);
  return r;
}

TimeGrid default_time_grid(int n, const NoiseParams& params, double T_total) {
  if (!(T_total > 0.0)) throw DomainError("T must be > 0, got T=" + num(T_total));
  double r_max = 0.0;
  double r_min = kInf;
  for (double r : {std::abs(params.omega), params.collective_rate(), params.gamma_prime}) {
    if (r > 0.0) {
      r_max = std::max(r_max, r);
      r_min = std::min(r_min, r);
    }
  }
  TimeGrid g;
  if (r_max == 0.0) {
    g.t_min = 1e-6 * T_total;
    g.t_max = T_total;
    return g;
  }
  g.t_min = 1e-6 / (static_cast<double>(n) * n * r_max);
  g.t_max = std::min(T_total, 10.0 / r_min);
  if (g.t_min >= g.t_max) g.t_min = 1e-6 * g.t_max;
  return g;
}

OptimizationResult optimize_time(int n, const Angles& angles, const NoiseParams& params, double T_total, Scheme scheme) {
  angles.validate();
  params.validate();
  std::optional<SurvivalModel> survival;
  std::optional<QfiModel> qfi;
  if (scheme == Scheme::kGhzProjection) {
    survival.emplace(n, angles, params);
  } else {
    if (angles.phi != 0.0) throw UnsupportedConfiguration("phi=" + num(angles.phi) + ": QFI bound requires phi = 0");
    qfi.emplace(n, angles.theta, params);
  }
  auto evaluate = [&](double t) -> UncertaintyResult {
    return survival ? uncertainty_ghz(*survival, t, T_total) : uncertainty_qfi(*qfi, t, T_total);
  };
  auto objective = [&](double t) -> double {
    try {
      return evaluate(t).delta_theta;
    } catch (const SensitivityError&) {
    } catch (const DegenerateMeasurementError&) {
    } catch (const NoInformationError&) {
    }
    return kInf;
  };

  const TimeGrid grid = default_time_grid(n, params, T_total);
  OptimizationResult out;
  out.scan.resize(static_cast<std::size_t>(grid.points));
  const double lo = std::log(grid.t_min);
  const double step = (std::log(grid.t_max) - lo) / (grid.points - 1);
  int best = -1;
  for (int i = 0; i < grid.points; ++i) {
    const double t = i + 1 == grid.points ? grid.t_max : std::exp(lo + step * i);
    out.scan[static_cast<std::size_t>(i)] = {t, objective(t)};
    if (std::isfinite(out.scan[static_cast<std::size_t>(i)].objective) &&
        (best < 0 || out.scan[static_cast<std::size_t>(i)].objective < out.scan[static_cast<std::size_t>(best)].objective)) {
      best = i;
    }
  }
  if (best < 0) {
    throw SensitivityError("theta=" + num(angles.theta) + ": estimation insensitive at every evolution time in [" +
                           num(grid.t_min) + ", " + num(grid.t_max) + "]");
  }
  out.coarse_best = out.scan[static_cast<std::size_t>(best)].objective;

  // Golden section in ln t over the two neighbouring grid cells.
  double a = std::log(out.scan[static_cast<std::size_t>(std::max(best - 1, 0))].t);
  double b = std::log(out.scan[static_cast<std::size_t>(std::min(best + 1, grid.points - 1))].t);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(std::exp(x1));
  double f2 = objective(std::exp(x2));
  while (b - a > 1e-6) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(std::exp(x2));
    }
  }
  const double t_golden = std::exp(f1 <= f2 ? x1 : x2);
  const double f_golden = std::min(f1, f2);
  out.t_star = f_golden < out.coarse_best ? t_golden : out.scan[static_cast<std::size_t>(best)].t;
  out.best = evaluate(out.t_star);
  return out;
}

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw DomainError("fit_scaling needs at least 3 points, got " + std::to_string(points.size()));
  const auto count = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd x(count), y(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& [n, d] = points[static_cast<std::size_t>(i)];
    if (!(n > 0.0) || !(d > 0.0)) throw DomainError("fit_scaling: points must be positive, got (" + num(n) + ", " + num(d) + ")");
    x(i) = std::log(n);
    y(i) = std::log(d);
  }
  const double xm = x.mean();
  const double ym = y.mean();
  const double sxx = (x.array() - xm).square().sum();
  if (sxx == 0.0) throw DomainError("fit_scaling: all n are equal");
  ScalingFit fit;
  fit.slope = ((x.array() - xm) * (y.array() - ym)).sum() / sxx;
  fit.intercept = ym - fit.slope * xm;
  fit.residual = std::sqrt((y.array() - fit.intercept - fit.slope * x.array()).square().mean());
  return fit;
}

}  // namespace ghzsense
