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

#include "ghzsense/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "ghzsense/errors.hpp"

namespace ghzsense {

NoiseParams NoiseParams::markovian(double omega, double gamma, double gamma_prime) {
  NoiseParams p;
  p.omega = omega;
  p.collective = MarkovianDephasing{gamma};
  p.gamma_prime = gamma_prime;
  return p;
}

NoiseParams NoiseParams::lorentzian(double omega, double gamma0, double tau_c, double gamma_prime) {
  NoiseParams p;
  p.omega = omega;
  p.collective = LorentzianDephasing{gamma0, tau_c};
  p.gamma_prime = gamma_prime;
  return p;
}

void NoiseParams::validate() const {
  if (!std::isfinite(omega)) throw DomainError("Omega must be finite");
  if (!(gamma_prime >= 0.0) || !std::isfinite(gamma_prime)) throw DomainError("gamma_prime must be >= 0");
  if (const auto* m = std::get_if<MarkovianDephasing>(&collective)) {
    if (!(m->gamma >= 0.0) || !std::isfinite(m->gamma)) throw DomainError("gamma must be >= 0");
  } else {
    const auto& l = std::get<LorentzianDephasing>(collective);
    if (!(l.gamma0 >= 0.0) || !std::isfinite(l.gamma0)) throw DomainError("gamma0 must be >= 0");
    if (!(l.tau_c > 0.0) || !std::isfinite(l.tau_c)) throw DomainError("tau_c must be > 0");
  }
}

double NoiseParams::collective_rate() const {
  if (const auto* m = std::get_if<MarkovianDephasing>(&collective)) return m->gamma;
  return std::get<LorentzianDephasing>(collective).gamma0;
}

namespace {

// x + expm1(-x) = x^2/2 - x^3/6 + ..., without cancellation for small x.
double lorentzian_shape(double x) {
  if (x < 0.05) {
    double term = x * x / 2.0;
    double sum = 0.0;
    for (int k = 3; k <= 12; ++k) {
      sum += term;
      term *= -x / k;
    }
    return sum;
  }
  return x + std::expm1(-x);
}

}  // namespace

double accumulated_dephasing(const CollectiveModel& model, double t) {
  if (t < 0.0) throw DomainError("time must be >= 0, got t=" + std::to_string(t));
  if (const auto* m = std::get_if<MarkovianDephasing>(&model)) return m->gamma * t;
  const auto& l = std::get<LorentzianDephasing>(model);
  return l.gamma0 * l.tau_c * lorentzian_shape(t / l.tau_c);
}

double instantaneous_dephasing_rate(const CollectiveModel& model, double t) {
  if (t < 0.0) throw DomainError("time must be >= 0, got t=" + std::to_string(t));
  if (const auto* m = std::get_if<MarkovianDephasing>(&model)) return m->gamma;
  const auto& l = std::get<LorentzianDephasing>(model);
  return -l.gamma0 * std::expm1(-t / l.tau_c);
}

std::complex<double> collective_weight(int delta_m, double t, const NoiseParams& params) {
  const double big_gamma = accumulated_dephasing(params.collective, t);
  const double dm = static_cast<double>(delta_m);
  return std::exp(std::complex<double>(-2.0 * big_gamma * dm * dm, -2.0 * params.omega * dm * t));
}

namespace {

void require_top_label(int n, HalfInt m, const char* what) {
  if (std::abs(m.twice()) > n || (n - m.twice()) % 2 != 0) {
    throw DomainError(std::string(what) + ": m = " + m.str() + " is not a valid label for n = " + std::to_string(n));
  }
}

int lowest_sector_holding(const IrrepTable& table, HalfInt m, HalfInt mp) {
  const int need = std::max(std::abs(m.twice()), std::abs(mp.twice()));
  return table.sector_index(HalfInt::from_twice(need));
}

}  // namespace

KFlipRecurrence::KFlipRecurrence(const IrrepTable& table, HalfInt m, HalfInt mp) : n_(table.qubits()) {
  require_top_label(n_, m, "ak_stream");
  require_top_label(n_, mp, "ak_stream");
  const int sectors = table.sector_count();
  first_ = lowest_sector_holding(table, m, mp);
  diag_ = RealVector::Zero(sectors);
  from_above_ = RealVector::Zero(sectors);
  from_below_ = RealVector::Zero(sectors);
  std::vector<BasicMixingCoefficients<Real>> co(static_cast<std::size_t>(sectors));
  for (int s = first_; s < sectors; ++s) co[static_cast<std::size_t>(s)] = mixing_coefficients_as<Real>(table, table.sector(s), m, mp);
  for (int s = first_; s < sectors; ++s) {
    diag_(s) = 4 * co[static_cast<std::size_t>(s)].a;
    if (s + 1 < sectors) from_above_(s) = 4 * co[static_cast<std::size_t>(s + 1)].b;
    if (s > first_) from_below_(s) = 4 * co[static_cast<std::size_t>(s - 1)].c;
  }
  previous_ = RealVector::Zero(sectors);
  current_ = RealVector::Zero(sectors);
  current_(sectors - 1) = 1;
}

bool KFlipRecurrence::advance() {
  if (k_ >= n_) return false;
  const int sectors = static_cast<int>(current_.size());
  RealVector next = RealVector::Zero(sectors);
  const Real drop = static_cast<Real>(n_ - k_ + 1);
  for (int s = first_; s < sectors; ++s) {
    Real acc = diag_(s) * current_(s) - drop * previous_(s);
    if (s + 1 < sectors) acc += from_above_(s) * current_(s + 1);
    if (s > first_) acc += from_below_(s) * current_(s - 1);
    next(s) = acc / static_cast<Real>(k_ + 1);
  }
  previous_ = std::move(current_);
  current_ = std::move(next);
  ++k_;
  return true;
}

KFlipRecurrence ak_stream(const IrrepTable& table, HalfInt m, HalfInt mp) { return KFlipRecurrence(table, m, mp); }

SectorChain::SectorChain(const IrrepTable& table, HalfInt m, HalfInt mp) : n_(table.qubits()) {
  require_top_label(n_, m, "SectorChain");
  require_top_label(n_, mp, "SectorChain");
  first_ = lowest_sector_holding(table, m, mp);
  const int len = table.sector_count() - first_;
  diag_.resize(len);
  upper_ = Eigen::VectorXd::Zero(std::max(len - 1, 0));
  lower_ = Eigen::VectorXd::Zero(std::max(len - 1, 0));
  std::vector<MixingCoefficients> co;
  co.reserve(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) co.push_back(mixing_coefficients(table, table.sector(first_ + i), m, mp));
  for (int i = 0; i < len; ++i) {
    diag_(i) = 4.0 * co[static_cast<std::size_t>(i)].a - n_;
    if (i + 1 < len) {
      upper_(i) = 4.0 * co[static_cast<std::size_t>(i + 1)].b;
      lower_(i) = 4.0 * co[static_cast<std::size_t>(i)].c;
    }
  }
}

Eigen::MatrixXd SectorChain::generator() const {
  const int len = size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(len, len);
  for (int i = 0; i < len; ++i) {
    g(i, i) = diag_(i) + n_;
    if (i + 1 < len) {
      g(i, i + 1) = upper_(i);
      g(i + 1, i) = lower_(i);
    }
  }
  return g;
}

Eigen::VectorXd SectorChain::propagate(double tau) const {
  if (tau < 0.0) throw DomainError("SectorChain::propagate: tau must be >= 0");
  const int len = size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(len);
  x(len - 1) = 1.0;
  const double q = (-diag_).maxCoeff();
  if (tau == 0.0 || q <= 0.0) return x;

  // exp(tau Q) = sum_k Poisson(k; q tau) (I + Q/q)^k, split so each piece has q h <= 20.
  constexpr double kMaxPoissonMean = 20.0;
  const int pieces = std::max(1, static_cast<int>(std::ceil(q * tau / kMaxPoissonMean)));
  const double lambda = q * tau / pieces;
  Eigen::VectorXd term(len), next(len), acc(len);
  for (int piece = 0; piece < pieces; ++piece) {
    term = x;
    double w = std::exp(-lambda);
    acc = w * term;
    int quiet = 0;  // consecutive negligible terms; two guard against parity zeros in P^k
    for (int k = 1;; ++k) {
      for (int i = 0; i < len; ++i) {
        double r = diag_(i) * term(i);
        if (i + 1 < len) r += upper_(i) * term(i + 1);
        if (i > 0) r += lower_(i - 1) * term(i - 1);
        next(i) = term(i) + r / q;
      }
      term.swap(next);
      w *= lambda / k;
      acc += w * term;
      // Every term is nonnegative, so stop once the newest one is negligible relative to each
      // component it touches; deep sectors then keep full relative accuracy for the QFI.
      if (k + 1 >= len && k > 2.0 * lambda) {
        bool settled = true;
        for (int i = 0; i < len && settled; ++i) settled = w * term(i) <= 1e-17 * acc(i);
        quiet = settled ? quiet + 1 : 0;
        if (quiet == 2) break;
      }
    }
    x = acc;
  }
  return x;
}

TopSectorKernel::TopSectorKernel(int n) : n_(n) {
  if (n < 1) throw DomainError("TopSectorKernel: n must be >= 1");
  const auto count = static_cast<std::size_t>((n + 1) * (n + 1));
  offsets_.assign(count + 1, 0);
  for (int i = 0; i <= n; ++i) {
    const int mu = n - i;
    for (int ip = 0; ip <= n; ++ip) {
      const int mup = n - ip;
      const auto idx = static_cast<std::size_t>(i * (n + 1) + ip);
      offsets_[idx] = weight_.size();
      const double norm = log_binomial(n, mup);
      for (int o = std::max(0, mu + mup - n); o <= std::min(mu, mup); ++o) {
        weight_.push_back(std::exp(log_binomial(mu, o) + log_binomial(n - mu, mup - o) - norm));
        distance_.push_back(mu + mup - 2 * o);
      }
    }
  }
  offsets_[count] = weight_.size();
}

void TopSectorKernel::evaluate(double tau, Eigen::MatrixXd& kernel, Eigen::MatrixXd& complement) const {
  if (tau < 0.0) throw DomainError("TopSectorKernel::evaluate: tau must be >= 0");
  const int dim = n_ + 1;
  kernel.resize(dim, dim);
  complement.resize(dim, dim);
  std::vector<double> decay(static_cast<std::size_t>(n_ + 1)), loss(static_cast<std::size_t>(n_ + 1));
  for (int x = 0; x <= n_; ++x) {
    decay[static_cast<std::size_t>(x)] = std::exp(-2.0 * tau * x);
    loss[static_cast<std::size_t>(x)] = -std::expm1(-2.0 * tau * x);
  }
  for (int i = 0; i < dim; ++i) {
    for (int ip = i; ip < dim; ++ip) {
      const auto idx = static_cast<std::size_t>(i * dim + ip);
      double k = 0.0;
      double c = 0.0;
      for (std::size_t e = offsets_[idx]; e < offsets_[idx + 1]; ++e) {
        const auto x = static_cast<std::size_t>(distance_[e]);
        k += weight_[e] * decay[x];
        c += weight_[e] * loss[x];
      }
      kernel(i, ip) = kernel(ip, i) = k;
      complement(i, ip) = complement(ip, i) = c;
    }
  }
}

std::vector<Eigen::MatrixXd> independent_dephasing_weights(const IrrepTable& table, double tau) {
  if (tau < 0.0) throw DomainError("independent_dephasing_weights: tau must be >= 0");
  const int n = table.qubits();
  const int sectors = table.sector_count();
  std::vector<Eigen::MatrixXd> weights(static_cast<std::size_t>(sectors));
  for (int s = 0; s < sectors; ++s) {
    const int dim = sector_dim(table.sector(s));
    weights[static_cast<std::size_t>(s)] = Eigen::MatrixXd::Zero(dim, dim);
  }
  if (tau == 0.0) {
    weights.back().setOnes();
    return weights;
  }

  // The chain depends on (m, m') only through m^2, m'^2, m m' and is symmetric in m <-> m'.
  const int width = n + 1;
  std::vector<std::optional<Eigen::VectorXd>> cache(static_cast<std::size_t>(width * width * 2));
  for (int i = 0; i <= n; ++i) {
    const int M = n - 2 * i;
    for (int ip = 0; ip <= n; ++ip) {
      const int Mp = n - 2 * ip;
      const int hi = std::max(std::abs(M), std::abs(Mp));
      const int lo = std::min(std::abs(M), std::abs(Mp));
      const int opposite = (M * Mp < 0) ? 1 : 0;
      auto& slot = cache[static_cast<std::size_t>((hi * width + lo) * 2 + opposite)];
      if (!slot) {
        slot = SectorChain(table, HalfInt::from_twice(hi), HalfInt::from_twice(opposite ? -lo : lo)).propagate(tau);
      }
      const int first = table.sector_index(HalfInt::from_twice(hi));
      for (int s = first; s < sectors; ++s) {
        const int J = table.sector(s).twice();
        weights[static_cast<std::size_t>(s)]((J - M) / 2, (J - Mp) / 2) = (*slot)(s - first);
      }
    }
  }
  return weights;
}

double BlockState::trace() const {
  double tr = 0.0;
  for (const auto& b : blocks) tr += b.trace().real();
  return tr;
}

double BlockState::purity(const IrrepTable& table) const {
  double p = 0.0;
  for (int s = 0; s < static_cast<int>(blocks.size()); ++s) {
    p += blocks[static_cast<std::size_t>(s)].squaredNorm() / table.degeneracy(table.sector(s)).value();
  }
  return p;
}

double BlockState::lz_mean(const IrrepTable& table) const {
  double acc = 0.0;
  for (int s = 0; s < static_cast<int>(blocks.size()); ++s) {
    const auto& b = blocks[static_cast<std::size_t>(s)];
    const double j = table.sector(s).value();
    for (int r = 0; r < b.rows(); ++r) acc += 2.0 * (j - r) * b(r, r).real();
  }
  return acc;
}

double BlockState::lz2_mean(const IrrepTable& table) const {
  double acc = 0.0;
  for (int s = 0; s < static_cast<int>(blocks.size()); ++s) {
    const auto& b = blocks[static_cast<std::size_t>(s)];
    const double j = table.sector(s).value();
    for (int r = 0; r < b.rows(); ++r) acc += 4.0 * (j - r) * (j - r) * b(r, r).real();
  }
  return acc;
}

BlockState evolve(int n, const Angles& angles, const NoiseParams& params, double t) {
  params.validate();
  if (t < 0.0) throw DomainError("evolve: time must be >= 0, got t=" + std::to_string(t));
  const IrrepTable table(n);
  const GhzOverlaps overlaps = ghz_overlaps(n, angles);
  const Eigen::MatrixXcd rho0 = overlaps.density();
  const auto weights = independent_dephasing_weights(table, params.gamma_prime * t);

  std::vector<std::complex<double>> phase(static_cast<std::size_t>(2 * n + 1));
  for (int d = -n; d <= n; ++d) phase[static_cast<std::size_t>(d + n)] = collective_weight(d, t, params);

  BlockState state;
  state.n = n;
  state.t = t;
  state.blocks.resize(weights.size());
  for (int s = 0; s < table.sector_count(); ++s) {
    const auto& w = weights[static_cast<std::size_t>(s)];
    const int J = table.sector(s).twice();
    auto& c = state.blocks[static_cast<std::size_t>(s)];
    c = Eigen::MatrixXcd::Zero(w.rows(), w.cols());
    for (int r = 0; r < w.rows(); ++r) {
      const int i = (n - J) / 2 + r;  // top-sector index of m = j - r
      for (int rp = 0; rp < w.cols(); ++rp) {
        if (w(r, rp) == 0.0) continue;
        const int ip = (n - J) / 2 + rp;
        c(r, rp) = rho0(i, ip) * phase[static_cast<std::size_t>(ip - i + n)] * w(r, rp);
      }
    }
  }
  return state;
}

SurvivalModel::SurvivalModel(int n, const Angles& angles, const NoiseParams& params)
    : n_(n), params_(params), overlaps_(ghz_overlaps(n, angles)), kernel_(n) {
  params_.validate();
  db_ = overlaps_.weight_derivatives();
}

SurvivalPoint SurvivalModel::at(double t) const {
  if (t < 0.0) throw DomainError("survival probability: time must be >= 0, got t=" + std::to_string(t));
  Eigen::MatrixXd kernel, kernel_loss;
  kernel_.evaluate(params_.gamma_prime * t, kernel, kernel_loss);
  const double big_gamma = accumulated_dephasing(params_.collective, t);
  const Eigen::VectorXd& b = overlaps_.weights;

  const int dim = n_ + 1;
  // direct = Re(w) K, loss = 1 - Re(w) K, imag = Im(w) K
  Eigen::MatrixXd direct(dim, dim), loss(dim, dim), imag(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int ip = 0; ip < dim; ++ip) {
      const double dm = static_cast<double>(ip - i);  // m - m'
      const double damp = 2.0 * big_gamma * dm * dm;
      const double turn = 2.0 * params_.omega * dm * t;
      const double envelope = std::exp(-damp);
      const double re_w = envelope * std::cos(turn);
      const double half = std::sin(0.5 * turn);
      const double one_minus_re_w = -std::expm1(-damp) * std::cos(turn) + 2.0 * half * half;
      direct(i, ip) = re_w * kernel(i, ip);
      loss(i, ip) = one_minus_re_w + re_w * kernel_loss(i, ip);
      imag(i, ip) = -envelope * std::sin(turn) * kernel(i, ip);
    }
  }
  const double p = b.dot(direct * b);
  const double q = b.dot(loss * b);
  const double im = b.dot(imag * b);
  if (std::abs(im) > 1e-8) throw ConsistencyError("survival probability has imaginary part " + std::to_string(im));
  if (std::abs(p + q - 1.0) > 1e-10) {
    throw ConsistencyError("survival probability and its complement disagree: P + (1-P) - 1 = " + std::to_string(p + q - 1.0));
  }
  if (p < -1e-8 || p > 1.0 + 1e-8) throw ConsistencyError("survival probability outside [0, 1]: " + std::to_string(p));

  SurvivalPoint out;
  out.t = t;
  out.p = std::clamp(p, 0.0, 1.0);
  out.complement = std::clamp(q, 0.0, 1.0);
  // sum_m dB_m = 0, so dP = 2 dB.(direct B) = -2 dB.(loss B); the latter has no cancellation at small t.
  out.dp_dtheta = -2.0 * db_.dot(loss * b);
  return out;
}

std::vector<SurvivalPoint> SurvivalModel::at(std::span<const double> times) const {
  std::vector<SurvivalPoint> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(at(t));
  return out;
}

double survival_probability(int n, const Angles& angles, const NoiseParams& params, double t) {
  return SurvivalModel(n, angles, params).at(t).p;
}

double short_time_probability(int n, double theta, double gamma_eff, double gamma_prime, double t) {
  if (n < 3) throw DomainError("short_time_probability: expansion holds for n >= 3, got n=" + std::to_string(n));
  const double c2 = std::cos(theta) * std::cos(theta);
  const double nn = static_cast<double>(n);
  return 1.0 - gamma_eff * t * (nn * nn * c2 + nn * (1.0 - c2)) - gamma_prime * t * nn;
}

}  // namespace ghzsense
