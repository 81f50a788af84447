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

#include "ghzsense/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "ghzsense/errors.hpp"
#include "ghzsense/oracle.hpp"

namespace ghzsense {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string short_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

template <typename F>
void parallel_for(std::size_t count, F&& body) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }
  // Report the first failure by index so the message does not depend on scheduling.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double json_number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + ": expected a number");
  return v.get<double>();
}

int json_int(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
  return v.get<int>();
}

Scheme parse_scheme(const std::string& s) {
  if (s == "ghz") return Scheme::kGhzProjection;
  if (s == "qfi") return Scheme::kQfiBound;
  throw ConfigError("scheme: expected 'ghz' or 'qfi', got '" + s + "'");
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    g[static_cast<std::size_t>(i)] = points == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
  }
  return g;
}

CsvRow make_row(int n, const Angles& angles, const NoiseParams& params, double T, const UncertaintyResult& r) {
  CsvRow row;
  row.n = n;
  row.theta = angles.theta;
  row.phi = angles.phi;
  row.params = params;
  row.T = T;
  row.scheme = r.scheme;
  row.t = r.t;
  row.P = r.P;
  row.dPdtheta = r.dPdtheta;
  row.delta_theta = r.delta_theta;
  return row;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("output: cannot open '" + path + "' for writing");
  return f;
}

void emit_rows(const RunConfig& cfg, const std::vector<CsvRow>& rows, std::ostream& out) {
  if (cfg.output.empty() || cfg.output == "-") {
    out << csv_header() << '\n';
    for (const auto& r : rows) out << csv_line(r) << '\n';
  } else {
    write_csv(cfg.output, rows);
  }
}

double local_slope(const CsvRow& a, const CsvRow& b) {
  return std::log(b.delta_theta / a.delta_theta) / std::log(static_cast<double>(b.n) / a.n);
}

}  // namespace

NoiseParams RunConfig::noise() const {
  if (gamma0 || tau_c) return NoiseParams::lorentzian(omega, gamma0.value_or(0.0), tau_c.value_or(1.0), gamma_prime);
  return NoiseParams::markovian(omega, gamma.value_or(0.0), gamma_prime);
}

void RunConfig::validate() const {
  static const std::vector<std::string> kModes = {"evolve", "sweep", "optimize", "qfi", "oracle-check", "fig2", "fig3"};
  if (std::find(kModes.begin(), kModes.end(), mode) == kModes.end()) throw ConfigError("mode: unknown mode '" + mode + "'");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) throw ConfigError("theta=" + short_num(theta) + ": must lie in [0, pi]");
  if (!std::isfinite(phi)) throw ConfigError("phi: must be finite");
  if (!(T > 0.0)) throw ConfigError("T=" + short_num(T) + ": must be > 0");
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] < 1) throw ConfigError("n=" + std::to_string(n[i]) + ": must be >= 1");
    if (i > 0 && n[i] <= n[i - 1]) throw ConfigError("n: list must be strictly increasing");
  }
  if (gamma && (gamma0 || tau_c)) throw ConfigError("gamma: give either gamma or (gamma0, tau_c), not both");
  if (mode != "fig3" && (gamma0.has_value() != tau_c.has_value())) throw ConfigError("gamma0/tau_c: the Lorentzian model needs both");
  if (!tau_c_list.empty() && mode != "fig3") throw ConfigError("tau_c: a list is only accepted by fig3");
  for (double tc : tau_c_list) {
    if (!(tc > 0.0)) throw ConfigError("tau_c=" + short_num(tc) + ": must be > 0");
  }
  try {
    noise().validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const bool single = mode == "evolve" || mode == "sweep" || mode == "optimize" || mode == "qfi";
  if (single && n.empty()) throw ConfigError("n: required for mode " + mode);
  if ((mode == "evolve" || mode == "qfi") && !t) throw ConfigError("t: required for mode " + mode);
  if (t && !(*t >= 0.0)) throw ConfigError("t=" + short_num(*t) + ": must be >= 0");
  if (t_points < 1) throw ConfigError("t_points: must be >= 1");
  if (t_min && t_max && !(*t_min > 0.0 && *t_max >= *t_min)) throw ConfigError("t_min/t_max: need 0 < t_min <= t_max");
  if (seeds < 1) throw ConfigError("seeds: must be >= 1");
  if ((mode == "qfi" || scheme == Scheme::kQfiBound) && phi != 0.0) {
    throw ConfigError("phi=" + short_num(phi) + ": the QFI bound is only supported at phi = 0");
  }
}

void apply_json(RunConfig& cfg, const nlohmann::json& flat) {
  if (!flat.is_object()) throw ConfigError("config: expected a flat JSON object");
  for (const auto& [key, v] : flat.items()) {
    if (key == "mode") {
      if (!v.is_string()) throw ConfigError("mode: expected a string");
      cfg.mode = v.get<std::string>();
    } else if (key == "n") {
      cfg.n.clear();
      if (v.is_array()) {
        for (const auto& x : v) cfg.n.push_back(json_int(x, "n"));
      } else {
        cfg.n.push_back(json_int(v, "n"));
      }
    } else if (key == "theta") {
      cfg.theta = json_number(v, key);
    } else if (key == "phi") {
      cfg.phi = json_number(v, key);
    } else if (key == "Omega") {
      cfg.omega = json_number(v, key);
    } else if (key == "gamma") {
      cfg.gamma = json_number(v, key);
    } else if (key == "gamma0") {
      cfg.gamma0 = json_number(v, key);
    } else if (key == "tau_c") {
      cfg.tau_c_list.clear();
      cfg.tau_c.reset();
      if (v.is_array()) {
        for (const auto& x : v) cfg.tau_c_list.push_back(json_number(x, key));
      } else {
        cfg.tau_c = json_number(v, key);
      }
    } else if (key == "gamma_prime") {
      cfg.gamma_prime = json_number(v, key);
    } else if (key == "T") {
      cfg.T = json_number(v, key);
    } else if (key == "t") {
      cfg.t = json_number(v, key);
    } else if (key == "t_min") {
      cfg.t_min = json_number(v, key);
    } else if (key == "t_max") {
      cfg.t_max = json_number(v, key);
    } else if (key == "t_points") {
      cfg.t_points = json_int(v, key);
    } else if (key == "scheme") {
      if (!v.is_string()) throw ConfigError("scheme: expected a string");
      cfg.scheme = parse_scheme(v.get<std::string>());
    } else if (key == "output") {
      if (!v.is_string()) throw ConfigError("output: expected a string");
      cfg.output = v.get<std::string>();
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !v.is_number_integer()) throw ConfigError("seed: expected an integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "seeds") {
      cfg.seeds = json_int(v, key);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read '" + path + "'");
  RunConfig cfg;
  try {
    apply_json(cfg, nlohmann::json::parse(f));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  return cfg;
}

std::string csv_header() { return "n,theta,phi,Omega,gamma,gamma0,tau_c,gamma_prime,T,scheme,t_opt,P,dP_dtheta,delta_theta"; }

std::string csv_line(const CsvRow& r) {
  std::string gamma, gamma0, tau_c;
  if (const auto* m = std::get_if<MarkovianDephasing>(&r.params.collective)) {
    gamma = fmt(m->gamma);
  } else {
    const auto& l = std::get<LorentzianDephasing>(r.params.collective);
    gamma0 = fmt(l.gamma0);
    tau_c = fmt(l.tau_c);
  }
  std::ostringstream s;
  s << r.n << ',' << fmt(r.theta) << ',' << fmt(r.phi) << ',' << fmt(r.params.omega) << ',' << gamma << ',' << gamma0 << ','
    << tau_c << ',' << fmt(r.params.gamma_prime) << ',' << fmt(r.T) << ',' << scheme_name(r.scheme) << ',' << fmt(r.t) << ','
    << fmt(r.P) << ',' << fmt(r.dPdtheta) << ',' << fmt(r.delta_theta);
  return s.str();
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  auto f = open_output(path);
  f << csv_header() << '\n';
  for (const auto& r : rows) f << csv_line(r) << '\n';
}

int worker_count() {
  if (const char* env = std::getenv("GHZSENSE_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

std::vector<Curve> fig2_curves() {
  const std::vector<int> dephasing = {8, 16, 32, 64, 128};
  const std::vector<int> field = {4, 8, 16, 32, 64};
  return {
      {"collective_gp0", Scheme::kGhzProjection, NoiseParams::markovian(0, 1, 0), dephasing},
      {"collective_gp1", Scheme::kGhzProjection, NoiseParams::markovian(0, 1, 1), dephasing},
      {"field_gp0", Scheme::kQfiBound, NoiseParams::markovian(1, 0, 0), field},
      {"field_gp1", Scheme::kQfiBound, NoiseParams::markovian(1, 0, 1), field},
  };
}

std::vector<double> fig3_default_tau_c(double theta) {
  if (std::abs(theta - 0.5) < 1e-12) return {0.005, 0.0001};
  return {0.01, 0.001};
}

std::vector<Curve> fig3_curves(const std::vector<double>& tau_c) {
  const std::vector<int> grid = {8, 16, 32, 64, 128};
  std::vector<Curve> curves = {{"field_gp1", Scheme::kQfiBound, NoiseParams::markovian(1, 0, 1), grid}};
  for (double tc : tau_c) {
    curves.push_back({"lorentzian_tc" + short_num(tc), Scheme::kGhzProjection, NoiseParams::lorentzian(0, 1, tc, 1), grid});
  }
  return curves;
}

std::vector<CurveResult> run_curves(const std::vector<Curve>& curves, double theta, double T) {
  struct Task {
    std::size_t curve;
    std::size_t point;
  };
  std::vector<Task> tasks;
  std::vector<CurveResult> results(curves.size());
  for (std::size_t c = 0; c < curves.size(); ++c) {
    results[c].curve = curves[c];
    results[c].rows.resize(curves[c].n.size());
    results[c].t_star.resize(curves[c].n.size());
    for (std::size_t p = 0; p < curves[c].n.size(); ++p) tasks.push_back({c, p});
  }
  // Largest problems first keeps the pool busy; results land in fixed slots either way.
  std::stable_sort(tasks.begin(), tasks.end(),
                   [&](const Task& a, const Task& b) { return curves[a.curve].n[a.point] > curves[b.curve].n[b.point]; });
  const Angles angles{theta, 0.0};
  parallel_for(tasks.size(), [&](std::size_t i) {
    const Task& task = tasks[i];
    const Curve& curve = curves[task.curve];
    const int n = curve.n[task.point];
    const OptimizationResult opt = optimize_time(n, angles, curve.params, T, curve.scheme);
    results[task.curve].rows[task.point] = make_row(n, angles, curve.params, T, opt.best);
    results[task.curve].t_star[task.point] = opt.t_star;
  });
  for (auto& r : results) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : r.rows) pts.emplace_back(row.n, row.delta_theta);
    if (pts.size() >= 3) r.fit = fit_scaling(pts);
    if (r.rows.size() >= 2) r.last_local_slope = local_slope(r.rows[r.rows.size() - 2], r.rows.back());
  }
  return results;
}

void write_figure(const std::string& dir, const std::string& prefix, const std::vector<CurveResult>& results) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("output: cannot create directory '" + dir + "'");
  for (const auto& r : results) write_csv((std::filesystem::path(dir) / (prefix + "_" + r.curve.name + ".csv")).string(), r.rows);
  auto f = open_output((std::filesystem::path(dir) / "slopes.txt").string());
  f << "# curve slope intercept rms_residual last_local_slope (HL slope -1, SQL slope -0.5)\n";
  for (const auto& r : results) {
    f << r.curve.name << ' ' << fmt(r.fit.slope) << ' ' << fmt(r.fit.intercept) << ' ' << fmt(r.fit.residual) << ' '
      << fmt(r.last_local_slope) << '\n';
  }
}

OracleReport oracle_check(int seeds, std::uint64_t base_seed) {
  OracleReport report;
  for (int n = 1; n <= 4; ++n) {
    for (int s = 0; s < seeds; ++s) {
      OracleCase c;
      c.seed = base_seed + static_cast<std::uint64_t>(1000 * n + s);
      c.n = n;
      std::mt19937_64 rng(c.seed);
      std::uniform_real_distribution<double> theta(0.1, std::numbers::pi - 0.1), phi(0.0, 2.0 * std::numbers::pi), rate(0.0, 2.0),
          log_exponent(std::log(0.01), std::log(5.0));
      c.angles = {theta(rng), phi(rng)};
      const double omega = rate(rng), gamma = rate(rng), gamma_prime = rate(rng);
      c.params = NoiseParams::markovian(omega, gamma, gamma_prime);
      const double speed = std::max({2.0 * gamma * n * n + 2.0 * gamma_prime * n, std::abs(omega) * n, 0.1});
      c.t = std::exp(log_exponent(rng)) / speed;

      const DenseState dense = dense_evolve(n, c.angles, c.params, c.t);
      const IrrepTable table(n);
      const BlockState blocks = evolve(n, c.angles, c.params, c.t);
      c.p_error = std::abs(SurvivalModel(n, c.angles, c.params).at(c.t).p - dense_survival(dense));
      c.purity_error = std::abs(blocks.purity(table) - dense_observables(dense, c.angles).purity);
      try {
        const double f_dense = dense_qfi(n, c.angles.theta, c.params, c.t);
        const double f_block = quantum_fisher(n, c.angles.theta, c.params, c.t);
        c.qfi_rel_error = std::abs(f_block - f_dense) / f_dense;
      } catch (const StepSizeError&) {
        c.qfi_rel_error = std::numeric_limits<double>::infinity();
      }
      report.max_p_error = std::max(report.max_p_error, c.p_error);
      report.max_purity_error = std::max(report.max_purity_error, c.purity_error);
      report.max_qfi_rel_error = std::max(report.max_qfi_rel_error, c.qfi_rel_error);
      report.cases.push_back(c);
    }
  }
  return report;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": '" + s + "' is not a number");
  }
}

}  // namespace

PlotFiles emit_plotdata(const std::vector<std::string>& csv_paths, const std::string& data_file_name) {
  if (csv_paths.empty()) throw ConfigError("plot: no CSV files given");
  struct Series {
    std::string label;
    std::vector<std::pair<int, double>> points;
  };
  std::vector<Series> series;
  std::map<std::string, std::size_t> index;
  for (const auto& path : csv_paths) {
    std::ifstream f(path);
    if (!f) throw ConfigError("plot: cannot read '" + path + "'");
    std::string line;
    if (!std::getline(f, line) || split(line) != split(csv_header())) throw ConfigError("plot: '" + path + "' lacks the expected header");
    int line_no = 1;
    while (std::getline(f, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      const auto fields = split(line);
      const std::string where = path + ":" + std::to_string(line_no);
      if (fields.size() != 14) throw ConfigError(where + ": expected 14 fields, got " + std::to_string(fields.size()));
      const double n = parse_number(fields[0], where);
      const double delta = parse_number(fields[13], where);
      if (!(n >= 1.0) || !(delta > 0.0)) throw ConfigError(where + ": n and delta_theta must be positive");
      std::string label = fields[9] + " theta=" + fields[1] + " Omega=" + fields[3];
      label += fields[4].empty() ? " gamma0=" + fields[5] + " tau_c=" + fields[6] : " gamma=" + fields[4];
      label += " gamma'=" + fields[7];
      auto [it, fresh] = index.emplace(label, series.size());
      if (fresh) series.push_back({label, {}});
      series[it->second].points.emplace_back(static_cast<int>(n), delta);
    }
  }
  if (series.empty()) throw ConfigError("plot: CSV input has no data rows");

  PlotFiles out;
  std::ostringstream data, script;
  for (const auto& s : series) {
    data << "# " << s.label << "\n# n delta_theta\n";
    for (const auto& [n, d] : s.points) data << n << ' ' << fmt(d) << '\n';
    data << "\n\n";
  }
  const auto& [n0, d0] = series.front().points.front();
  script << "# log-log plot of minimized uncertainty against qubit number\n"
         << "set logscale xy\n"
         << "set xlabel \"n\"\n"
         << "set ylabel \"minimized uncertainty\"\n"
         << "set key outside right\n"
         << "hl(x) = " << fmt(d0 * n0) << " / x\n"
         << "sql(x) = " << fmt(d0 * std::sqrt(static_cast<double>(n0))) << " / sqrt(x)\n"
         << "plot \\\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    script << "  '" << data_file_name << "' index " << i << " using 1:2 with linespoints title \"" << series[i].label << "\", \\\n";
  }
  script << "  hl(x) with lines dt 1 lc rgb 'black' title \"HL (slope -1)\", \\\n"
         << "  sql(x) with lines dt 2 lc rgb 'black' title \"SQL (slope -1/2)\"\n";
  out.data = data.str();
  out.script = script.str();
  return out;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.validate();
    const Angles angles{cfg.theta, cfg.phi};
    const NoiseParams params = cfg.noise();
    std::vector<CsvRow> rows;

    if (cfg.mode == "evolve") {
      for (int n : cfg.n) {
        const IrrepTable table(n);
        const BlockState st = evolve(n, angles, params, *cfg.t);
        const SurvivalPoint sp = SurvivalModel(n, angles, params).at(*cfg.t);
        CsvRow row = make_row(n, angles, params, cfg.T, {*cfg.t, sp.p, sp.dp_dtheta, 0.0, kNaN, Scheme::kGhzProjection});
        try {
          row.delta_theta = uncertainty_ghz(n, angles, params, *cfg.t, cfg.T).delta_theta;
        } catch (const std::runtime_error&) {
        } catch (const DomainError&) {
        }
        err << "n=" << n << " t=" << fmt(*cfg.t) << " trace=" << fmt(st.trace()) << " purity=" << fmt(st.purity(table))
            << " <Lz'>=" << fmt(st.lz_mean(table)) << " <Lz'^2>=" << fmt(st.lz2_mean(table)) << '\n';
        rows.push_back(row);
      }
      emit_rows(cfg, rows, out);
    } else if (cfg.mode == "sweep") {
      for (int n : cfg.n) {
        const TimeGrid g = default_time_grid(n, params, cfg.T);
        const auto grid = log_grid(cfg.t_min.value_or(g.t_min), cfg.t_max.value_or(g.t_max), cfg.t_points);
        std::optional<SurvivalModel> survival;
        std::optional<QfiModel> qfi;
        if (cfg.scheme == Scheme::kGhzProjection) {
          survival.emplace(n, angles, params);
        } else {
          qfi.emplace(n, cfg.theta, params);
        }
        for (double t : grid) {
          UncertaintyResult r{t, kNaN, kNaN, 0.0, kNaN, cfg.scheme};
          try {
            r = survival ? uncertainty_ghz(*survival, t, cfg.T) : uncertainty_qfi(*qfi, t, cfg.T);
          } catch (const SensitivityError&) {
          } catch (const DegenerateMeasurementError&) {
          } catch (const NoInformationError&) {
          }
          if (survival && std::isnan(r.P)) {
            const SurvivalPoint sp = survival->at(t);
            r.P = sp.p;
            r.dPdtheta = sp.dp_dtheta;
          }
          rows.push_back(make_row(n, angles, params, cfg.T, r));
        }
      }
      emit_rows(cfg, rows, out);
    } else if (cfg.mode == "optimize") {
      for (int n : cfg.n) rows.push_back(make_row(n, angles, params, cfg.T, optimize_time(n, angles, params, cfg.T, cfg.scheme).best));
      emit_rows(cfg, rows, out);
    } else if (cfg.mode == "qfi") {
      for (int n : cfg.n) {
        const QfiModel model(n, cfg.theta, params);
        const double f = model.at(*cfg.t);
        err << "n=" << n << " t=" << fmt(*cfg.t) << " F_Q=" << fmt(f) << '\n';
        rows.push_back(make_row(n, angles, params, cfg.T, uncertainty_qfi(model, *cfg.t, cfg.T)));
      }
      emit_rows(cfg, rows, out);
    } else if (cfg.mode == "oracle-check") {
      const OracleReport rep = oracle_check(cfg.seeds, cfg.seed);
      out << "# seed n theta phi Omega gamma gamma_prime t |dP| |dpurity| rel_dF_Q\n";
      for (const auto& c : rep.cases) {
        out << c.seed << ' ' << c.n << ' ' << fmt(c.angles.theta) << ' ' << fmt(c.angles.phi) << ' ' << fmt(c.params.omega) << ' '
            << fmt(c.params.collective_rate()) << ' ' << fmt(c.params.gamma_prime) << ' ' << fmt(c.t) << ' ' << fmt(c.p_error)
            << ' ' << fmt(c.purity_error) << ' ' << fmt(c.qfi_rel_error) << '\n';
      }
      out << "max |P_block - P_dense| = " << fmt(rep.max_p_error) << " (tolerance 1e-8)\n"
          << "max |purity_block - purity_dense| = " << fmt(rep.max_purity_error) << " (tolerance 1e-8)\n"
          << "max relative F_Q deviation = " << fmt(rep.max_qfi_rel_error) << " (tolerance 1e-6)\n";
      if (!rep.passed()) {
        err << "oracle-check: block solver disagrees with the dense oracle\n";
        return 4;
      }
    } else {
      const bool fig2 = cfg.mode == "fig2";
      std::vector<Curve> curves = fig2 ? fig2_curves() : fig3_curves(cfg.tau_c_list.empty() ? fig3_default_tau_c(cfg.theta) : cfg.tau_c_list);
      if (!cfg.n.empty()) {
        for (auto& c : curves) c.n = cfg.n;
      }
      const auto results = run_curves(curves, cfg.theta, cfg.T);
      const std::string dir = cfg.output.empty() ? cfg.mode + "_theta" + short_num(cfg.theta) : cfg.output;
      write_figure(dir, cfg.mode, results);
      for (const auto& r : results) {
        out << r.curve.name << ": slope " << fmt(r.fit.slope) << " (rms " << fmt(r.fit.residual) << "), last local slope "
            << fmt(r.last_local_slope) << '\n';
      }
      out << "wrote " << dir << '\n';
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedConfiguration& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const SensitivityError& e) {
    err << "sensitivity error: " << e.what() << '\n';
    return 3;
  } catch (const NoInformationError& e) {
    err << "no-information error: " << e.what() << '\n';
    return 3;
  } catch (const DegenerateMeasurementError& e) {
    err << "degenerate measurement: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "internal consistency error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace ghzsense
