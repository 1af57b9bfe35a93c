#include "iongate/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "iongate/cli/config.hpp"
#include "iongate/cli/dataset_io.hpp"
#include "iongate/error.hpp"
#include "iongate/noise.hpp"
#include "iongate/sideband.hpp"

namespace iongate::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2;

using ojson = nlohmann::ordered_json;

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw DataError("write failed for '" + path.string() + "'");
}

void emit(const std::string& out_path, const std::string& content, std::ostream& out) {
  if (out_path.empty()) {
    out << content;
  } else {
    write_file(out_path, content);
  }
}

fock::MotionalSpec motion_spec(double alpha_sq, double phi, double nbar) {
  return fock::MotionalSpec::from_alpha_sq(alpha_sq, phi, nbar, fock::kMinTruncation);
}

template <class T>
std::vector<T> or_default(const std::vector<T>& v, T fallback) {
  return v.empty() ? std::vector<T>{fallback} : v;
}

ErrorRow make_row(double delta_nu_hz, double alpha_sq, double phi, double nbar, const channel::ErrorReport& r,
                  double sigma_hz = 0.0) {
  return {delta_nu_hz, alpha_sq, phi, nbar, r.infidelity, r.diamond_distance, sigma_hz};
}

// --- scenario runners ------------------------------------------------------

std::vector<ErrorRow> run_sweep(const RunConfig& c) {
  const auto params = c.gate.params();
  std::vector<msgate::FrequencyOffset> offsets;
  for (double hz : c.sweep.delta_nu_hz) offsets.push_back({kTwoPi * hz});
  std::vector<ErrorRow> rows;
  for (double a : or_default(c.sweep.alpha_sq, c.motion.alpha_sq)) {
    for (double phi : or_default(c.sweep.phi_rad, c.motion.phi_rad)) {
      const auto spec = motion_spec(a, phi, c.motion.nbar);
      if (c.noise.sigma_hz == 0.0) {
        const auto sweep = noise::drift_sweep(params, spec, offsets, c.leakage);
        for (std::size_t k = 0; k < sweep.size(); ++k) {
          rows.push_back(make_row(c.sweep.delta_nu_hz[k], a, phi, c.motion.nbar, sweep[k].report));
        }
      } else {
        // Shot-to-shot noise on top of each drift value.
        for (double hz : c.sweep.delta_nu_hz) {
          noise::NoiseModel m = c.noise.model();
          m.center = kTwoPi * hz;
          noise::AverageOptions opt;
          opt.leakage = c.leakage;
          rows.push_back(make_row(hz, a, phi, c.motion.nbar, noise::averaged_gate_error(params, spec, m, opt)));
        }
      }
    }
  }
  return rows;
}

std::vector<ErrorRow> run_phase_scan(const RunConfig& c) {
  const auto params = c.gate.params();
  std::vector<ErrorRow> rows;
  for (double a : or_default(c.phase_scan.alpha_sq, c.motion.alpha_sq)) {
    const auto scan = noise::phase_scan(params, motion_spec(a, 0.0, c.motion.nbar), c.noise.model(),
                                        c.phase_scan.phi_rad, c.leakage);
    for (const auto& r : scan) {
      rows.push_back(make_row(c.noise.center_hz, a, r.phi, c.motion.nbar, r.report, c.noise.sigma_hz));
    }
  }
  return rows;
}

std::vector<ErrorRow> run_surface(const RunConfig& c) {
  const auto params = c.gate.params();
  std::vector<ErrorRow> rows;
  for (double phi : or_default(c.surface.phi_rad, c.motion.phi_rad)) {
    const auto s = noise::error_surface(params, c.noise.model(), c.surface.alpha_sq, c.surface.nbar, phi, c.leakage);
    for (const auto& cell : s.cells) {
      rows.push_back(make_row(c.noise.center_hz, cell.alpha_sq, phi, cell.nbar, cell.report, c.noise.sigma_hz));
    }
  }
  return rows;
}

std::vector<ErrorRow> run_average(const RunConfig& c) {
  const auto params = c.gate.params();
  std::vector<ErrorRow> rows;
  noise::AverageOptions opt;
  opt.leakage = c.leakage;
  for (double sigma : or_default(c.average.sigma_hz, c.noise.sigma_hz)) {
    for (double phi : or_default(c.average.phi_rad, c.motion.phi_rad)) {
      noise::NoiseModel m = c.noise.model();
      m.sigma = kTwoPi * sigma;
      const auto r = noise::averaged_gate_error(params, motion_spec(c.motion.alpha_sq, phi, c.motion.nbar), m, opt);
      rows.push_back(make_row(c.noise.center_hz, c.motion.alpha_sq, phi, c.motion.nbar, r, sigma));
    }
  }
  return rows;
}

std::string error_csv(const std::vector<ErrorRow>& rows, bool with_sigma) {
  std::ostringstream s;
  write_error_csv(s, rows, with_sigma);
  return s.str();
}

// --- reproduction presets ----------------------------------------------------

struct Check {
  std::string name;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string mode;  // "relative", "absolute", "below"
  bool pass = false;
};

Check relative(std::string name, double value, double expected, double tol) {
  return {std::move(name), value, expected, tol, "relative", std::abs(value - expected) <= tol * std::abs(expected)};
}

Check absolute(std::string name, double value, double expected, double tol) {
  return {std::move(name), value, expected, tol, "absolute", std::abs(value - expected) <= tol};
}

Check below(std::string name, double value, double bound) {
  return {std::move(name), value, bound, bound, "below", value < bound};
}

ojson summary_json(const std::string& id, const std::vector<Check>& checks, const std::vector<std::string>& files) {
  ojson j;
  j["id"] = id;
  j["outputs"] = files;
  j["checks"] = ojson::array();
  int passed = 0;
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"value", c.value},
                           {"expected", c.expected},
                           {"tolerance", c.tolerance},
                           {"mode", c.mode},
                           {"pass", c.pass}});
    passed += c.pass;
  }
  j["passed"] = passed;
  j["failed"] = static_cast<int>(checks.size()) - passed;
  return j;
}

RunConfig reference_config() {
  RunConfig c;
  c.gate = {2, 60.0, 3.0};
  return c;
}

std::vector<double> steps(double start, double stop, double step) {
  std::vector<double> v;
  const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (int i = 0; i < n; ++i) v.push_back(start + i * step);
  return v;
}

const ErrorRow& find_row(const std::vector<ErrorRow>& rows, std::function<bool(const ErrorRow&)> pred) {
  const auto it = std::find_if(rows.begin(), rows.end(), pred);
  if (it == rows.end()) throw DomainError("internal: row not found");
  return *it;
}

bool near(double a, double b) { return std::abs(a - b) < 1e-9; }

std::vector<Check> reproduce_fig1(const std::filesystem::path& dir, std::vector<std::string>& files) {
  RunConfig c = reference_config();
  c.sweep.delta_nu_hz = steps(-5000.0, 5000.0, 250.0);
  c.sweep.alpha_sq = steps(0.0, 2.0, 0.4);
  c.sweep.phi_rad = {0.0, kHalfPi};
  const auto rows = run_sweep(c);
  write_file(dir / "fig1.csv", error_csv(rows, false));
  files.push_back("fig1.csv");

  std::vector<Check> checks;
  double worst_zero = 0.0, phase_gap = 0.0;
  int non_monotone = 0, non_ordered = 0;
  for (const auto& r : rows) {
    if (near(r.delta_nu_hz, 0.0)) worst_zero = std::max(worst_zero, r.infidelity);
    if (near(r.alpha_sq, 0.0) && near(r.phi_rad, 0.0)) {
      const auto& other = find_row(rows, [&](const ErrorRow& o) {
        return near(o.alpha_sq, 0.0) && near(o.phi_rad, kHalfPi) && near(o.delta_nu_hz, r.delta_nu_hz);
      });
      phase_gap = std::max({phase_gap, std::abs(r.infidelity - other.infidelity),
                            std::abs(r.diamond_distance - other.diamond_distance)});
    }
  }
  // Along each curve the error grows with |delta nu| out to 3 kHz, and at 5 kHz
  // it grows with |alpha|^2.
  for (double a : c.sweep.alpha_sq) {
    for (double phi : c.sweep.phi_rad) {
      for (double sign : {-1.0, 1.0}) {
        double prev = -1.0;
        for (double hz = 0.0; hz <= 3000.0 + 1e-9; hz += 250.0) {
          const auto& r = find_row(rows, [&](const ErrorRow& o) {
            return near(o.alpha_sq, a) && near(o.phi_rad, phi) && near(o.delta_nu_hz, sign * hz);
          });
          if (r.infidelity <= prev) ++non_monotone;
          prev = r.infidelity;
        }
      }
      if (a > 0.0) {
        const auto& r = find_row(rows, [&](const ErrorRow& o) {
          return near(o.alpha_sq, a) && near(o.phi_rad, phi) && near(o.delta_nu_hz, -5000.0);
        });
        const auto& lower = find_row(rows, [&](const ErrorRow& o) {
          return near(o.alpha_sq, a - 0.4) && near(o.phi_rad, phi) && near(o.delta_nu_hz, -5000.0);
        });
        if (!(r.infidelity > lower.infidelity)) ++non_ordered;
      }
    }
  }
  checks.push_back(below("perfect gate at zero offset for every displacement: max infidelity", worst_zero, 1e-8));
  checks.push_back(below("no displacement: phi=0 and phi=pi/2 curves coincide", phase_gap, 1e-9));
  checks.push_back(absolute("curves non-monotone in |delta nu| up to 3 kHz", non_monotone, 0.0, 0.0));
  checks.push_back(absolute("curves not ordered by |alpha|^2 at -5 kHz", non_ordered, 0.0, 0.0));
  return checks;
}

std::vector<Check> reproduce_fig2(const std::filesystem::path& dir, std::vector<std::string>& files) {
  RunConfig c = reference_config();
  c.noise.sigma_hz = 600.0;
  c.phase_scan.alpha_sq = steps(0.0, 2.0, 0.4);
  for (int k = 0; k <= 32; ++k) c.phase_scan.phi_rad.push_back(std::numbers::pi * k / 32);
  const auto rows = run_phase_scan(c);
  write_file(dir / "fig2.csv", error_csv(rows, true));
  files.push_back("fig2.csv");

  std::vector<Check> checks;
  const ErrorRow* best = nullptr;
  double flat = 0.0, period = 0.0;
  const double base0 = find_row(rows, [](const ErrorRow& r) { return near(r.alpha_sq, 0.0); }).infidelity;
  for (const auto& r : rows) {
    if (near(r.alpha_sq, 2.0) && (!best || r.infidelity < best->infidelity)) best = &r;
    if (near(r.alpha_sq, 0.0)) flat = std::max(flat, std::abs(r.infidelity - base0));
    if (near(r.phi_rad, 0.0)) {
      const auto& end = find_row(rows, [&](const ErrorRow& o) {
        return near(o.alpha_sq, r.alpha_sq) && near(o.phi_rad, std::numbers::pi);
      });
      period = std::max({period, std::abs(end.infidelity - r.infidelity), std::abs(end.diamond_distance - r.diamond_distance)});
    }
  }
  checks.push_back(absolute("|alpha|^2=2: phase of minimum infidelity (rad)", best->phi_rad, kHalfPi, 1e-9));
  checks.push_back(below("no displacement: infidelity independent of phi", flat, 1e-9));
  checks.push_back(below("phi and phi+pi give equal metrics", period, 1e-6));
  return checks;
}

std::vector<Check> reproduce_fig3(const std::filesystem::path& dir, std::vector<std::string>& files) {
  RunConfig c = reference_config();
  c.noise.sigma_hz = 600.0;
  c.surface.alpha_sq = steps(0.0, 2.0, 0.25);
  c.surface.nbar = steps(0.0, 2.0, 0.25);
  c.surface.phi_rad = {0.0, kHalfPi};
  const auto rows = run_surface(c);
  write_file(dir / "fig3.csv", error_csv(rows, true));
  files.push_back("fig3.csv");

  int violations = 0;
  const std::size_t na = c.surface.alpha_sq.size(), nn = c.surface.nbar.size();
  for (std::size_t p = 0; p < c.surface.phi_rad.size(); ++p) {
    auto at = [&](std::size_t i, std::size_t j) -> const ErrorRow& { return rows[p * na * nn + i * nn + j]; };
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nn; ++j) {
        if (i > 0 && (at(i, j).infidelity < at(i - 1, j).infidelity - 1e-6 ||
                      at(i, j).diamond_distance < at(i - 1, j).diamond_distance - 1e-6)) {
          ++violations;
        }
        if (j > 0 && (at(i, j).infidelity < at(i, j - 1).infidelity - 1e-6 ||
                      at(i, j).diamond_distance < at(i, j - 1).diamond_distance - 1e-6)) {
          ++violations;
        }
      }
    }
  }
  return {absolute("grid steps where the error decreases along |alpha|^2 or nbar", violations, 0.0, 0.0)};
}

std::vector<Check> reproduce_sec4(const std::filesystem::path& dir, std::vector<std::string>& files) {
  const auto params = reference_config().gate.params();
  std::vector<ErrorRow> rows;
  for (double phi : {0.0, kHalfPi}) {
    const std::vector<msgate::FrequencyOffset> off{{kTwoPi * -600.0}};
    const auto r = noise::drift_sweep(params, motion_spec(2.0, phi, 0.0), off);
    rows.push_back(make_row(-600.0, 2.0, phi, 0.0, r[0].report));
  }
  for (double sigma : {600.0, 200.0}) {
    for (double phi : {0.0, kHalfPi}) {
      noise::NoiseModel m;
      m.sigma = kTwoPi * sigma;
      rows.push_back(make_row(0.0, 2.0, phi, 0.0, noise::averaged_gate_error(params, motion_spec(2.0, phi, 0.0), m), sigma));
    }
  }
  write_file(dir / "sec4_checkpoints.csv", error_csv(rows, true));
  files.push_back("sec4_checkpoints.csv");

  auto reduction = [](double at0, double at90) { return 100.0 * (1.0 - at90 / at0); };
  return {
      relative("drift -600 Hz, phi=0: infidelity", rows[0].infidelity, 0.030, 0.03),
      relative("drift -600 Hz, phi=pi/2: infidelity", rows[1].infidelity, 0.0045, 0.03),
      relative("drift -600 Hz, phi=0: diamond distance", rows[0].diamond_distance, 0.45, 0.05),
      relative("drift -600 Hz, phi=pi/2: diamond distance", rows[1].diamond_distance, 0.084, 0.05),
      relative("sigma 600 Hz, phi=0: infidelity", rows[2].infidelity, 0.027, 0.05),
      relative("sigma 600 Hz, phi=pi/2: infidelity", rows[3].infidelity, 0.0048, 0.05),
      relative("sigma 600 Hz, phi=0: diamond distance", rows[2].diamond_distance, 0.098, 0.05),
      relative("sigma 600 Hz, phi=pi/2: diamond distance", rows[3].diamond_distance, 0.050, 0.05),
      absolute("sigma 600 Hz: infidelity reduction (%)", reduction(rows[2].infidelity, rows[3].infidelity), 82.0, 3.0),
      absolute("sigma 600 Hz: diamond reduction (%)", reduction(rows[2].diamond_distance, rows[3].diamond_distance), 49.0, 3.0),
      absolute("sigma 200 Hz: infidelity reduction (%)", reduction(rows[4].infidelity, rows[5].infidelity), 86.0, 3.0),
      absolute("sigma 200 Hz: diamond reduction (%)", reduction(rows[4].diamond_distance, rows[5].diamond_distance), 52.0, 3.0),
  };
}

std::vector<Check> reproduce_sec5(const std::filesystem::path& dir, std::vector<std::string>& files) {
  const auto params = reference_config().gate.params();
  noise::NoiseModel m;
  m.sigma = kTwoPi * 600.0;
  std::vector<ErrorRow> rows;
  for (const auto& [a, n] : {std::pair{0.0, 0.49}, std::pair{0.47, 0.12}}) {
    for (double phi : {0.0, kHalfPi}) {
      rows.push_back(make_row(0.0, a, phi, n, noise::averaged_gate_error(params, motion_spec(a, phi, n), m), 600.0));
    }
  }
  write_file(dir / "sec5_predictions.csv", error_csv(rows, true));
  files.push_back("sec5_predictions.csv");

  const ErrorRow &rest0 = rows[0], &rest90 = rows[1], &moved0 = rows[2], &moved90 = rows[3];
  auto change = [](double after, double before) { return 100.0 * (after / before - 1.0); };
  return {
      relative("no displacement: infidelity", rest0.infidelity, 0.0070, 0.05),
      relative("no displacement: diamond distance", rest0.diamond_distance, 0.012, 0.05),
      below("no displacement: infidelity phi-independence", std::abs(rest0.infidelity - rest90.infidelity), 1e-6),
      below("no displacement: diamond phi-independence", std::abs(rest0.diamond_distance - rest90.diamond_distance), 1e-6),
      relative("displaced, phi=0: infidelity", moved0.infidelity, 0.010, 0.05),
      relative("displaced, phi=pi/2: infidelity", moved90.infidelity, 0.0049, 0.05),
      relative("displaced, phi=0: diamond distance", moved0.diamond_distance, 0.030, 0.05),
      relative("displaced, phi=pi/2: diamond distance", moved90.diamond_distance, 0.026, 0.05),
      absolute("phi=0: infidelity change (%)", change(moved0.infidelity, rest0.infidelity), 49.0, 5.0),
      absolute("phi=0: diamond change (%)", change(moved0.diamond_distance, rest0.diamond_distance), 150.0, 5.0),
      absolute("phi=pi/2: infidelity change (%)", change(moved90.infidelity, rest0.infidelity), -29.0, 5.0),
      absolute("phi=pi/2: diamond change (%)", change(moved90.diamond_distance, rest0.diamond_distance), 110.0, 5.0),
  };
}

// --- command bodies ----------------------------------------------------------

struct CalibrateArgs {
  int loops = 0;
  double tau_us = 0.0;
  double nu0_mhz = 3.0;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  const GateConfig g{a.loops, a.tau_us, a.nu0_mhz};
  const auto p = g.params();
  const msgate::FrequencyOffset none{};
  ojson j;
  j["loops"] = p.loops;
  j["tau_us"] = a.tau_us;
  j["nu0_mhz"] = a.nu0_mhz;
  j["delta0_over_2pi_khz"] = p.delta0 / kTwoPi * 1e-3;
  j["eta_omega_over_2pi_khz"] = p.eta_omega / kTwoPi * 1e-3;
  j["geometric_phase_at_tau"] = msgate::geometric_phase(p, none, p.tau);
  j["loop_closure_abs_alpha"] = std::abs(msgate::trajectory(p, none, p.tau));
  out << j.dump(2) << '\n';
  return kOk;
}

struct FitArgs {
  std::vector<std::string> files;
  std::string out_dir;
  int contour_points = 41;
  int starts = 8;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<sideband::RabiDataset> data;
  for (const auto& f : a.files) {
    data.push_back(read_rabi_file(f));
    // Labels name the contour files, so keep them unique.
    int n = 1;
    const std::string base = data.back().label;
    while (std::count_if(data.begin(), data.end() - 1, [&](const auto& d) { return d.label == data.back().label; })) {
      data.back().label = base + "_" + std::to_string(++n);
    }
  }
  if (a.contour_points < 5) throw DomainError("--contour-points must be >= 5");
  sideband::FitOptions opt;
  opt.starts = a.starts;
  sideband::FitResult fit = sideband::fit_mle(data, opt);
  const auto contours = sideband::attach_uncertainties(fit, data, a.contour_points);

  std::vector<std::string> names;
  if (!a.out_dir.empty()) {
    const std::filesystem::path dir(a.out_dir);
    for (std::size_t k = 0; k < contours.size(); ++k) {
      names.push_back("contour_" + data[k].label + ".csv");
      std::ostringstream s;
      write_contour_csv(s, contours[k]);
      write_file(dir / names.back(), s.str());
    }
  }
  const std::string body = fit_to_json(fit, names).dump(2) + "\n";
  if (!a.out_dir.empty()) write_file(std::filesystem::path(a.out_dir) / "fit.json", body);
  out << body;
  for (const auto& w : fit.warnings) err << "warning: " << w << '\n';
  if (!fit.converged) {
    err << "error: fit did not converge\n";
    return kNonConvergence;
  }
  return kOk;
}

struct PredictArgs {
  std::string fit_path;
  int loops = 2;
  double tau_us = 60.0;
  double nu0_mhz = 3.0;
  double sigma_hz = 600.0;
  int order = 31;
  double phi = 0.0;
};

int cmd_predict(const PredictArgs& a, std::ostream& out) {
  std::ifstream in(a.fit_path);
  if (!in) throw DataError("cannot open fit file '" + a.fit_path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("fit file '" + a.fit_path + "': " + e.what());
  }
  const sideband::FitResult fit = fit_from_json(j);
  const GateConfig g{a.loops, a.tau_us, a.nu0_mhz};
  NoiseConfig nc;
  nc.sigma_hz = a.sigma_hz;
  nc.quadrature_order = a.order;
  const auto at_phi = sideband::predict_gate_error(fit, g.params(), nc.model(), a.phi);
  const auto at_half_pi = sideband::predict_gate_error(fit, g.params(), nc.model(), kHalfPi);

  ojson o;
  o["gate"] = {{"loops", a.loops}, {"tau_us", a.tau_us}, {"nu0_mhz", a.nu0_mhz}};
  o["noise"] = {{"sigma_hz", a.sigma_hz}, {"quadrature_order", a.order}};
  o["phi_rad"] = a.phi;
  o["predictions"] = ojson::array();
  for (std::size_t k = 0; k < at_phi.size(); ++k) {
    ojson p;
    p["label"] = at_phi[k].label;
    p["alpha_sq"] = fit.datasets[k].value.alpha_sq;
    p["nbar"] = fit.datasets[k].value.nbar;
    p["at_phi"] = report_to_json(at_phi[k].report);
    p["at_half_pi"] = report_to_json(at_half_pi[k].report);
    o["predictions"].push_back(p);
  }
  out << o.dump(2) << '\n';
  return kOk;
}

struct SimulateArgs {
  double alpha_sq = 0.0;
  double nbar = 0.0;
  double omega_khz = 13.0;
  double coherence_ms = 1.34;
  int shots = 500;
  int points = 60;
  double step_us = 5.0;
  std::uint64_t seed = 1;
  std::string out_path;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  if (a.points < 1) throw DomainError("--points must be >= 1");
  if (!(a.step_us > 0.0)) throw DomainError("--step-us must be > 0");
  if (!(a.coherence_ms > 0.0)) throw DomainError("--coherence-ms must be > 0");
  std::vector<double> times;
  for (int k = 1; k <= a.points; ++k) times.push_back(a.step_us * k * 1e-6);
  std::mt19937_64 rng(a.seed);
  const sideband::RabiModel m{kTwoPi * a.omega_khz * 1e3, 1e3 / a.coherence_ms};
  const auto d = sideband::simulate_dataset(m, {a.alpha_sq, a.nbar}, times, a.shots, rng);
  std::ostringstream s;
  s << "# simulated: alpha_sq=" << fmt(a.alpha_sq) << " nbar=" << fmt(a.nbar) << " omega_khz=" << fmt(a.omega_khz)
    << " coherence_ms=" << fmt(a.coherence_ms) << " seed=" << a.seed << '\n';
  write_rabi_csv(s, d);
  emit(a.out_path, s.str(), out);
  return kOk;
}

int cmd_reproduce(const std::string& id, const std::string& out_dir, std::ostream& out) {
  const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path("reproduce") / id : std::filesystem::path(out_dir);
  std::vector<std::string> files;
  std::vector<Check> checks;
  if (id == "fig1") {
    checks = reproduce_fig1(dir, files);
  } else if (id == "fig2") {
    checks = reproduce_fig2(dir, files);
  } else if (id == "fig3") {
    checks = reproduce_fig3(dir, files);
  } else if (id == "sec4-checkpoints") {
    checks = reproduce_sec4(dir, files);
  } else if (id == "sec5-predictions") {
    checks = reproduce_sec5(dir, files);
  } else {
    throw ConfigError("unknown reproduction id '" + id +
                      "' (expected fig1, fig2, fig3, sec4-checkpoints or sec5-predictions)");
  }
  const std::string body = summary_json(id, checks, files).dump(2) + "\n";
  write_file(dir / "summary.json", body);
  out << body;
  return kOk;
}

int scenario(const std::string& config_path, const std::string& out_path, std::ostream& out,
             std::vector<ErrorRow> (*runner)(const RunConfig&), bool with_sigma) {
  const RunConfig c = load_config(config_path);
  emit(out_path, error_csv(runner(c), with_sigma), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Molmer-Sorensen gate error under motional displacement, heating and trap-frequency noise"};
  app.name("iongate");
  app.require_subcommand(1);
  std::function<int()> action;

  CalibrateArgs cal;
  auto* c = app.add_subcommand("calibrate", "Print the calibrated gate parameters");
  c->add_option("--loops", cal.loops, "Closed phase-space loops K")->required()->check(CLI::PositiveNumber);
  c->add_option("--tau-us", cal.tau_us, "Gate duration in microseconds")->required()->check(CLI::PositiveNumber);
  c->add_option("--nu0-mhz", cal.nu0_mhz, "Nominal trap frequency in MHz")->capture_default_str();
  c->callback([&] { action = [&] { return cmd_calibrate(cal, out); }; });

  std::string config_path, out_path;
  auto add_scenario = [&](const char* name, const char* help, std::vector<ErrorRow> (*runner)(const RunConfig&),
                          bool with_sigma) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("--config", config_path, "JSON run configuration")->required();
    s->add_option("--out", out_path, "Output CSV (default: stdout)");
    s->callback([&, runner, with_sigma] {
      action = [&, runner, with_sigma] { return scenario(config_path, out_path, out, runner, with_sigma); };
    });
  };
  add_scenario("sweep", "Gate error vs trap-frequency offset", &run_sweep, false);
  add_scenario("phase-scan", "Noise-averaged gate error vs displacement phase", &run_phase_scan, true);
  add_scenario("surface", "Noise-averaged gate error over (|alpha|^2, nbar)", &run_surface, true);
  add_scenario("average", "Noise-averaged gate error for the configured state", &run_average, true);

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Maximum-likelihood fit of blue-sideband Rabi data");
  f->add_option("data", fit.files, "Rabi data CSV files (time_us,excited,shots)")->required()->check(CLI::ExistingFile);
  f->add_option("--out-dir", fit.out_dir, "Directory for fit.json and contour CSVs");
  f->add_option("--contour-points", fit.contour_points, "Grid points per axis of each contour")->capture_default_str();
  f->add_option("--starts", fit.starts, "Simplex starts")->capture_default_str()->check(CLI::PositiveNumber);
  f->callback([&] { action = [&] { return cmd_fit(fit, out, err); }; });

  PredictArgs pred;
  auto* p = app.add_subcommand("predict", "Gate error predicted from fitted motional states");
  p->add_option("--fit", pred.fit_path, "fit.json written by 'fit'")->required();
  p->add_option("--loops", pred.loops)->capture_default_str();
  p->add_option("--tau-us", pred.tau_us)->capture_default_str();
  p->add_option("--nu0-mhz", pred.nu0_mhz)->capture_default_str();
  p->add_option("--sigma-hz", pred.sigma_hz, "Trap-frequency noise width")->capture_default_str();
  p->add_option("--quadrature-order", pred.order)->capture_default_str();
  p->add_option("--phi", pred.phi, "Displacement phase in rad")->capture_default_str();
  p->callback([&] { action = [&] { return cmd_predict(pred, out); }; });

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Synthetic blue-sideband Rabi data");
  s->add_option("--alpha-sq", sim.alpha_sq)->capture_default_str();
  s->add_option("--nbar", sim.nbar)->capture_default_str();
  s->add_option("--omega-khz", sim.omega_khz, "eta*Omega/2pi in kHz")->capture_default_str();
  s->add_option("--coherence-ms", sim.coherence_ms, "1/gamma0 in ms")->capture_default_str();
  s->add_option("--shots", sim.shots)->capture_default_str();
  s->add_option("--points", sim.points)->capture_default_str();
  s->add_option("--step-us", sim.step_us)->capture_default_str();
  s->add_option("--seed", sim.seed)->capture_default_str();
  s->add_option("--out", sim.out_path, "Output CSV (default: stdout)");
  s->callback([&] { action = [&] { return cmd_simulate(sim, out); }; });

  std::string repro_id, repro_dir;
  auto* r = app.add_subcommand("reproduce", "Regenerate a figure or checkpoint set with a pass/fail summary");
  r->add_option("id", repro_id, "fig1, fig2, fig3, sec4-checkpoints or sec5-predictions")->required();
  r->add_option("--out-dir", repro_dir, "Output directory (default: reproduce/<id>)");
  r->callback([&] { action = [&] { return cmd_reproduce(repro_id, repro_dir, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace iongate::cli
