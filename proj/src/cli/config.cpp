#include "iongate/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "iongate/error.hpp"

namespace iongate::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using json = nlohmann::json;

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + (where.empty() ? k : where + "." + k) + "'");
  }
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
  return j.get<int>();
}

template <class F>
void read_section(const json& root, const std::string& name, const std::set<std::string>& keys, F&& each) {
  if (!root.contains(name)) return;
  const json& s = root.at(name);
  reject_unknown(s, name, keys);
  for (const auto& [k, v] : s.items()) each(k, v, name + "." + k);
}

void require_nonnegative(double v, const std::string& key) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("'" + key + "' must be a finite number >= 0");
}

void require_all_nonnegative(const std::vector<double>& v, const std::string& key) {
  for (double x : v) require_nonnegative(x, key);
}

json grid_json(const std::vector<double>& v) { return json(v); }

}  // namespace

msgate::GateParams GateConfig::params() const {
  return msgate::calibrate_gate(loops, tau_us * 1e-6, kTwoPi * nu0_mhz * 1e6);
}

noise::NoiseModel NoiseConfig::model() const {
  noise::NoiseModel m;
  m.sigma = kTwoPi * sigma_hz;
  m.center = kTwoPi * center_hz;
  m.quadrature_order = quadrature_order;
  return m;
}

std::vector<double> parse_grid(const json& j, const std::string& key) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(number(x, key));
    return out;
  }
  if (!j.is_object()) throw ConfigError("'" + key + "' must be an array or a {start, stop, step|count} object");
  reject_unknown(j, key, {"start", "stop", "step", "count"});
  if (!j.contains("start") || !j.contains("stop")) throw ConfigError("'" + key + "' needs start and stop");
  const double start = number(j.at("start"), key + ".start");
  const double stop = number(j.at("stop"), key + ".stop");
  int count = 0;
  if (j.contains("count") == j.contains("step")) throw ConfigError("'" + key + "' needs exactly one of step, count");
  if (j.contains("count")) {
    count = integer(j.at("count"), key + ".count");
    if (count < 1) throw ConfigError("'" + key + ".count' must be >= 1");
  } else {
    const double step = number(j.at("step"), key + ".step");
    if (!(step > 0.0)) throw ConfigError("'" + key + ".step' must be > 0");
    if (stop < start) throw ConfigError("'" + key + "': stop < start");
    count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(start + i * step);
    return out;
  }
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  return out;
}

void RunConfig::validate() const {
  if (gate.loops < 1) throw ConfigError("'gate.loops' must be >= 1");
  if (!(gate.tau_us > 0.0)) throw ConfigError("'gate.tau_us' must be > 0");
  require_nonnegative(gate.nu0_mhz, "gate.nu0_mhz");
  require_nonnegative(motion.alpha_sq, "motion.alpha_sq");
  require_nonnegative(motion.nbar, "motion.nbar");
  if (!std::isfinite(motion.phi_rad)) throw ConfigError("'motion.phi_rad' must be finite");
  require_nonnegative(noise.sigma_hz, "noise.sigma_hz");
  if (!std::isfinite(noise.center_hz)) throw ConfigError("'noise.center_hz' must be finite");
  if (noise.quadrature_order < 1) throw ConfigError("'noise.quadrature_order' must be >= 1");
  require_all_nonnegative(sweep.alpha_sq, "sweep.alpha_sq");
  require_all_nonnegative(phase_scan.alpha_sq, "phase_scan.alpha_sq");
  require_all_nonnegative(surface.alpha_sq, "surface.alpha_sq");
  require_all_nonnegative(surface.nbar, "surface.nbar");
  require_all_nonnegative(average.sigma_hz, "average.sigma_hz");
  if (!(leakage > 0.0 && leakage < 1e-2)) throw ConfigError("'leakage' must lie in (0, 1e-2)");
}

RunConfig parse_config(const json& j) {
  reject_unknown(j, "", {"gate", "motion", "noise", "sweep", "phase_scan", "surface", "average", "leakage"});
  RunConfig c;
  read_section(j, "gate", {"loops", "tau_us", "nu0_mhz"}, [&](const std::string& k, const json& v, const std::string& key) {
    if (k == "loops") c.gate.loops = integer(v, key);
    if (k == "tau_us") c.gate.tau_us = number(v, key);
    if (k == "nu0_mhz") c.gate.nu0_mhz = number(v, key);
  });
  read_section(j, "motion", {"alpha_sq", "phi_rad", "nbar"}, [&](const std::string& k, const json& v, const std::string& key) {
    if (k == "alpha_sq") c.motion.alpha_sq = number(v, key);
    if (k == "phi_rad") c.motion.phi_rad = number(v, key);
    if (k == "nbar") c.motion.nbar = number(v, key);
  });
  read_section(j, "noise", {"sigma_hz", "center_hz", "quadrature_order"},
               [&](const std::string& k, const json& v, const std::string& key) {
                 if (k == "sigma_hz") c.noise.sigma_hz = number(v, key);
                 if (k == "center_hz") c.noise.center_hz = number(v, key);
                 if (k == "quadrature_order") c.noise.quadrature_order = integer(v, key);
               });
  read_section(j, "sweep", {"delta_nu_hz", "alpha_sq", "phi_rad"}, [&](const std::string& k, const json& v, const std::string& key) {
    if (k == "delta_nu_hz") c.sweep.delta_nu_hz = parse_grid(v, key);
    if (k == "alpha_sq") c.sweep.alpha_sq = parse_grid(v, key);
    if (k == "phi_rad") c.sweep.phi_rad = parse_grid(v, key);
  });
  read_section(j, "phase_scan", {"phi_rad", "alpha_sq"}, [&](const std::string& k, const json& v, const std::string& key) {
    if (k == "phi_rad") c.phase_scan.phi_rad = parse_grid(v, key);
    if (k == "alpha_sq") c.phase_scan.alpha_sq = parse_grid(v, key);
  });
  read_section(j, "surface", {"alpha_sq", "nbar", "phi_rad"}, [&](const std::string& k, const json& v, const std::string& key) {
    if (k == "alpha_sq") c.surface.alpha_sq = parse_grid(v, key);
    if (k == "nbar") c.surface.nbar = parse_grid(v, key);
    if (k == "phi_rad") c.surface.phi_rad = parse_grid(v, key);
  });
  read_section(j, "average", {"sigma_hz", "phi_rad"}, [&](const std::string& k, const json& v, const std::string& key) {
    if (k == "sigma_hz") c.average.sigma_hz = parse_grid(v, key);
    if (k == "phi_rad") c.average.phi_rad = parse_grid(v, key);
  });
  if (j.contains("leakage")) c.leakage = number(j.at("leakage"), "leakage");
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["gate"] = {{"loops", c.gate.loops}, {"tau_us", c.gate.tau_us}, {"nu0_mhz", c.gate.nu0_mhz}};
  j["motion"] = {{"alpha_sq", c.motion.alpha_sq}, {"phi_rad", c.motion.phi_rad}, {"nbar", c.motion.nbar}};
  j["noise"] = {{"sigma_hz", c.noise.sigma_hz}, {"center_hz", c.noise.center_hz},
                {"quadrature_order", c.noise.quadrature_order}};
  j["sweep"] = {{"delta_nu_hz", grid_json(c.sweep.delta_nu_hz)},
                {"alpha_sq", grid_json(c.sweep.alpha_sq)},
                {"phi_rad", grid_json(c.sweep.phi_rad)}};
  j["phase_scan"] = {{"phi_rad", grid_json(c.phase_scan.phi_rad)}, {"alpha_sq", grid_json(c.phase_scan.alpha_sq)}};
  j["surface"] = {{"alpha_sq", grid_json(c.surface.alpha_sq)},
                  {"nbar", grid_json(c.surface.nbar)},
                  {"phi_rad", grid_json(c.surface.phi_rad)}};
  j["average"] = {{"sigma_hz", grid_json(c.average.sigma_hz)}, {"phi_rad", grid_json(c.average.phi_rad)}};
  j["leakage"] = c.leakage;
  return j;
}

}  // namespace iongate::cli
