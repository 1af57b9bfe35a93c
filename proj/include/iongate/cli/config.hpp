#pragma once

// Run configuration for the scenario commands. JSON on disk; all frequencies
// are ordinary (Hz/kHz/MHz) and converted to angular units here.

#include <string>
#include <vector>

#include "json.hpp"

#include "iongate/fock.hpp"
#include "iongate/msgate.hpp"
#include "iongate/noise.hpp"

namespace iongate::cli {

struct GateConfig {
  int loops = 2;
  double tau_us = 60.0;
  double nu0_mhz = 3.0;

  msgate::GateParams params() const;
};

struct MotionConfig {
  double alpha_sq = 0.0;
  double phi_rad = 0.0;
  double nbar = 0.0;
};

struct NoiseConfig {
  double sigma_hz = 0.0;
  double center_hz = 0.0;
  int quadrature_order = 31;

  noise::NoiseModel model() const;
};

struct SweepConfig {
  std::vector<double> delta_nu_hz;
  std::vector<double> alpha_sq;  // empty: use motion.alpha_sq
  std::vector<double> phi_rad;   // empty: use motion.phi_rad
};

struct PhaseScanConfig {
  std::vector<double> phi_rad;
  std::vector<double> alpha_sq;
};

struct SurfaceConfig {
  std::vector<double> alpha_sq;
  std::vector<double> nbar;
  std::vector<double> phi_rad;
};

struct AverageConfig {
  std::vector<double> sigma_hz;
  std::vector<double> phi_rad;
};

struct RunConfig {
  GateConfig gate;
  MotionConfig motion;
  NoiseConfig noise;
  SweepConfig sweep;
  PhaseScanConfig phase_scan;
  SurfaceConfig surface;
  AverageConfig average;
  double leakage = fock::kDefaultLeakage;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Grid values are either an array of numbers or an object
/// {"start", "stop", "step"} / {"start", "stop", "count"}.
std::vector<double> parse_grid(const nlohmann::json& j, const std::string& key);

/// Unknown keys are rejected with ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const RunConfig& c);

}  // namespace iongate::cli
