#pragma once

// Trap-frequency noise: drift sweeps, Gaussian shot-to-shot averaging and
// displacement-phase optimization.
//
// Functions taking a MotionalSpec treat its truncation as a lower bound; the
// actual Fock dimension is raised as needed for the state plus the gate
// displacement at every offset evaluated.

#include <span>
#include <string>
#include <vector>

#include "iongate/channel.hpp"
#include "iongate/fock.hpp"
#include "iongate/msgate.hpp"

namespace iongate::noise {

/// Gaussian distribution of trap frequencies with width sigma (rad/s) about
/// the nominal frequency `center` (rad/s).
struct NoiseModel {
  double sigma = 0.0;
  double center = 0.0;
  int quadrature_order = 31;

  void validate() const;
};

struct AverageOptions {
  /// Recompute I at order 2n+1 and warn when it moves by more than 1% relative.
  bool check_convergence = false;
  double leakage = fock::kDefaultLeakage;
};

struct SweepRow {
  double delta_nu = 0.0;
  channel::ErrorReport report;
};

struct PhaseRow {
  double phi = 0.0;
  channel::ErrorReport report;
};

enum class Objective { kInfidelity, kDiamond };

struct PhaseOptimum {
  double phi = 0.0;
  channel::ErrorReport report;
  std::vector<PhaseRow> scan;  ///< coarse scan over [0, pi)
  bool flat = false;           ///< objective independent of phi (no displacement)
};

struct SurfaceCell {
  double alpha_sq = 0.0;
  double nbar = 0.0;
  channel::ErrorReport report;
  double half_diamond() const { return 0.5 * report.diamond_distance; }
};

/// Row-major over (alpha_sq index, nbar index).
struct Surface {
  std::vector<double> alpha_sq;
  std::vector<double> nbar;
  double phi = 0.0;
  std::vector<SurfaceCell> cells;
  const SurfaceCell& at(std::size_t ia, std::size_t in) const { return cells[ia * nbar.size() + in]; }
};

/// One error report per deterministic trap-frequency offset.
std::vector<SweepRow> drift_sweep(const msgate::GateParams& params, const fock::MotionalSpec& spec,
                                  std::span<const msgate::FrequencyOffset> offsets,
                                  double leakage = fock::kDefaultLeakage);

/// Gauss-Hermite mixture of the per-node gate channels, then metrics on the
/// mixed channel.
channel::ErrorReport averaged_gate_error(const msgate::GateParams& params,
                                         const fock::MotionalSpec& spec, const NoiseModel& model,
                                         const AverageOptions& options = {});

/// The averaged channel itself.
channel::ChoiMatrix averaged_channel(const msgate::GateParams& params,
                                     const fock::MotionalSpec& spec, const NoiseModel& model,
                                     double leakage = fock::kDefaultLeakage);

/// Averaged gate error at each phase (spec's own phase is ignored).
std::vector<PhaseRow> phase_scan(const msgate::GateParams& params, const fock::MotionalSpec& spec,
                                 const NoiseModel& model, std::span<const double> phis,
                                 double leakage = fock::kDefaultLeakage);

/// 64-point scan of [0, pi) followed by golden-section refinement to 1e-3 rad.
PhaseOptimum optimize_phase(const msgate::GateParams& params, const fock::MotionalSpec& spec,
                            const NoiseModel& model, Objective objective,
                            double leakage = fock::kDefaultLeakage);

/// Averaged gate error over a grid of (|alpha|^2, nbar) at fixed phase.
Surface error_surface(const msgate::GateParams& params, const NoiseModel& model,
                      std::span<const double> alpha_sq, std::span<const double> nbar, double phi,
                      double leakage = fock::kDefaultLeakage);

}  // namespace iongate::noise
