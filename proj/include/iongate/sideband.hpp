#pragma once

// Blue-sideband Rabi flopping: model, binomial likelihood, maximum-likelihood
// fit with the sideband rate and base decoherence shared across datasets, and
// likelihood-contour uncertainties.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "iongate/channel.hpp"
#include "iongate/fock.hpp"
#include "iongate/msgate.hpp"
#include "iongate/noise.hpp"

namespace iongate::sideband {

struct RabiPoint {
  double time = 0.0;  ///< seconds
  int excited = 0;
  int shots = 0;
};

struct RabiDataset {
  std::string label;
  std::vector<RabiPoint> points;

  /// Throws DataError on negative counts, excited > shots, or non-increasing times.
  void validate() const;
};

struct RabiModel {
  double omega_sb = 0.0;  ///< eta * Omega, rad/s
  double gamma0 = 0.0;    ///< 1/s; the n -> n+1 rate is gamma0 (n + 1)

  void validate() const;
};

/// Per-dataset motional state (the phase is not identifiable from P_e).
struct MotionState {
  double alpha_sq = 0.0;
  double nbar = 0.0;
};

/// P_n for a displaced thermal state, truncated by fock::choose_truncation.
RVector population_distribution(const fock::MotionalSpec& spec);
RVector population_distribution(const MotionState& state, double leakage = fock::kDefaultLeakage);

/// P_e(t) = sum_n P_n (1 - cos(2 omega_sb sqrt(n+1) t) e^{-gamma0 (n+1) t}) / 2,
/// with P_n renormalized so that P_e(0) = 0 exactly.
double excited_probability(const RabiModel& model, const RVector& populations, double t);
double excited_probability(const RabiModel& model, const fock::MotionalSpec& spec, double t);

inline constexpr double kProbabilityFloor = 1e-9;

/// Full binomial log-likelihood summed over datasets and points; P_e is
/// clamped to [1e-9, 1 - 1e-9].
double log_likelihood(const RabiModel& model, const std::vector<MotionState>& states,
                      const std::vector<RabiDataset>& data);
double dataset_log_likelihood(const RabiModel& model, const RVector& populations,
                              const RabiDataset& data);

/// Parameter box for the fit. Rates in rad/s and 1/s.
struct SearchBox {
  double omega_lo = 2.0 * 3.141592653589793 * 2e3;
  double omega_hi = 2.0 * 3.141592653589793 * 50e3;
  double gamma_lo = 1.0;
  double gamma_hi = 1e4;
  double alpha_sq_hi = 3.0;
  double nbar_hi = 3.0;

  void validate() const;
};

struct FitOptions {
  SearchBox box;
  int starts = 8;             ///< simplex runs launched from the best lattice points
  int max_iterations = 4000;  ///< per simplex run
  double simplex_tolerance = 1e-8;
  double leakage = fock::kDefaultLeakage;
};

struct DatasetEstimate {
  std::string label;
  MotionState value;
  double alpha_sq_err = 0.0;
  double nbar_err = 0.0;
  /// Contour touches |alpha|^2 = 0 or nbar = 0: full range used as uncertainty.
  bool boundary = false;
};

struct FitResult {
  RabiModel model;
  std::vector<DatasetEstimate> datasets;
  double max_log_likelihood = 0.0;
  int evaluations = 0;
  bool converged = false;
  std::vector<std::string> warnings;

  std::vector<MotionState> states() const;
};

/// Maximizes the joint likelihood. Starts come from a fixed lattice, so the
/// result is deterministic. Non-convergence is reported in FitResult, not thrown.
FitResult fit_mle(const std::vector<RabiDataset>& data, const FitOptions& options = {});

struct ContourSpec {
  double alpha_sq_lo = 0.0;
  double alpha_sq_hi = 1.0;
  double nbar_lo = 0.0;
  double nbar_hi = 1.0;
  int alpha_sq_points = 41;
  int nbar_points = 41;
};

struct Contour {
  std::vector<double> alpha_sq;
  std::vector<double> nbar;
  Eigen::MatrixXd log_likelihood;  ///< rows: alpha_sq, cols: nbar
  double max_log_likelihood = 0.0;
  double level = 0.0;  ///< max - 1, i.e. e^{-1} times the maximum likelihood
  /// Extent of {log L >= level}, interpolated between grid points.
  double alpha_sq_min = 0.0, alpha_sq_max = 0.0;
  double nbar_min = 0.0, nbar_max = 0.0;
  bool closed = false;    ///< region does not reach a non-physical grid edge
  bool boundary = false;  ///< region reaches |alpha|^2 = 0 or nbar = 0
  double alpha_sq_err = 0.0;
  double nbar_err = 0.0;
  std::vector<std::string> warnings;
};

/// Log-likelihood of one dataset over an (|alpha|^2, nbar) grid with the shared
/// rates held at their fitted values, and the uncertainties read off the
/// e^{-1} contour: half the range, or the full range when it reaches a
/// physical boundary.
Contour likelihood_contour(const FitResult& fit, const std::vector<RabiDataset>& data,
                           std::size_t index, const ContourSpec& spec,
                           double leakage = fock::kDefaultLeakage);

/// Contour on a window grown until it is closed and shrunk until the region
/// spans enough cells.
Contour auto_contour(const FitResult& fit, const std::vector<RabiDataset>& data,
                     std::size_t index, int points = 41, double leakage = fock::kDefaultLeakage);

/// Fills the per-dataset uncertainties of `fit` from auto_contour.
std::vector<Contour> attach_uncertainties(FitResult& fit, const std::vector<RabiDataset>& data,
                                          int points = 41);

struct Prediction {
  std::string label;
  channel::ErrorReport report;
};

/// Averaged gate error for each fitted motional state at displacement phase phi.
std::vector<Prediction> predict_gate_error(const FitResult& fit, const msgate::GateParams& params,
                                           const noise::NoiseModel& model, double phi);

/// Binomial samples of the model at the given times.
RabiDataset simulate_dataset(const RabiModel& model, const MotionState& state,
                             const std::vector<double>& times, int shots, std::mt19937_64& rng,
                             const std::string& label = "");

}  // namespace iongate::sideband
