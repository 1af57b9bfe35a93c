#pragma once

// Truncated harmonic-oscillator numerics: Laguerre polynomials, displaced Fock
// states, displacement operators and displaced-thermal density matrices.
//
// Fock index m runs over 0..N-1. All routines are pure.

#include <optional>

#include "iongate/linalg.hpp"

namespace iongate::fock {

inline constexpr double kDefaultLeakage = 1e-8;
inline constexpr int kMinTruncation = 8;
inline constexpr int kMaxTruncation = 512;

/// Initial motional state: a thermal mixture of Fock states displaced by
/// alpha = |alpha| e^{i phi}, represented on Fock levels 0..truncation-1.
class MotionalSpec {
 public:
  MotionalSpec() = default;
  MotionalSpec(double alpha_mag, double phi, double nbar_th, int truncation);

  static MotionalSpec from_alpha_sq(double alpha_sq, double phi, double nbar_th, int truncation);

  double alpha_mag() const { return alpha_mag_; }
  double alpha_sq() const { return alpha_mag_ * alpha_mag_; }
  /// Displacement phase reduced to [0, 2 pi).
  double phi() const { return phi_; }
  double nbar_th() const { return nbar_th_; }
  int truncation() const { return truncation_; }
  Complex alpha() const;

  MotionalSpec with_truncation(int truncation) const;
  MotionalSpec with_phi(double phi) const;

 private:
  double alpha_mag_ = 0.0;
  double phi_ = 0.0;
  double nbar_th_ = 0.0;
  int truncation_ = kMinTruncation;
};

/// Density matrix of the motional mode on a truncated Fock basis.
class MotionalDensityMatrix {
 public:
  explicit MotionalDensityMatrix(CMatrix rho) : rho_(std::move(rho)) {}

  int dim() const { return static_cast<int>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }
  double trace() const { return rho_.trace().real(); }
  /// Tr(rho n) with n the number operator.
  double mean_occupation() const;
  /// Diagonal P_n = <n|rho|n>.
  RVector populations() const { return rho_.diagonal().real(); }

 private:
  CMatrix rho_;
};

/// Generalized Laguerre polynomial L_n^{(k)}(x) by three-term recurrence.
double laguerre(int n, int k, double x);

/// Fock amplitudes <m|D(alpha)|n> for m = 0..dim-1. Throws TruncationError if
/// the retained norm falls below 1 - leakage.
CVector displaced_fock_coefficients(Complex alpha, int n, int dim,
                                    double leakage = kDefaultLeakage);

/// Same amplitudes without the norm check; columns near the truncation edge
/// are expected to leak.
CVector displaced_fock_column(Complex alpha, int n, int dim);

/// Matrix elements <m|D(alpha)|n> on the truncated basis. The leading columns
/// whose norm loss is below `leakage` form the reliable block; a
/// TruncationError is raised when that block is smaller than `required_dim`
/// (default 1).
CMatrix displacement_matrix(Complex alpha, int dim, int required_dim = 1,
                            double leakage = kDefaultLeakage);

/// Number of leading columns of `d` whose squared norm is at least 1 - leakage.
int reliable_columns(const CMatrix& d, double leakage = kDefaultLeakage);

/// Geometric occupation weights of a thermal state for n = 0..dim-1.
RVector thermal_weights(double nbar_th, int dim);

/// Bose occupation 1 / (exp(hbar nu / kB T) - 1). Temperature in kelvin, nu in rad/s.
double thermal_occupation(double temperature, double nu);

/// Builds rho = sum_n w_n D(alpha)|n><n|D(alpha)^dagger. Throws
/// TruncationError if the trace is below 1 - leakage.
MotionalDensityMatrix motional_density_matrix(const MotionalSpec& spec,
                                              double leakage = kDefaultLeakage);

/// Smallest truncation (floor kMinTruncation, step 4) holding the state to
/// within `leakage`. When `gate_displacement` (the largest displacement the gate
/// will apply) is given the result is padded for propagator use.
int choose_truncation(double alpha_mag, double nbar_th, double leakage = kDefaultLeakage,
                      std::optional<double> gate_displacement = std::nullopt);

/// Padding added on top of the state truncation for gate use.
int gate_padding(double alpha_mag, double gate_displacement);

/// Smallest k such that the first k diagonal entries of rho carry at least
/// trace - leakage of the weight.
int populated_dim(const MotionalDensityMatrix& rho, double leakage = kDefaultLeakage);

}  // namespace iongate::fock
