#pragma once

// Molmer-Sorensen gate dynamics on two qubits coupled to one motional mode.
//
// Spin basis ordering is |00>, |01>, |10>, |11> (first qubit most
// significant) with sigma_y = [[0, -i], [i, 0]]. Joint spin-motion operators are
// spin (x) motion, i.e. index = spin * N + fock.

#include "iongate/linalg.hpp"

namespace iongate::msgate {

/// Calibrated drive parameters. Frequencies are angular (rad/s).
struct GateParams {
  double eta_omega = 0.0;  ///< sideband coupling eta * Omega
  double delta0 = 0.0;     ///< nominal detuning, negative for counter-clockwise loops
  double tau = 0.0;        ///< gate duration in seconds
  int loops = 1;           ///< number of closed phase-space loops K
  double nu0 = 0.0;        ///< nominal trap frequency
};

/// Trap-frequency error; the effective detuning becomes delta0 - delta_nu.
struct FrequencyOffset {
  double delta_nu = 0.0;
};

/// delta0 = -2 pi K / tau and eta_omega = 2 pi sqrt(K) / (2 tau), which close
/// K loops with geometric phase -pi/2 at zero offset.
GateParams calibrate_gate(int loops, double tau, double nu0);

/// Effective detuning delta0 - delta_nu. Throws DomainError when
/// |delta_nu| >= 5 |delta0|.
double detuning(const GateParams& params, const FrequencyOffset& offset);

/// Phase-space trajectory alpha(t) = eta_omega / delta * (1 - e^{-i delta t}).
Complex trajectory(const GateParams& params, const FrequencyOffset& offset, double t);

/// Geometric phase B(t) = (eta_omega / delta)^2 (delta t - sin(delta t)).
double geometric_phase(const GateParams& params, const FrequencyOffset& offset, double t);

/// Upper bound on |alpha(t)| over the gate.
double max_displacement(const GateParams& params, const FrequencyOffset& offset);

/// Collective spin operator J_y = (sigma_y (x) 1 + 1 (x) sigma_y) / 2.
CMatrix collective_jy();

/// Spectral projector of J_y onto eigenvalue j in {-1, 0, 1}.
CMatrix jy_projector(int j);

/// Ideal two-qubit gate exp(i pi/2 J_y^2).
CMatrix ideal_gate_unitary();

/// Exact propagator U(tau) = exp(-i B J_y^2) D(J_y alpha(tau)) on the 4N-dim
/// joint space. `required_dim` Fock levels must be represented to within
/// `leakage`; otherwise a TruncationError is raised.
CMatrix propagator(const GateParams& params, const FrequencyOffset& offset, int fock_dim,
                   int required_dim = 1, double leakage = 1e-8);

/// Time-ordered product of midpoint-rule step exponentials of
/// H(t) = -eta_omega J_y (a e^{i delta t} + a^dagger e^{-i delta t}).
CMatrix brute_force_propagator(const GateParams& params, const FrequencyOffset& offset,
                               int fock_dim, int steps);

}  // namespace iongate::msgate
