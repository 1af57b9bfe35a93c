#pragma once

// Two-qubit quantum channels induced by the gate after tracing out motion.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iongate/fock.hpp"
#include "iongate/linalg.hpp"
#include "iongate/msgate.hpp"

namespace iongate::channel {

inline constexpr int kSpinDim = 4;

/// Tolerances used by ChoiMatrix::check_cptp.
struct CptpTolerance {
  double hermitian = 1e-10;
  double min_eigenvalue = -1e-8;
  double trace_preservation = 1e-8;
};

struct CptpReport {
  double hermitian_defect = 0.0;
  double min_eigenvalue = 0.0;
  double trace_defect = 0.0;
  bool ok = false;
};

/// Choi matrix J = sum_{pq} |p><q| (x) E(|p><q|) of a 4 -> 4 channel, input
/// factor first. Tr J = 4 for trace-preserving maps.
class ChoiMatrix {
 public:
  ChoiMatrix();
  explicit ChoiMatrix(CMatrix j);

  static ChoiMatrix from_unitary(const CMatrix& u);
  static ChoiMatrix identity();

  const CMatrix& matrix() const { return j_; }
  /// E(rho) for a 4x4 operator rho.
  CMatrix apply(const CMatrix& rho) const;
  CptpReport check_cptp(const CptpTolerance& tol = {}) const;

 private:
  CMatrix j_;
};

/// Process infidelity and diamond distance of one channel versus the ideal gate.
struct ErrorReport {
  double infidelity = 0.0;
  double diamond_distance = 0.0;
  std::map<std::string, double> metadata;
  std::vector<std::string> warnings;
};

/// Spec padded for gate use: truncation chosen for the state plus the largest
/// displacement the gate applies at any of `offsets`.
fock::MotionalSpec gate_ready_spec(const msgate::GateParams& params, double alpha_mag,
                                   double phi, double nbar_th,
                                   std::span<const msgate::FrequencyOffset> offsets,
                                   double leakage = fock::kDefaultLeakage);

/// Channel rho_spin -> Tr_motion[U (rho_spin (x) rho_motion) U^dagger] for a
/// joint propagator `u` of dimension 4N and a motional state of dimension N.
ChoiMatrix channel_from_propagator(const CMatrix& u, const fock::MotionalDensityMatrix& rho);

/// Gate channel for the given offset and initial motional state. The motional
/// state is renormalized to unit trace before use.
ChoiMatrix gate_channel(const msgate::GateParams& params, const msgate::FrequencyOffset& offset,
                        const fock::MotionalSpec& spec, double leakage = fock::kDefaultLeakage);

/// Choi matrix of exp(i pi/2 J_y^2).
ChoiMatrix ideal_gate_choi();

/// Unitary of a rank-one Choi matrix, up to global phase. Throws DomainError
/// when the channel is not unitary.
CMatrix unitary_from_choi(const ChoiMatrix& c);

/// Choi of U_ideal^dagger o E.
ChoiMatrix error_channel(const ChoiMatrix& actual, const ChoiMatrix& ideal);

/// Convex mixture; weights must sum to one within 1e-12.
ChoiMatrix mix_channels(std::span<const std::pair<double, ChoiMatrix>> weighted);

}  // namespace iongate::channel
