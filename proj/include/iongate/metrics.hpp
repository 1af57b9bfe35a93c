#pragma once

// Gate-error metrics: process infidelity and diamond distance.

#include "iongate/channel.hpp"
#include "iongate/sdp.hpp"

namespace iongate::metrics {

/// Reported diamond distance = kDiamondScale * ||E - U||_diamond. The full
/// norm reproduces the published single-offset anchors (0.45 at 600 Hz drift,
/// |alpha|^2 = 2); the half norm is what the surface plots show.
inline constexpr double kDiamondScale = 1.0;

/// <Phi+| J / 4 |Phi+> for the normalized maximally entangled state.
double entanglement_fidelity(const channel::ChoiMatrix& c);

/// 1 - F_e of error_channel(actual, ideal), clamped to [0, 1].
double process_infidelity(const channel::ChoiMatrix& actual, const channel::ChoiMatrix& ideal);

struct DiamondResult {
  double norm = 0.0;
  int iterations = 0;
  double gap = 0.0;  ///< |primal - dual| of the underlying SDP, in norm units
  double accuracy = 0.0;  ///< solver accuracy measure, see sdp::Solution
};

/// ||Phi||_diamond for a Hermiticity-preserving, trace-annihilating map given
/// by its Choi matrix (input factor first), e.g. the difference of two
/// channels. Solves max 2<J, W> s.t. 0 <= W <= rho (x) 1, Tr rho = 1. Throws
/// ConvergenceError when the SDP does not reach optimality.
DiamondResult diamond_norm(const CMatrix& choi_difference, int dim_in, int dim_out,
                           const sdp::Options& options = {});

/// The SDP behind diamond_norm, exposed for inspection and testing.
sdp::Problem diamond_norm_problem(const CMatrix& choi_difference, int dim_in, int dim_out);

/// kDiamondScale * ||a - b||_diamond.
double diamond_distance(const channel::ChoiMatrix& a, const channel::ChoiMatrix& b);

/// Both metrics for `actual` against the unitary `ideal`, with SDP diagnostics
/// in the metadata.
channel::ErrorReport evaluate(const channel::ChoiMatrix& actual, const channel::ChoiMatrix& ideal);

}  // namespace iongate::metrics
