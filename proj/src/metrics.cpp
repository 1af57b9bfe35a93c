#include "iongate/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "iongate/error.hpp"

namespace iongate::metrics {

namespace {

using channel::kSpinDim;

constexpr int kW = 0;    // W block
constexpr int kS = 1;    // slack of rho (x) 1 - W
constexpr int kRho = 2;  // input density operator

}  // namespace

double entanglement_fidelity(const channel::ChoiMatrix& c) {
  Complex s = 0.0;
  for (int p = 0; p < kSpinDim; ++p) {
    for (int q = 0; q < kSpinDim; ++q) s += c.matrix()(p * kSpinDim + p, q * kSpinDim + q);
  }
  return s.real() / (kSpinDim * kSpinDim);
}

double process_infidelity(const channel::ChoiMatrix& actual, const channel::ChoiMatrix& ideal) {
  const double f = entanglement_fidelity(channel::error_channel(actual, ideal));
  return std::clamp(1.0 - f, 0.0, 1.0);
}

sdp::Problem diamond_norm_problem(const CMatrix& choi_difference, int dim_in, int dim_out) {
  const int n = dim_in * dim_out;
  if (choi_difference.rows() != n || choi_difference.cols() != n) {
    throw DomainError("Choi matrix shape does not match the channel dimensions");
  }
  sdp::Problem p;
  p.block_dims = {n, n, dim_in};
  const CMatrix herm = 0.5 * (choi_difference + choi_difference.adjoint());
  p.objective = {-herm, CMatrix::Zero(n, n), CMatrix::Zero(dim_in, dim_in)};

  // <E_k, W + S - rho (x) 1> = 0 for an orthonormal Hermitian basis E_k.
  // <E_k, rho (x) 1> = <Tr_out E_k, rho>, nonzero only when output indices match.
  const double r = 1.0 / std::numbers::sqrt2;
  auto add = [&](int a, int b, Complex v_ab) {
    sdp::Constraint c;
    const bool diag = (a == b);
    for (int blk : {kW, kS}) {
      c.entries.push_back({blk, a, b, v_ab});
      if (!diag) c.entries.push_back({blk, b, a, std::conj(v_ab)});
    }
    const int a_in = a / dim_out, a_out = a % dim_out;
    const int b_in = b / dim_out, b_out = b % dim_out;
    if (a_out == b_out) {
      c.entries.push_back({kRho, a_in, b_in, -v_ab});
      if (!diag) c.entries.push_back({kRho, b_in, a_in, -std::conj(v_ab)});
    }
    c.rhs = 0.0;
    p.constraints.push_back(std::move(c));
  };
  for (int a = 0; a < n; ++a) {
    add(a, a, 1.0);
    for (int b = a + 1; b < n; ++b) {
      add(a, b, r);
      add(a, b, Complex(0.0, r));
    }
  }
  sdp::Constraint trace;
  for (int i = 0; i < dim_in; ++i) trace.entries.push_back({kRho, i, i, 1.0});
  trace.rhs = 1.0;
  p.constraints.push_back(std::move(trace));
  return p;
}

DiamondResult diamond_norm(const CMatrix& choi_difference, int dim_in, int dim_out,
                           const sdp::Options& options) {
  const sdp::Solution sol = sdp::solve(diamond_norm_problem(choi_difference, dim_in, dim_out), options);
  if (sol.status != sdp::Status::kOptimal) {
    throw ConvergenceError("diamond-norm SDP ended with status '" + sdp::to_string(sol.status) +
                           "' after " + std::to_string(sol.iterations) +
                           " iterations (gap " + std::to_string(sol.gap) + ", primal residual " +
                           std::to_string(sol.primal_residual) + ", dual residual " +
                           std::to_string(sol.dual_residual) + ")");
  }
  DiamondResult out;
  out.norm = std::max(0.0, -(sol.primal_objective + sol.dual_objective));
  out.iterations = sol.iterations;
  out.gap = 2.0 * std::abs(sol.gap);
  out.accuracy = sol.accuracy;
  return out;
}

double diamond_distance(const channel::ChoiMatrix& a, const channel::ChoiMatrix& b) {
  return kDiamondScale * diamond_norm(a.matrix() - b.matrix(), kSpinDim, kSpinDim).norm;
}

channel::ErrorReport evaluate(const channel::ChoiMatrix& actual, const channel::ChoiMatrix& ideal) {
  channel::ErrorReport r;
  r.infidelity = process_infidelity(actual, ideal);
  const DiamondResult d = diamond_norm(actual.matrix() - ideal.matrix(), kSpinDim, kSpinDim);
  r.diamond_distance = kDiamondScale * d.norm;
  r.metadata["diamond_raw"] = d.norm;
  r.metadata["diamond_scale"] = kDiamondScale;
  r.metadata["sdp_iterations"] = d.iterations;
  r.metadata["sdp_gap"] = d.gap;
  r.metadata["sdp_accuracy"] = d.accuracy;
  return r;
}

}  // namespace iongate::metrics
