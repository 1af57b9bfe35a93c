#pragma once

// Dense primal-dual interior-point solver for small semidefinite programs over
// block-diagonal Hermitian matrices:
//
//   primal:  minimize <C, X>   s.t.  <A_i, X> = b_i,  X >= 0
//   dual:    maximize b^T y    s.t.  sum_i y_i A_i + Z = C,  Z >= 0
//
// with <A, X> = Re Tr(A X). Search directions use Nesterov-Todd scaling and a
// Mehrotra predictor-corrector step. Constraint matrices are stored sparsely.

#include <string>
#include <vector>

#include "iongate/linalg.hpp"

namespace iongate::sdp {

/// One entry of a Hermitian constraint matrix. Both (row, col) and
/// (col, row) must be listed for off-diagonal entries.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  Complex value;
};

struct Constraint {
  std::vector<Entry> entries;
  double rhs = 0.0;
};

struct Problem {
  std::vector<int> block_dims;
  std::vector<CMatrix> objective;  ///< C, one Hermitian matrix per block
  std::vector<Constraint> constraints;
};

struct Options {
  int max_iterations = 100;
  double tolerance = 1e-10;     ///< relative gap and infeasibility target
  /// When the iteration stalls or the iterates lose definiteness in floating
  /// point, the best iterate is accepted as optimal if it reaches this accuracy.
  double acceptable_tolerance = 1e-7;
  double step_fraction = 0.98;  ///< fraction of the step to the cone boundary
};

enum class Status { kOptimal, kPrimalInfeasible, kDualInfeasible, kMaxIterations };

std::string to_string(Status s);

struct Solution {
  Status status = Status::kMaxIterations;
  std::vector<CMatrix> x;  ///< primal blocks
  RVector y;               ///< dual multipliers
  std::vector<CMatrix> z;  ///< dual slack blocks
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  /// primal_objective - dual_objective
  double gap = 0.0;
  double primal_residual = 0.0;  ///< ||b - A(X)||
  double dual_residual = 0.0;    ///< ||C - Z - A^*(y)||_F
  /// max(relative gap, relative complementarity, relative residuals)
  double accuracy = 0.0;
  int iterations = 0;
};

/// Re Tr(A X) for a sparse constraint and block-diagonal X.
double apply_constraint(const Constraint& a, const std::vector<CMatrix>& x);

/// Dense block of a constraint matrix.
CMatrix constraint_block(const Constraint& a, int block, int dim);

/// Solves the problem; infeasibility and iteration exhaustion are reported
/// through Solution::status rather than thrown.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace iongate::sdp
