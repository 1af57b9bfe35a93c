#include "iongate/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iongate/error.hpp"

namespace iongate::sdp {

namespace {

using Blocks = std::vector<CMatrix>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].adjoint() * b[k]).trace().real();
  return s;
}

double frobenius(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

Blocks hermitian_part(Blocks a) {
  for (auto& m : a) m = 0.5 * (m + m.adjoint()).eval();
  return a;
}

// Per-block Nesterov-Todd scaling: W = G G^H with G^{-1} X G^{-H} = G^H Z G = diag(lambda).
struct Scaling {
  CMatrix g;
  CMatrix g_inv;
  CMatrix w;
  RVector lambda;
};

Scaling nt_scaling(const CMatrix& x, const CMatrix& z) {
  const Eigen::LLT<CMatrix> lx(x);
  const Eigen::LLT<CMatrix> lz(z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) {
    throw ConvergenceError("SDP iterate left the positive-definite cone");
  }
  const CMatrix lx_m = lx.matrixL();
  const CMatrix lz_m = lz.matrixL();
  const Eigen::JacobiSVD<CMatrix> svd(lz_m.adjoint() * lx_m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Scaling s;
  s.lambda = svd.singularValues();
  const RVector inv_sqrt = s.lambda.cwiseSqrt().cwiseInverse();
  s.g = lx_m * svd.matrixV() * inv_sqrt.asDiagonal();
  const CMatrix lx_inv = lx_m.triangularView<Eigen::Lower>().solve(
      CMatrix::Identity(x.rows(), x.cols()));
  s.g_inv = s.lambda.cwiseSqrt().asDiagonal() * svd.matrixV().adjoint() * lx_inv;
  s.w = s.g * s.g.adjoint();
  return s;
}

// Largest step a with m + a * dm still positive semidefinite (infinity if unbounded).
double max_step(const CMatrix& m, const CMatrix& dm) {
  const Eigen::LLT<CMatrix> l(m);
  const CMatrix lm = l.matrixL();
  const auto tri = lm.triangularView<Eigen::Lower>();
  CMatrix t = tri.solve(dm);
  t = tri.solve(t.adjoint().eval()).adjoint();
  t = 0.5 * (t + t.adjoint()).eval();
  const double lmin = Eigen::SelfAdjointEigenSolver<CMatrix>(t, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

class Operator {
 public:
  explicit Operator(const Problem& p) : p_(p) {}

  RVector apply(const Blocks& x) const {
    RVector out(p_.constraints.size());
    for (std::size_t i = 0; i < p_.constraints.size(); ++i) out(i) = apply_constraint(p_.constraints[i], x);
    return out;
  }

  Blocks adjoint(const RVector& y) const {
    Blocks out;
    for (int n : p_.block_dims) out.push_back(CMatrix::Zero(n, n));
    for (std::size_t i = 0; i < p_.constraints.size(); ++i) {
      if (y(i) == 0.0) continue;
      for (const auto& e : p_.constraints[i].entries) out[e.block](e.row, e.col) += y(i) * e.value;
    }
    return out;
  }

  // M_ij = Re Tr(A_i W A_j W)
  Eigen::MatrixXd schur(const std::vector<Scaling>& sc) const {
    const auto m = static_cast<Eigen::Index>(p_.constraints.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto& ei = p_.constraints[i].entries;
      for (Eigen::Index j = i; j < m; ++j) {
        double s = 0.0;
        for (const auto& e : ei) {
          const CMatrix& w = sc[e.block].w;
          for (const auto& f : p_.constraints[j].entries) {
            if (f.block != e.block) continue;
            s += (e.value * w(e.col, f.row) * f.value * w(f.col, e.row)).real();
          }
        }
        out(i, j) = s;
        out(j, i) = s;
      }
    }
    return out;
  }

 private:
  const Problem& p_;
};

struct Direction {
  Blocks dx;
  RVector dy;
  Blocks dz;
};

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kPrimalInfeasible: return "primal infeasible";
    case Status::kDualInfeasible: return "dual infeasible";
    case Status::kMaxIterations: return "max iterations";
  }
  return "unknown";
}

double apply_constraint(const Constraint& a, const std::vector<CMatrix>& x) {
  double s = 0.0;
  for (const auto& e : a.entries) s += (e.value * x[e.block](e.col, e.row)).real();
  return s;
}

CMatrix constraint_block(const Constraint& a, int block, int dim) {
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const auto& e : a.entries) {
    if (e.block == block) out(e.row, e.col) += e.value;
  }
  return out;
}

Solution solve(const Problem& problem, const Options& options) {
  const std::size_t nblocks = problem.block_dims.size();
  if (problem.objective.size() != nblocks) throw DomainError("objective block count mismatch");
  for (std::size_t k = 0; k < nblocks; ++k) {
    const int n = problem.block_dims[k];
    if (problem.objective[k].rows() != n || problem.objective[k].cols() != n)
      throw DomainError("objective block has wrong shape");
  }
  for (const auto& c : problem.constraints) {
    for (const auto& e : c.entries) {
      if (e.block < 0 || static_cast<std::size_t>(e.block) >= nblocks || e.row < 0 || e.col < 0 ||
          e.row >= problem.block_dims[e.block] || e.col >= problem.block_dims[e.block])
        throw DomainError("constraint entry out of range");
    }
  }

  const Operator op(problem);
  const auto m = static_cast<Eigen::Index>(problem.constraints.size());
  RVector b(m);
  for (Eigen::Index i = 0; i < m; ++i) b(i) = problem.constraints[i].rhs;
  const Blocks& c = problem.objective;

  int n_total = 0;
  for (int n : problem.block_dims) n_total += n;
  const double norm_b = b.norm();
  const double norm_c = frobenius(c);

  // Starting point scaled to the data.
  double xi = std::max(10.0, std::sqrt(static_cast<double>(n_total)));
  double eta = std::max({10.0, std::sqrt(static_cast<double>(n_total)), norm_c});
  for (Eigen::Index i = 0; i < m; ++i) {
    double na = 0.0;
    for (const auto& e : problem.constraints[i].entries) na += std::norm(e.value);
    na = std::sqrt(na);
    xi = std::max(xi, std::sqrt(static_cast<double>(n_total)) * (1.0 + std::abs(b(i))) / (1.0 + na));
    eta = std::max(eta, na);
  }

  Solution sol;
  for (int n : problem.block_dims) {
    sol.x.push_back(xi * CMatrix::Identity(n, n));
    sol.z.push_back(eta * CMatrix::Identity(n, n));
  }
  sol.y = RVector::Zero(m);

  Solution best;
  best.accuracy = std::numeric_limits<double>::infinity();
  // Hand back the most accurate iterate seen when progress stops.
  auto finish_stalled = [&](int iter) {
    best.iterations = iter;
    best.status = best.accuracy < options.acceptable_tolerance ? Status::kOptimal
                                                              : Status::kMaxIterations;
    return best;
  };

  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    sol.iterations = iter;
    const RVector rp = b - op.apply(sol.x);
    Blocks rd = op.adjoint(sol.y);
    for (std::size_t k = 0; k < nblocks; ++k) rd[k] = c[k] - sol.z[k] - rd[k];
    sol.primal_objective = inner(c, sol.x);
    sol.dual_objective = b.dot(sol.y);
    sol.gap = sol.primal_objective - sol.dual_objective;
    sol.primal_residual = rp.norm();
    sol.dual_residual = frobenius(rd);

    const double complementarity = inner(sol.x, sol.z);
    const double scale = 1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective);
    const double pinf = sol.primal_residual / (1.0 + norm_b);
    const double dinf = sol.dual_residual / (1.0 + norm_c);
    sol.accuracy = std::max({std::abs(sol.gap) / scale, complementarity / scale, pinf, dinf});
    if (sol.accuracy < options.tolerance) {
      sol.status = Status::kOptimal;
      return sol;
    }
    if (sol.accuracy < best.accuracy) best = sol;

    // Farkas-type certificates once iterates diverge.
    constexpr double kHuge = 1e10;
    if (sol.dual_objective > kHuge * (1.0 + norm_c)) {
      Blocks cert = rd;
      for (std::size_t k = 0; k < nblocks; ++k) cert[k] = c[k] - rd[k];
      if (frobenius(cert) / sol.dual_objective < 1e-6) {
        sol.status = Status::kPrimalInfeasible;
        return sol;
      }
    }
    if (-sol.primal_objective > kHuge * (1.0 + norm_b)) {
      if ((b - rp).norm() / -sol.primal_objective < 1e-6) {
        sol.status = Status::kDualInfeasible;
        return sol;
      }
    }
    if (iter == options.max_iterations) return finish_stalled(iter);

    std::vector<Scaling> sc;
    sc.reserve(nblocks);
    try {
      for (std::size_t k = 0; k < nblocks; ++k) sc.push_back(nt_scaling(sol.x[k], sol.z[k]));
    } catch (const ConvergenceError&) {
      if (iter == 0) throw;
      return finish_stalled(iter);
    }

    Eigen::MatrixXd schur = op.schur(sc);
    Eigen::LLT<Eigen::MatrixXd> chol(schur);
    if (chol.info() != Eigen::Success) {
      schur.diagonal().array() += 1e-14 * std::max(1.0, schur.diagonal().maxCoeff());
      chol.compute(schur);
      if (chol.info() != Eigen::Success) return finish_stalled(iter);
    }

    const double mu = complementarity / n_total;

    // Direction for a given complementarity right-hand side rc:
    //   M dy = rp - A(rc - W rd W), dz = rd - A^* dy, dx = rc - W dz W.
    auto direction = [&](const Blocks& rc) {
      Blocks tmp(nblocks);
      for (std::size_t k = 0; k < nblocks; ++k) tmp[k] = rc[k] - sc[k].w * rd[k] * sc[k].w;
      Direction d;
      const RVector rhs = rp - op.apply(hermitian_part(tmp));
      d.dy = chol.solve(rhs);
      d.dy += chol.solve(rhs - schur * d.dy);
      d.dz = op.adjoint(d.dy);
      for (std::size_t k = 0; k < nblocks; ++k) d.dz[k] = rd[k] - d.dz[k];
      d.dz = hermitian_part(std::move(d.dz));
      d.dx.resize(nblocks);
      for (std::size_t k = 0; k < nblocks; ++k) d.dx[k] = rc[k] - sc[k].w * d.dz[k] * sc[k].w;
      d.dx = hermitian_part(std::move(d.dx));
      return d;
    };
    auto step_lengths = [&](const Direction& d, double fraction) {
      double ap = std::numeric_limits<double>::infinity();
      double ad = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < nblocks; ++k) {
        ap = std::min(ap, max_step(sol.x[k], d.dx[k]));
        ad = std::min(ad, max_step(sol.z[k], d.dz[k]));
      }
      return std::pair{std::min(1.0, fraction * ap), std::min(1.0, fraction * ad)};
    };

    // Predictor (affine scaling).
    Blocks rc(nblocks);
    for (std::size_t k = 0; k < nblocks; ++k) rc[k] = -sol.x[k];
    const Direction pred = direction(rc);
    const auto [ap_aff, ad_aff] = step_lengths(pred, 1.0);
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < nblocks; ++k) {
      mu_aff += ((sol.x[k] + ap_aff * pred.dx[k]).adjoint() * (sol.z[k] + ad_aff * pred.dz[k]))
                    .trace()
                    .real();
    }
    mu_aff /= n_total;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector in the scaled space: V o (Dx + Dz) = sigma mu I - V^2 - Dx_p o Dz_p.
    for (std::size_t k = 0; k < nblocks; ++k) {
      const Scaling& s = sc[k];
      const CMatrix dxp = s.g_inv * pred.dx[k] * s.g_inv.adjoint();
      const CMatrix dzp = s.g.adjoint() * pred.dz[k] * s.g;
      CMatrix r = -0.5 * (dxp * dzp + dzp * dxp);
      const auto n = r.rows();
      for (Eigen::Index i = 0; i < n; ++i) r(i, i) += sigma * mu - s.lambda(i) * s.lambda(i);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) r(i, j) *= 2.0 / (s.lambda(i) + s.lambda(j));
      }
      rc[k] = s.g * r * s.g.adjoint();
    }
    const Direction corr = direction(hermitian_part(std::move(rc)));
    const auto [ap, ad] = step_lengths(corr, options.step_fraction);
    for (std::size_t k = 0; k < nblocks; ++k) {
      sol.x[k] += ap * corr.dx[k];
      sol.z[k] += ad * corr.dz[k];
    }
    sol.y += ad * corr.dy;
    sol.x = hermitian_part(std::move(sol.x));
    sol.z = hermitian_part(std::move(sol.z));
  }
  return finish_stalled(options.max_iterations);
}

}  // namespace iongate::sdp
