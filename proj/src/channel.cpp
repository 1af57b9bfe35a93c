#include "iongate/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iongate/error.hpp"

namespace iongate::channel {

namespace {

constexpr int kChoiDim = kSpinDim * kSpinDim;

}  // namespace

ChoiMatrix::ChoiMatrix() : j_(CMatrix::Zero(kChoiDim, kChoiDim)) {}

ChoiMatrix::ChoiMatrix(CMatrix j) : j_(std::move(j)) {
  if (j_.rows() != kChoiDim || j_.cols() != kChoiDim) {
    throw DomainError("two-qubit Choi matrix must be 16x16");
  }
}

ChoiMatrix ChoiMatrix::from_unitary(const CMatrix& u) {
  if (u.rows() != kSpinDim || u.cols() != kSpinDim) throw DomainError("unitary must be 4x4");
  // |v>> with v_{p*4+s} = U_{s,p}
  CVector v(kChoiDim);
  for (int p = 0; p < kSpinDim; ++p) {
    for (int s = 0; s < kSpinDim; ++s) v(p * kSpinDim + s) = u(s, p);
  }
  return ChoiMatrix(v * v.adjoint());
}

ChoiMatrix ChoiMatrix::identity() { return from_unitary(CMatrix::Identity(kSpinDim, kSpinDim)); }

CMatrix ChoiMatrix::apply(const CMatrix& rho) const {
  if (rho.rows() != kSpinDim || rho.cols() != kSpinDim) throw DomainError("input must be 4x4");
  CMatrix out = CMatrix::Zero(kSpinDim, kSpinDim);
  for (int p = 0; p < kSpinDim; ++p) {
    for (int q = 0; q < kSpinDim; ++q) {
      out += rho(p, q) * j_.block(p * kSpinDim, q * kSpinDim, kSpinDim, kSpinDim);
    }
  }
  return out;
}

CptpReport ChoiMatrix::check_cptp(const CptpTolerance& tol) const {
  CptpReport r;
  r.hermitian_defect = max_abs(j_ - j_.adjoint());
  const CMatrix herm = 0.5 * (j_ + j_.adjoint());
  r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<CMatrix>(herm, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .minCoeff();
  // Tr_out J must equal the identity on the input.
  CMatrix partial = CMatrix::Zero(kSpinDim, kSpinDim);
  for (int p = 0; p < kSpinDim; ++p) {
    for (int q = 0; q < kSpinDim; ++q) {
      partial(p, q) = j_.block(p * kSpinDim, q * kSpinDim, kSpinDim, kSpinDim).trace();
    }
  }
  r.trace_defect = max_abs(partial - CMatrix::Identity(kSpinDim, kSpinDim));
  r.ok = r.hermitian_defect <= tol.hermitian && r.min_eigenvalue >= tol.min_eigenvalue &&
         r.trace_defect <= tol.trace_preservation;
  return r;
}

fock::MotionalSpec gate_ready_spec(const msgate::GateParams& params, double alpha_mag,
                                   double phi, double nbar_th,
                                   std::span<const msgate::FrequencyOffset> offsets,
                                   double leakage) {
  double gate_disp = msgate::max_displacement(params, msgate::FrequencyOffset{});
  for (const auto& off : offsets) gate_disp = std::max(gate_disp, msgate::max_displacement(params, off));
  const int n = fock::choose_truncation(alpha_mag, nbar_th, leakage, gate_disp);
  return fock::MotionalSpec(alpha_mag, phi, nbar_th, n);
}

ChoiMatrix channel_from_propagator(const CMatrix& u, const fock::MotionalDensityMatrix& rho) {
  const int n = rho.dim();
  if (u.rows() != kSpinDim * n || u.cols() != kSpinDim * n) {
    throw DomainError("propagator dimension does not match the motional state");
  }
  // E(|p><q|)_{s,s'} = Tr[U_{s,p} rho U_{s',q}^dagger] with U_{s,p} the N x N blocks.
  std::vector<CMatrix> u_rho(kSpinDim * kSpinDim);
  for (int s = 0; s < kSpinDim; ++s) {
    for (int p = 0; p < kSpinDim; ++p) {
      u_rho[s * kSpinDim + p] = u.block(s * n, p * n, n, n) * rho.matrix();
    }
  }
  CMatrix j(kChoiDim, kChoiDim);
  for (int p = 0; p < kSpinDim; ++p) {
    for (int q = 0; q < kSpinDim; ++q) {
      for (int s = 0; s < kSpinDim; ++s) {
        for (int t = 0; t < kSpinDim; ++t) {
          // Tr[A B^dagger] = sum_ab A_ab conj(B_ab)
          j(p * kSpinDim + s, q * kSpinDim + t) =
              (u_rho[s * kSpinDim + p].array() * u.block(t * n, q * n, n, n).array().conjugate())
                  .sum();
        }
      }
    }
  }
  return ChoiMatrix(0.5 * (j + j.adjoint()));
}

ChoiMatrix gate_channel(const msgate::GateParams& params, const msgate::FrequencyOffset& offset,
                        const fock::MotionalSpec& spec, double leakage) {
  const fock::MotionalDensityMatrix raw = fock::motional_density_matrix(spec, leakage);
  const fock::MotionalDensityMatrix rho(raw.matrix() / raw.trace());
  const int needed = fock::populated_dim(rho, leakage);
  const CMatrix u = msgate::propagator(params, offset, spec.truncation(), needed, leakage);
  return channel_from_propagator(u, rho);
}

ChoiMatrix ideal_gate_choi() { return ChoiMatrix::from_unitary(msgate::ideal_gate_unitary()); }

CMatrix unitary_from_choi(const ChoiMatrix& c) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (c.matrix() + c.matrix().adjoint()));
  const RVector& ev = es.eigenvalues();
  const double top = ev(kChoiDim - 1);
  if (std::abs(top - kSpinDim) > 1e-8 || ev(kChoiDim - 2) > 1e-8) {
    throw DomainError("reference channel is not unitary (Choi spectrum not {4, 0, ...})");
  }
  const CVector v = es.eigenvectors().col(kChoiDim - 1) * std::sqrt(top);
  CMatrix u(kSpinDim, kSpinDim);
  for (int p = 0; p < kSpinDim; ++p) {
    for (int s = 0; s < kSpinDim; ++s) u(s, p) = v(p * kSpinDim + s);
  }
  if (max_abs(u.adjoint() * u - CMatrix::Identity(kSpinDim, kSpinDim)) > 1e-8) {
    throw DomainError("reference channel is not unitary");
  }
  return u;
}

ChoiMatrix error_channel(const ChoiMatrix& actual, const ChoiMatrix& ideal) {
  const CMatrix u = unitary_from_choi(ideal);
  const CMatrix w = kron(CMatrix::Identity(kSpinDim, kSpinDim), u.adjoint());
  const CMatrix j = w * actual.matrix() * w.adjoint();
  return ChoiMatrix(0.5 * (j + j.adjoint()));
}

ChoiMatrix mix_channels(std::span<const std::pair<double, ChoiMatrix>> weighted) {
  if (weighted.empty()) throw DomainError("cannot mix an empty set of channels");
  double total = 0.0;
  CMatrix j = CMatrix::Zero(kChoiDim, kChoiDim);
  for (const auto& [w, c] : weighted) {
    if (!(w >= 0.0)) throw DomainError("mixture weights must be >= 0");
    total += w;
    j += w * c.matrix();
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("mixture weights sum to " + std::to_string(total) + ", expected 1");
  }
  return ChoiMatrix(std::move(j));
}

}  // namespace iongate::channel
