#include "iongate/msgate.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "iongate/error.hpp"
#include "iongate/fock.hpp"

namespace iongate::msgate {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Below this |delta t| the closed forms switch to their Taylor series.
constexpr double kSeriesThreshold = 1e-6;

CMatrix sigma_y() {
  CMatrix s(2, 2);
  s << 0.0, -kI, kI, 0.0;
  return s;
}

}  // namespace

GateParams calibrate_gate(int loops, double tau, double nu0) {
  if (loops < 1) throw DomainError("loop count must be >= 1");
  if (!(tau > 0.0)) throw DomainError("gate duration must be > 0");
  GateParams p;
  p.loops = loops;
  p.tau = tau;
  p.nu0 = nu0;
  p.delta0 = -kTwoPi * loops / tau;
  p.eta_omega = kTwoPi * std::sqrt(static_cast<double>(loops)) / (2.0 * tau);
  return p;
}

double detuning(const GateParams& params, const FrequencyOffset& offset) {
  if (!(std::abs(offset.delta_nu) < 5.0 * std::abs(params.delta0))) {
    throw DomainError("trap-frequency offset " + std::to_string(offset.delta_nu) +
                      " rad/s outside the single-sideband validity range");
  }
  return params.delta0 - offset.delta_nu;
}

Complex trajectory(const GateParams& params, const FrequencyOffset& offset, double t) {
  const double delta = detuning(params, offset);
  const double x = delta * t;
  if (std::abs(x) < kSeriesThreshold) {
    // (1 - e^{-ix}) / x = i + x/2 - i x^2/6 + O(x^3)
    return params.eta_omega * t * Complex(x / 2.0, 1.0 - x * x / 6.0);
  }
  return params.eta_omega / delta * (1.0 - std::exp(-kI * x));
}

double geometric_phase(const GateParams& params, const FrequencyOffset& offset, double t) {
  const double delta = detuning(params, offset);
  const double x = delta * t;
  const double g = params.eta_omega;
  if (std::abs(x) < kSeriesThreshold) {
    return g * g * t * t * (x / 6.0 - x * x * x / 120.0);
  }
  return g * g / (delta * delta) * (x - std::sin(x));
}

double max_displacement(const GateParams& params, const FrequencyOffset& offset) {
  const double delta = detuning(params, offset);
  if (std::abs(delta * params.tau) < kSeriesThreshold) return params.eta_omega * params.tau;
  return std::min(2.0 * params.eta_omega / std::abs(delta), params.eta_omega * params.tau);
}

CMatrix collective_jy() {
  const CMatrix id = CMatrix::Identity(2, 2);
  return 0.5 * (kron(sigma_y(), id) + kron(id, sigma_y()));
}

CMatrix jy_projector(int j) {
  const CMatrix jy = collective_jy();
  const CMatrix id = CMatrix::Identity(4, 4);
  switch (j) {
    case -1: return 0.5 * jy * (jy - id);
    case 0: return id - jy * jy;
    case 1: return 0.5 * jy * (jy + id);
    default: throw DomainError("J_y eigenvalues are -1, 0, 1");
  }
}

CMatrix ideal_gate_unitary() {
  const CMatrix jy = collective_jy();
  CMatrix u = CMatrix::Zero(4, 4);
  for (int j = -1; j <= 1; ++j) {
    u += std::exp(kI * (std::numbers::pi / 2.0) * static_cast<double>(j * j)) * jy_projector(j);
  }
  return u;
}

CMatrix propagator(const GateParams& params, const FrequencyOffset& offset, int fock_dim,
                   int required_dim, double leakage) {
  if (fock_dim < 1) throw DomainError("Fock dimension must be >= 1");
  const Complex alpha = trajectory(params, offset, params.tau);
  const double phase = geometric_phase(params, offset, params.tau);
  CMatrix u = CMatrix::Zero(4 * fock_dim, 4 * fock_dim);
  for (int j = -1; j <= 1; ++j) {
    const CMatrix d = fock::displacement_matrix(static_cast<double>(j) * alpha, fock_dim,
                                                required_dim, leakage);
    u += kron(jy_projector(j), std::exp(-kI * phase * static_cast<double>(j * j)) * d);
  }
  return u;
}

CMatrix brute_force_propagator(const GateParams& params, const FrequencyOffset& offset,
                               int fock_dim, int steps) {
  if (fock_dim < 1 || steps < 1) throw DomainError("need fock_dim >= 1 and steps >= 1");
  const double delta = detuning(params, offset);
  const double dt = params.tau / steps;

  // Position quadrature a + a^dagger on the truncated space.
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(fock_dim, fock_dim);
  for (int n = 0; n + 1 < fock_dim; ++n) {
    x0(n, n + 1) = x0(n + 1, n) = std::sqrt(n + 1.0);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> quad(x0);
  const Eigen::SelfAdjointEigenSolver<CMatrix> spin(collective_jy());

  // H commutes with J_y (x) 1, so evolve each J_y eigenvector's motional block.
  // With R(t) = exp(-i delta t n), the step is R exp(i eta_omega j dt X0) R^dagger.
  CMatrix u = CMatrix::Zero(4 * fock_dim, 4 * fock_dim);
  for (int k = 0; k < 4; ++k) {
    const double j = spin.eigenvalues()(k);
    const CVector v = spin.eigenvectors().col(k);
    if (std::abs(j) < 1e-12) {
      u += kron(v * v.adjoint(), CMatrix::Identity(fock_dim, fock_dim));
      continue;
    }
    const CVector phases =
        (kI * params.eta_omega * j * dt * quad.eigenvalues().cast<Complex>()).array().exp();
    const CMatrix q = quad.eigenvectors().cast<Complex>();
    const CMatrix step = q * phases.asDiagonal() * q.adjoint();

    CMatrix block = CMatrix::Identity(fock_dim, fock_dim);
    CVector rot(fock_dim);
    for (int s = 0; s < steps; ++s) {
      const double t_mid = (s + 0.5) * dt;
      for (int n = 0; n < fock_dim; ++n) rot(n) = std::exp(-kI * (delta * t_mid * n));
      block = rot.conjugate().asDiagonal() * block;
      block = (step * block).eval();
      block = rot.asDiagonal() * block;
    }
    u += kron(v * v.adjoint(), block);
  }
  return u;
}

}  // namespace iongate::msgate
