#include "iongate/fock.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "iongate/error.hpp"

namespace iongate::fock {

namespace {

double reduce_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

// |<m|D(alpha)|n>|^2 for m, n < dim; depends only on |alpha|.
Eigen::MatrixXd displaced_fock_weights(double alpha_mag, int dim) {
  CMatrix d(dim, dim);
  for (int n = 0; n < dim; ++n) d.col(n) = displaced_fock_column(Complex(alpha_mag, 0.0), n, dim);
  return d.cwiseAbs2();
}

}  // namespace

MotionalSpec::MotionalSpec(double alpha_mag, double phi, double nbar_th, int truncation)
    : alpha_mag_(alpha_mag), phi_(reduce_phase(phi)), nbar_th_(nbar_th), truncation_(truncation) {
  if (!(alpha_mag >= 0.0) || !std::isfinite(alpha_mag))
    throw DomainError("alpha magnitude must be finite and >= 0");
  if (!(nbar_th >= 0.0) || !std::isfinite(nbar_th))
    throw DomainError("thermal occupation must be finite and >= 0");
  if (!std::isfinite(phi)) throw DomainError("displacement phase must be finite");
  if (truncation < 1) throw DomainError("Fock truncation must be >= 1");
}

MotionalSpec MotionalSpec::from_alpha_sq(double alpha_sq, double phi, double nbar_th,
                                         int truncation) {
  if (!(alpha_sq >= 0.0)) throw DomainError("|alpha|^2 must be >= 0");
  return MotionalSpec(std::sqrt(alpha_sq), phi, nbar_th, truncation);
}

Complex MotionalSpec::alpha() const { return std::polar(alpha_mag_, phi_); }

MotionalSpec MotionalSpec::with_truncation(int truncation) const {
  return MotionalSpec(alpha_mag_, phi_, nbar_th_, truncation);
}

MotionalSpec MotionalSpec::with_phi(double phi) const {
  return MotionalSpec(alpha_mag_, phi, nbar_th_, truncation_);
}

double MotionalDensityMatrix::mean_occupation() const {
  double s = 0.0;
  for (int n = 0; n < dim(); ++n) s += n * rho_(n, n).real();
  return s;
}

double laguerre(int n, int k, double x) {
  if (n < 0) throw DomainError("Laguerre order must be >= 0, got " + std::to_string(n));
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + k - x;
  for (int j = 1; j < n; ++j) {
    const double next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

CVector displaced_fock_column(Complex alpha, int n, int dim) {
  if (n < 0 || dim < 1) throw DomainError("displaced Fock column needs n >= 0 and dim >= 1");
  CVector c = CVector::Zero(dim);
  const double mag = std::abs(alpha);
  if (mag == 0.0) {
    if (n < dim) c(n) = 1.0;
    return c;
  }
  const double x = mag * mag;
  const double log_mag = std::log(mag);
  const double theta = std::arg(alpha);
  const double lg_n = std::lgamma(n + 1.0);
  for (int m = 0; m < dim; ++m) {
    if (m >= n) {
      const int p = m - n;
      const double log_pre = -0.5 * x + 0.5 * (lg_n - std::lgamma(m + 1.0)) + p * log_mag;
      c(m) = std::polar(std::exp(log_pre) * laguerre(n, p, x), p * theta);
    } else {
      // (-alpha*)^{n-m} sqrt(m!/n!) e^{-x/2} L_m^{(n-m)}(x)
      const int p = n - m;
      const double log_pre = -0.5 * x + 0.5 * (std::lgamma(m + 1.0) - lg_n) + p * log_mag;
      const double sign = (p % 2 == 0) ? 1.0 : -1.0;
      c(m) = std::polar(sign * std::exp(log_pre) * laguerre(m, p, x), -p * theta);
    }
  }
  return c;
}

CVector displaced_fock_coefficients(Complex alpha, int n, int dim, double leakage) {
  if (n >= dim) throw DomainError("displaced Fock index must be below the truncation");
  CVector c = displaced_fock_column(alpha, n, dim);
  const double norm2 = c.squaredNorm();
  if (norm2 < 1.0 - leakage) {
    throw TruncationError("displaced Fock state n=" + std::to_string(n) + " retains norm^2 " +
                          std::to_string(norm2) + " at truncation " + std::to_string(dim));
  }
  return c;
}

int reliable_columns(const CMatrix& d, double leakage) {
  int k = 0;
  while (k < d.cols() && d.col(k).squaredNorm() >= 1.0 - leakage) ++k;
  return k;
}

CMatrix displacement_matrix(Complex alpha, int dim, int required_dim, double leakage) {
  if (dim < 1) throw DomainError("displacement matrix needs dim >= 1");
  CMatrix d(dim, dim);
  for (int n = 0; n < dim; ++n) d.col(n) = displaced_fock_column(alpha, n, dim);
  const int reliable = reliable_columns(d, leakage);
  if (reliable < required_dim) {
    throw TruncationError("displacement by |alpha|=" + std::to_string(std::abs(alpha)) +
                          " is accurate on " + std::to_string(reliable) + " Fock levels, need " +
                          std::to_string(required_dim) + " (truncation " + std::to_string(dim) +
                          ")");
  }
  return d;
}

RVector thermal_weights(double nbar_th, int dim) {
  if (!(nbar_th >= 0.0)) throw DomainError("thermal occupation must be >= 0");
  if (dim < 1) throw DomainError("thermal weights need dim >= 1");
  RVector w(dim);
  const double ratio = nbar_th / (1.0 + nbar_th);
  double cur = 1.0 / (1.0 + nbar_th);
  for (int n = 0; n < dim; ++n) {
    w(n) = cur;
    cur *= ratio;
  }
  return w;
}

double thermal_occupation(double temperature, double nu) {
  constexpr double hbar = 1.054571817e-34;
  constexpr double k_b = 1.380649e-23;
  if (!(temperature > 0.0)) throw DomainError("temperature must be > 0");
  if (!(nu > 0.0)) throw DomainError("mode frequency must be > 0");
  const double x = hbar * nu / (k_b * temperature);
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

MotionalDensityMatrix motional_density_matrix(const MotionalSpec& spec, double leakage) {
  const int dim = spec.truncation();
  CMatrix d(dim, dim);
  for (int n = 0; n < dim; ++n) d.col(n) = displaced_fock_column(spec.alpha(), n, dim);
  const RVector w = thermal_weights(spec.nbar_th(), dim);
  const CMatrix dw = d * w.cwiseSqrt().asDiagonal();
  CMatrix rho = dw * dw.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  MotionalDensityMatrix out(std::move(rho));
  if (out.trace() < 1.0 - leakage) {
    throw TruncationError("motional state trace " + std::to_string(out.trace()) +
                          " below 1 - leakage at truncation " + std::to_string(dim));
  }
  return out;
}

int gate_padding(double alpha_mag, double gate_displacement) {
  const double s = alpha_mag + gate_displacement;
  return static_cast<int>(std::ceil(4.0 * s * s + 10.0));
}

int choose_truncation(double alpha_mag, double nbar_th, double leakage,
                      std::optional<double> gate_displacement) {
  if (!(leakage > 0.0 && leakage < 1.0)) throw DomainError("leakage budget must lie in (0, 1)");
  if (!(alpha_mag >= 0.0) || !(nbar_th >= 0.0))
    throw DomainError("motional parameters must be >= 0");

  int table_dim = 64;
  int base = 0;
  while (base == 0) {
    const Eigen::MatrixXd c2 = displaced_fock_weights(alpha_mag, table_dim);
    const RVector w = thermal_weights(nbar_th, table_dim);
    for (int n = kMinTruncation; n <= table_dim && n <= kMaxTruncation; n += 4) {
      // Diagonal of rho at truncation n.
      const RVector pops = c2.topLeftCorner(n, n) * w.head(n);
      const int top = n - (n + 9) / 10;
      if (pops.sum() >= 1.0 - leakage && pops.tail(n - top).sum() < leakage) {
        base = n;
        break;
      }
    }
    if (base == 0) {
      if (table_dim >= kMaxTruncation) {
        throw TruncationError("no truncation up to " + std::to_string(kMaxTruncation) +
                              " satisfies leakage budget");
      }
      table_dim = std::min(2 * table_dim, kMaxTruncation);
    }
  }
  if (!gate_displacement) return base;
  const int padded = base + gate_padding(alpha_mag, *gate_displacement);
  if (padded > kMaxTruncation) {
    throw TruncationError("padded truncation " + std::to_string(padded) + " exceeds cap " +
                          std::to_string(kMaxTruncation));
  }
  return padded;
}

int populated_dim(const MotionalDensityMatrix& rho, double leakage) {
  const RVector p = rho.populations();
  const double target = p.sum() - leakage;
  double acc = 0.0;
  for (int k = 0; k < p.size(); ++k) {
    acc += p(k);
    if (acc >= target) return k + 1;
  }
  return static_cast<int>(p.size());
}

}  // namespace iongate::fock
