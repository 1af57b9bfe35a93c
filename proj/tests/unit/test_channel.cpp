#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "iongate/channel.hpp"
#include "iongate/error.hpp"
#include "iongate/metrics.hpp"

using namespace iongate;
using namespace iongate::channel;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

msgate::GateParams paper_gate() { return msgate::calibrate_gate(2, 60e-6, kTwoPi * 3e6); }

fock::MotionalSpec ready(const msgate::GateParams& p, double alpha_sq, double phi, double nbar,
                         double offset) {
  const msgate::FrequencyOffset off{offset};
  return gate_ready_spec(p, std::sqrt(alpha_sq), phi, nbar, std::span(&off, 1));
}

// Channel in closed form, without any Fock-space representation. For a
// displaced thermal state the motional trace Tr[D(k a)^dag D(j a) rho] is the
// characteristic function chi((j - k) a) = exp(-|b|^2 (nbar + 1/2)) exp(b a0* - b* a0).
CMatrix analytic_choi(const msgate::GateParams& p, double offset, Complex a0, double nbar) {
  const msgate::FrequencyOffset off{offset};
  const Complex a = msgate::trajectory(p, off, p.tau);
  const double b = msgate::geometric_phase(p, off, p.tau);
  auto chi = [&](Complex beta) {
    return std::exp(-std::norm(beta) * (nbar + 0.5)) * std::exp(beta * std::conj(a0) - std::conj(beta) * a0);
  };
  CMatrix j = CMatrix::Zero(16, 16);
  for (int p_in = 0; p_in < 4; ++p_in) {
    for (int q_in = 0; q_in < 4; ++q_in) {
      CMatrix in = CMatrix::Zero(4, 4);
      in(p_in, q_in) = 1.0;
      CMatrix out = CMatrix::Zero(4, 4);
      for (int jj = -1; jj <= 1; ++jj) {
        for (int kk = -1; kk <= 1; ++kk) {
          const Complex f = std::exp(Complex(0.0, -b * (jj * jj - kk * kk))) *
                            chi(static_cast<double>(jj - kk) * a);
          out += f * msgate::jy_projector(jj) * in * msgate::jy_projector(kk);
        }
      }
      j.block(p_in * 4, q_in * 4, 4, 4) = out;
    }
  }
  return j;
}

// Tr_motion[U (rho_s (x) rho_m) U^dag] with the full joint matrices.
CMatrix propagate_directly(const CMatrix& u, const CMatrix& rho_s, const CMatrix& rho_m) {
  const int n = static_cast<int>(rho_m.rows());
  const CMatrix joint = u * kron(rho_s, rho_m) * u.adjoint();
  CMatrix out(4, 4);
  for (int s = 0; s < 4; ++s)
    for (int t = 0; t < 4; ++t) out(s, t) = joint.block(s * n, t * n, n, n).trace();
  return out;
}

CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) a(i, k) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

int choi_rank(const ChoiMatrix& c, double tol) {
  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(c.matrix()).eigenvalues();
  return static_cast<int>((ev.array() > tol).count());
}

}  // namespace

TEST_CASE("ideal gate channel") {
  const ChoiMatrix ideal = ideal_gate_choi();
  CHECK(choi_rank(ideal, 1e-8) == 1);
  CHECK(std::abs(ideal.matrix().trace() - 4.0) < 1e-14);
  CHECK(ideal.check_cptp().ok);

  // |00> goes to a pure maximally entangled state.
  CMatrix in = CMatrix::Zero(4, 4);
  in(0, 0) = 1.0;
  const CMatrix out = ideal.apply(in);
  CHECK(std::abs((out * out).trace() - 1.0) < 1e-14);
  CMatrix reduced = CMatrix::Zero(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) reduced(a, b) = out(2 * a, 2 * b) + out(2 * a + 1, 2 * b + 1);
  CHECK(std::abs((reduced * reduced).trace() - 0.5) < 1e-14);
  CHECK(std::abs(out(0, 0) - 0.5) < 1e-14);
  CHECK(std::abs(out(3, 3) - 0.5) < 1e-14);

  CHECK(max_abs(error_channel(ideal, ideal).matrix() - ChoiMatrix::identity().matrix()) < 1e-12);
  CHECK(max_abs(unitary_from_choi(ideal) * unitary_from_choi(ideal).adjoint() - CMatrix::Identity(4, 4)) < 1e-12);
  CHECK_THROWS_AS(unitary_from_choi(ChoiMatrix(CMatrix::Identity(16, 16) / 4.0)), DomainError);
  CHECK_THROWS_AS(ChoiMatrix(CMatrix::Identity(4, 4)), DomainError);
}

TEST_CASE("perfect gate leaves no spin-motion entanglement") {
  const auto p = paper_gate();
  for (double a2 : {0.0, 1.0}) {
    for (double nbar : {0.0, 0.5}) {
      const ChoiMatrix c = gate_channel(p, {}, ready(p, a2, 0.3, nbar, 0.0));
      CHECK(choi_rank(c, 1e-8) == 1);
      CHECK(max_abs(c.matrix() - ideal_gate_choi().matrix()) < 1e-8);
      CHECK(max_abs(error_channel(c, ideal_gate_choi()).matrix() - ChoiMatrix::identity().matrix()) < 1e-8);
    }
  }
}

TEST_CASE("gate channel matches the characteristic-function form") {
  const auto p = paper_gate();
  struct Case {
    double offset_hz, alpha_sq, phi, nbar;
  };
  for (const Case& c : {Case{-600, 2.0, 0.0, 0.0}, Case{-600, 2.0, std::numbers::pi / 2, 0.0},
                        Case{1500, 0.47, 0.7, 0.12}, Case{-4000, 0.0, 0.0, 0.49}, Case{250, 1.3, 2.9, 1.5}}) {
    CAPTURE(c.offset_hz);
    CAPTURE(c.alpha_sq);
    const auto spec = ready(p, c.alpha_sq, c.phi, c.nbar, kTwoPi * c.offset_hz);
    const ChoiMatrix num = gate_channel(p, {kTwoPi * c.offset_hz}, spec);
    const CMatrix ref = analytic_choi(p, kTwoPi * c.offset_hz, std::polar(std::sqrt(c.alpha_sq), c.phi), c.nbar);
    CHECK(max_abs(num.matrix() - ref) < 1e-7);
    const CptpReport r = num.check_cptp();
    CHECK(r.ok);
  }
}

TEST_CASE("channel assembly equals direct propagation") {
  const auto p = paper_gate();
  const msgate::FrequencyOffset off{kTwoPi * -600.0};
  const auto spec = ready(p, 0.8, 1.1, 0.3, off.delta_nu);
  const auto raw = fock::motional_density_matrix(spec);
  const fock::MotionalDensityMatrix rho(raw.matrix() / raw.trace());
  const CMatrix u = msgate::propagator(p, off, spec.truncation());
  const ChoiMatrix c = channel_from_propagator(u, rho);

  std::mt19937_64 rng(17);
  for (int k = 0; k < 3; ++k) {
    const CMatrix in = random_hermitian(4, rng);
    CHECK(max_abs(c.apply(in) - propagate_directly(u, in, rho.matrix())) < 1e-12);
  }
  SUBCASE("linearity") {
    const CMatrix r1 = random_hermitian(4, rng);
    const CMatrix r2 = random_hermitian(4, rng);
    CHECK(max_abs(c.apply(r1 + r2) - c.apply(r1) - c.apply(r2)) < 1e-10);
    CHECK(max_abs(c.apply(2.5 * r1) - 2.5 * c.apply(r1)) < 1e-10);
  }
  CHECK_THROWS_AS(channel_from_propagator(u.topLeftCorner(8, 8), rho), DomainError);
}

TEST_CASE("gate channel matches the time-stepped propagator") {
  const auto p = paper_gate();
  const int n = 32;
  for (double off_hz : {0.0, -600.0, 3000.0}) {
    CAPTURE(off_hz);
    const msgate::FrequencyOffset off{kTwoPi * off_hz};
    const fock::MotionalSpec spec = fock::MotionalSpec::from_alpha_sq(0.5, 0.4, 0.2, n);
    const auto raw = fock::motional_density_matrix(spec);
    const fock::MotionalDensityMatrix rho(raw.matrix() / raw.trace());
    const ChoiMatrix exact = gate_channel(p, off, spec);
    const ChoiMatrix brute = channel_from_propagator(msgate::brute_force_propagator(p, off, n, 4096), rho);
    CHECK(max_abs(exact.matrix() - brute.matrix()) < 1e-6);
  }
}

TEST_CASE("phase shift by pi leaves the metrics unchanged") {
  const auto p = paper_gate();
  const double off = kTwoPi * -600.0;
  for (double phi : {0.0, 0.6, std::numbers::pi / 2}) {
    const ChoiMatrix a = gate_channel(p, {off}, ready(p, 2.0, phi, 0.1, off));
    const ChoiMatrix b = gate_channel(p, {off}, ready(p, 2.0, phi + std::numbers::pi, 0.1, off));
    const double ia = metrics::process_infidelity(a, ideal_gate_choi());
    const double ib = metrics::process_infidelity(b, ideal_gate_choi());
    CHECK(std::abs(ia - ib) < 1e-9);
    CHECK(std::abs(metrics::diamond_distance(a, ideal_gate_choi()) -
                   metrics::diamond_distance(b, ideal_gate_choi())) < 1e-7);
  }
}

TEST_CASE("error channel preserves the infidelity") {
  const auto p = paper_gate();
  const double off = kTwoPi * 900.0;
  const ChoiMatrix c = gate_channel(p, {off}, ready(p, 1.0, 0.0, 0.2, off));
  const ChoiMatrix e = error_channel(c, ideal_gate_choi());
  CHECK(e.check_cptp().ok);
  CHECK(std::abs(metrics::process_infidelity(c, ideal_gate_choi()) -
                 metrics::process_infidelity(e, ChoiMatrix::identity())) < 1e-14);
}

TEST_CASE("mixtures") {
  const auto p = paper_gate();
  const double o1 = kTwoPi * -600.0, o2 = kTwoPi * 1200.0;
  const auto spec = gate_ready_spec(p, 1.0, 0.5, 0.1, std::vector<msgate::FrequencyOffset>{{o1}, {o2}});
  const ChoiMatrix c1 = gate_channel(p, {o1}, spec);
  const ChoiMatrix c2 = gate_channel(p, {o2}, spec);

  const std::vector<std::pair<double, ChoiMatrix>> single{{1.0, c1}};
  CHECK(max_abs(mix_channels(single).matrix() - c1.matrix()) == 0.0);
  const std::vector<std::pair<double, ChoiMatrix>> self{{0.3, c1}, {0.7, c1}};
  CHECK(max_abs(mix_channels(self).matrix() - c1.matrix()) < 1e-15);

  // The mixture acts on every basis operator as the average of the outputs.
  const double w = 0.35;
  const std::vector<std::pair<double, ChoiMatrix>> two{{w, c1}, {1 - w, c2}};
  const ChoiMatrix mix = mix_channels(two);
  CHECK(mix.check_cptp().ok);
  const auto raw = fock::motional_density_matrix(spec);
  const CMatrix rho = raw.matrix() / raw.trace();
  const CMatrix u1 = msgate::propagator(p, {o1}, spec.truncation());
  const CMatrix u2 = msgate::propagator(p, {o2}, spec.truncation());
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      CMatrix in = CMatrix::Zero(4, 4);
      in(a, b) = 1.0;
      const CMatrix direct = w * propagate_directly(u1, in, rho) + (1 - w) * propagate_directly(u2, in, rho);
      CHECK(max_abs(mix.apply(in) - direct) < 1e-12);
    }
  }

  const std::vector<std::pair<double, ChoiMatrix>> bad_sum{{0.5, c1}, {0.4, c2}};
  CHECK_THROWS_AS(mix_channels(bad_sum), DomainError);
  const std::vector<std::pair<double, ChoiMatrix>> negative{{1.5, c1}, {-0.5, c2}};
  CHECK_THROWS_AS(mix_channels(negative), DomainError);
  CHECK_THROWS_AS(mix_channels(std::vector<std::pair<double, ChoiMatrix>>{}), DomainError);
}

TEST_CASE("gate-ready truncation grows with the offset") {
  const auto p = paper_gate();
  const auto near = ready(p, 0.0, 0.0, 0.0, kTwoPi * 100.0);
  const auto far = ready(p, 0.0, 0.0, 0.0, kTwoPi * 15000.0);
  CHECK(far.truncation() >= near.truncation());
  CHECK(near.truncation() >= fock::kMinTruncation);
}
