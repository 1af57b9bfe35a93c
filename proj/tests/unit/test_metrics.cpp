#include <cmath>
#include <random>

#include "doctest.h"
#include "iongate/channel.hpp"
#include "iongate/error.hpp"
#include "iongate/metrics.hpp"

using namespace iongate;
using namespace iongate::metrics;

namespace {

CMatrix random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

CMatrix random_unitary(int d, std::mt19937_64& rng) {
  return Eigen::HouseholderQR<CMatrix>(random_gaussian(d, d, rng)).householderQ();
}

// Choi matrix (input factor first) of the channel with Kraus operators taken
// from a random Stinespring isometry.
CMatrix random_channel_choi(int d, int kraus, std::mt19937_64& rng) {
  const CMatrix v = Eigen::HouseholderQR<CMatrix>(random_gaussian(d * kraus, d, rng)).householderQ() *
                    CMatrix::Identity(d * kraus, d);
  CMatrix j = CMatrix::Zero(d * d, d * d);
  for (int k = 0; k < kraus; ++k) {
    const CMatrix op = v.middleRows(k * d, d);
    CVector vec(d * d);
    for (int p = 0; p < d; ++p) vec.segment(p * d, d) = op.col(p);
    j += vec * vec.adjoint();
  }
  return j;
}

CMatrix unitary_choi(const CMatrix& u) {
  const int d = static_cast<int>(u.rows());
  CVector vec(d * d);
  for (int p = 0; p < d; ++p) vec.segment(p * d, d) = u.col(p);
  return vec * vec.adjoint();
}

double trace_norm(const CMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(0.5 * (m + m.adjoint())).eigenvalues().cwiseAbs().sum();
}

// Output of (id (x) Phi) on the purification sum_p A|p> (x) |p>.
CMatrix extended_output(const CMatrix& j, const CMatrix& a, int dout) {
  const CMatrix big = kron(a, CMatrix::Identity(dout, dout));
  return big * j * big.adjoint();
}

}  // namespace

TEST_CASE("entanglement fidelity") {
  CHECK(entanglement_fidelity(channel::ChoiMatrix::identity()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(process_infidelity(channel::ideal_gate_choi(), channel::ideal_gate_choi()) < 1e-14);

  // Single-qubit-like phase error on the first ion: F_e = |Tr V|^2 / 16.
  const double theta = 0.3;
  CMatrix v = CMatrix::Identity(4, 4);
  v(2, 2) = v(3, 3) = std::exp(Complex(0.0, theta));
  const auto c = channel::ChoiMatrix::from_unitary(v);
  CHECK(entanglement_fidelity(c) == doctest::Approx(std::norm(v.trace()) / 16.0).epsilon(1e-13));

  // Fully depolarizing channel: F_e = 1/16.
  const auto dep = channel::ChoiMatrix(CMatrix::Identity(16, 16) / 4.0);
  CHECK(entanglement_fidelity(dep) == doctest::Approx(1.0 / 16.0).epsilon(1e-13));
}

TEST_CASE("single-qubit rotations") {
  for (double theta : {0.1, 0.5, 1.0}) {
    CAPTURE(theta);
    CMatrix u = CMatrix::Zero(2, 2);
    u(0, 0) = std::exp(Complex(0.0, -theta / 2));
    u(1, 1) = std::exp(Complex(0.0, theta / 2));
    const DiamondResult r = diamond_norm(unitary_choi(u) - unitary_choi(CMatrix::Identity(2, 2)), 2, 2);
    CHECK(std::abs(r.norm - 2.0 * std::sin(theta / 2)) < 1e-5);
    CHECK(r.gap < 1e-6);
  }
}

TEST_CASE("depolarizing channel") {
  // ||Dep_p - id||_diamond = 2 p (d^2 - 1) / d^2 for Dep_p(r) = (1-p) r + p Tr(r) 1/d.
  for (int d : {2, 4}) {
    const double p = 0.07;
    const CMatrix id = unitary_choi(CMatrix::Identity(d, d));
    const CMatrix dep = (1 - p) * id + p * CMatrix::Identity(d * d, d * d) / static_cast<double>(d);
    const double expect = 2.0 * p * (d * d - 1.0) / (d * d);
    CHECK(std::abs(diamond_norm(dep - id, d, d).norm - expect) < 1e-7);
  }
}

TEST_CASE("zero map") {
  CHECK(diamond_norm(CMatrix::Zero(16, 16), 4, 4).norm < 1e-8);
  CHECK(diamond_distance(channel::ideal_gate_choi(), channel::ideal_gate_choi()) < 1e-8);
}

TEST_CASE("random channel pairs respect the trace-norm bounds") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 4; ++trial) {
    const CMatrix a = random_channel_choi(4, 1 + trial, rng);
    const CMatrix b = random_channel_choi(4, 3, rng);
    const CMatrix diff = a - b;
    const double norm = diamond_norm(diff, 4, 4).norm;
    // Maximally entangled input and Choi trace norm bracket the diamond norm.
    CHECK(norm >= trace_norm(diff) / 4.0 - 1e-8);
    CHECK(norm <= trace_norm(diff) + 1e-8);
    CHECK(norm <= 2.0 + 1e-8);
    for (int k = 0; k < 20; ++k) {
      CMatrix in = random_gaussian(4, 4, rng);
      in /= in.norm();
      CHECK(trace_norm(extended_output(diff, in, 4)) <= norm + 1e-7);
    }
  }
}

TEST_CASE("unitary invariance") {
  std::mt19937_64 rng(11);
  const CMatrix diff = random_channel_choi(4, 2, rng) - random_channel_choi(4, 2, rng);
  const double base = diamond_norm(diff, 4, 4).norm;
  const CMatrix v = random_unitary(4, rng);
  const CMatrix w = random_unitary(4, rng);
  // Post-compose with V and pre-compose with W.
  const CMatrix post = kron(CMatrix::Identity(4, 4), v);
  const CMatrix pre = kron(w.transpose(), CMatrix::Identity(4, 4));
  const CMatrix moved = pre * post * diff * post.adjoint() * pre.adjoint();
  CHECK(std::abs(diamond_norm(moved, 4, 4).norm - base) < 1e-8);
}

TEST_CASE("joint convexity and the fidelity bound") {
  std::mt19937_64 rng(5);
  const channel::ChoiMatrix ideal = channel::ideal_gate_choi();
  for (int trial = 0; trial < 3; ++trial) {
    const CMatrix noise1 = random_channel_choi(4, 2, rng);
    const CMatrix noise2 = random_channel_choi(4, 3, rng);
    // Mostly-ideal channels so the regime resembles gate errors.
    const channel::ChoiMatrix e1(0.9 * ideal.matrix() + 0.1 * noise1);
    const channel::ChoiMatrix e2(0.95 * ideal.matrix() + 0.05 * noise2);
    const double lambda = 0.3;
    const channel::ChoiMatrix mix(lambda * e1.matrix() + (1 - lambda) * e2.matrix());
    const double d1 = diamond_distance(e1, ideal);
    const double d2 = diamond_distance(e2, ideal);
    CHECK(diamond_distance(mix, ideal) <= lambda * d1 + (1 - lambda) * d2 + 1e-8);
    for (const auto* e : {&e1, &e2, &mix}) {
      const double inf = process_infidelity(*e, ideal);
      CHECK(diamond_distance(*e, ideal) >= 2.0 * inf - 1e-8);
    }
  }
}

TEST_CASE("evaluate fills the report") {
  CMatrix ph = CMatrix::Identity(4, 4);
  ph(0, 0) = std::exp(Complex(0.0, 0.2));
  const auto actual = channel::ChoiMatrix::from_unitary(ph * channel::unitary_from_choi(channel::ideal_gate_choi()));
  const channel::ErrorReport r = evaluate(actual, channel::ideal_gate_choi());
  CHECK(r.infidelity == doctest::Approx(1.0 - std::norm(ph.trace()) / 16.0).epsilon(1e-12));
  CHECK(r.metadata.at("diamond_scale") == kDiamondScale);
  CHECK(r.metadata.at("diamond_raw") * kDiamondScale == doctest::Approx(r.diamond_distance));
  CHECK(r.metadata.at("sdp_iterations") > 0);
  CHECK(r.metadata.count("sdp_gap") == 1);
}

TEST_CASE("problem shape") {
  const sdp::Problem p = diamond_norm_problem(CMatrix::Zero(16, 16), 4, 4);
  CHECK(p.block_dims == std::vector<int>{16, 16, 4});
  CHECK(p.constraints.size() == 257);
}
