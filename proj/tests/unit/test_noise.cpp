#include <cmath>
#include <numbers>

#include "doctest.h"
#include "iongate/error.hpp"
#include "iongate/metrics.hpp"
#include "iongate/noise.hpp"
#include "iongate/quadrature.hpp"

using namespace iongate;
using namespace iongate::noise;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2;

msgate::GateParams reference_gate() { return msgate::calibrate_gate(2, 60e-6, kTwoPi * 3e6); }

fock::MotionalSpec state(double alpha_sq, double phi, double nbar) {
  return fock::MotionalSpec::from_alpha_sq(alpha_sq, phi, nbar, fock::kMinTruncation);
}

NoiseModel gaussian(double sigma_hz, int order = 31) {
  NoiseModel m;
  m.sigma = kTwoPi * sigma_hz;
  m.quadrature_order = order;
  return m;
}

std::vector<msgate::FrequencyOffset> offsets_hz(std::initializer_list<double> hz) {
  std::vector<msgate::FrequencyOffset> out;
  for (double h : hz) out.push_back({kTwoPi * h});
  return out;
}

}  // namespace

TEST_CASE("drift sweep") {
  const auto p = reference_gate();

  SUBCASE("perfect gate") {
    const auto rows = drift_sweep(p, state(0.0, 0.0, 0.0), offsets_hz({0.0}));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].report.infidelity < 1e-8);
    CHECK(rows[0].report.diamond_distance < 1e-6);
    CHECK(rows[0].report.metadata.at("delta_nu_hz") == 0.0);
  }

  SUBCASE("no displacement: phase is irrelevant") {
    const auto offs = offsets_hz({-2000.0, 700.0});
    const auto a = drift_sweep(p, state(0.0, 0.0, 0.2), offs);
    const auto b = drift_sweep(p, state(0.0, kHalfPi, 0.2), offs);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(std::abs(a[k].report.infidelity - b[k].report.infidelity) < 1e-12);
      CHECK(std::abs(a[k].report.diamond_distance - b[k].report.diamond_distance) < 1e-8);
    }
  }

  SUBCASE("error grows with the offset up to 3 kHz") {
    for (double a2 : {0.0, 2.0}) {
      for (double sign : {-1.0, 1.0}) {
        CAPTURE(a2);
        CAPTURE(sign);
        std::vector<msgate::FrequencyOffset> offs;
        for (int k = 0; k <= 6; ++k) offs.push_back({sign * kTwoPi * 500.0 * k});
        const auto rows = drift_sweep(p, state(a2, 0.0, 0.0), offs);
        for (std::size_t k = 1; k < rows.size(); ++k) {
          CHECK(rows[k].report.infidelity > rows[k - 1].report.infidelity);
          CHECK(rows[k].report.diamond_distance > rows[k - 1].report.diamond_distance);
        }
      }
    }
  }

  SUBCASE("metadata and empty input") {
    const auto rows = drift_sweep(p, state(0.5, 0.25, 0.1), offsets_hz({300.0}));
    const auto& md = rows[0].report.metadata;
    CHECK(md.at("delta_nu_hz") == doctest::Approx(300.0));
    CHECK(md.at("alpha_sq") == doctest::Approx(0.5));
    CHECK(md.at("phi_rad") == doctest::Approx(0.25));
    CHECK(md.at("nbar") == doctest::Approx(0.1));
    CHECK(md.at("truncation") >= fock::kMinTruncation);
    CHECK(drift_sweep(p, state(0.5, 0.0, 0.1), {}).empty());
  }
}

TEST_CASE("Gaussian averaging") {
  const auto p = reference_gate();

  SUBCASE("zero width reduces to the drift at the centre") {
    for (double centre_hz : {0.0, -600.0}) {
      NoiseModel m;
      m.center = kTwoPi * centre_hz;
      const auto avg = averaged_gate_error(p, state(1.0, 0.3, 0.1), m);
      const auto drift = drift_sweep(p, state(1.0, 0.3, 0.1), offsets_hz({centre_hz}));
      CHECK(std::abs(avg.infidelity - drift[0].report.infidelity) < 1e-12);
      CHECK(std::abs(avg.diamond_distance - drift[0].report.diamond_distance) < 1e-8);
      CHECK(avg.metadata.at("quadrature_nodes") == 1.0);
    }
  }

  SUBCASE("channel averaging equals fidelity averaging") {
    const NoiseModel m = gaussian(600.0);
    const auto spec = state(2.0, 0.0, 0.0);
    const auto avg = averaged_gate_error(p, spec, m);

    const quadrature::Rule rule = quadrature::normal_rule(m.sigma, m.quadrature_order);
    std::vector<msgate::FrequencyOffset> offs;
    for (double x : rule.nodes) offs.push_back({x});
    const auto ready = channel::gate_ready_spec(p, spec.alpha_mag(), spec.phi(), spec.nbar_th(), offs);
    double mean_infidelity = 0.0;
    for (std::size_t k = 0; k < offs.size(); ++k) {
      const auto c = channel::gate_channel(p, offs[k], ready);
      mean_infidelity += rule.weights[k] * metrics::process_infidelity(c, channel::ideal_gate_choi());
    }
    CHECK(std::abs(avg.infidelity - mean_infidelity) < 1e-10);
  }

  SUBCASE("quadrature order 31 is converged") {
    const auto spec = state(2.0, 0.0, 0.0);
    for (double sigma_hz : {200.0, 600.0, 1000.0}) {
      CAPTURE(sigma_hz);
      AverageOptions opt;
      opt.check_convergence = true;
      const auto r31 = averaged_gate_error(p, spec, gaussian(sigma_hz, 31), opt);
      CHECK(r31.metadata.at("quadrature_shift") < 0.01);
      CHECK(r31.warnings.empty());
      const auto r63 = averaged_gate_error(p, spec, gaussian(sigma_hz, 63));
      CHECK(std::abs(r31.infidelity - r63.infidelity) < 0.01 * r63.infidelity);
    }
  }

  SUBCASE("averaging a pi-shifted state gives the same metrics") {
    const NoiseModel m = gaussian(600.0);
    for (double phi : {0.0, 1.0}) {
      const auto a = averaged_gate_error(p, state(0.8, phi, 0.3), m);
      const auto b = averaged_gate_error(p, state(0.8, phi + std::numbers::pi, 0.3), m);
      CHECK(std::abs(a.infidelity - b.infidelity) < 1e-9);
      CHECK(std::abs(a.diamond_distance - b.diamond_distance) < 1e-7);
    }
  }

  SUBCASE("averaged channel is CPTP") {
    const auto c = averaged_channel(p, state(2.0, kHalfPi, 0.5), gaussian(600.0));
    CHECK(c.check_cptp().ok);
  }

  SUBCASE("invalid models") {
    NoiseModel m;
    m.sigma = -1.0;
    CHECK_THROWS_AS(averaged_gate_error(p, state(0.0, 0.0, 0.0), m), DomainError);
    m.sigma = 1.0;
    m.quadrature_order = 0;
    CHECK_THROWS_AS(averaged_gate_error(p, state(0.0, 0.0, 0.0), m), DomainError);
  }
}

TEST_CASE("phase dependence") {
  const auto p = reference_gate();
  const NoiseModel m = gaussian(600.0);

  SUBCASE("flat without displacement") {
    const std::vector<double> phis{0.0, 0.7, kHalfPi, 2.5};
    const auto rows = phase_scan(p, state(0.0, 0.0, 0.3), m, phis);
    REQUIRE(rows.size() == phis.size());
    for (const auto& r : rows) {
      CHECK(std::abs(r.report.infidelity - rows[0].report.infidelity) < 1e-12);
      CHECK(r.report.metadata.at("phi_rad") == doctest::Approx(r.phi));
    }
    const PhaseOptimum opt = optimize_phase(p, state(0.0, 0.0, 0.3), m, Objective::kInfidelity);
    CHECK(opt.flat);
    CHECK_FALSE(opt.report.warnings.empty());
  }

  SUBCASE("infidelity minimum at pi/2") {
    const PhaseOptimum opt = optimize_phase(p, state(2.0, 0.0, 0.0), m, Objective::kInfidelity);
    CHECK_FALSE(opt.flat);
    CHECK(std::abs(opt.phi - kHalfPi) < 0.02);
    CHECK(opt.scan.size() == 64);
    for (const auto& row : opt.scan) CHECK(opt.report.infidelity <= row.report.infidelity + 1e-12);
  }

  SUBCASE("diamond objective") {
    const PhaseOptimum opt = optimize_phase(p, state(2.0, 0.0, 0.0), m, Objective::kDiamond);
    CHECK(opt.phi >= 0.0);
    CHECK(opt.phi < std::numbers::pi);
    for (const auto& row : opt.scan) CHECK(opt.report.diamond_distance <= row.report.diamond_distance + 1e-9);
  }
}

TEST_CASE("error surface") {
  const auto p = reference_gate();
  const NoiseModel m = gaussian(600.0);
  const std::vector<double> a2{0.0, 1.0, 2.0};
  const std::vector<double> nb{0.0, 1.0, 2.0};
  for (double phi : {0.0, kHalfPi}) {
    CAPTURE(phi);
    const Surface s = error_surface(p, m, a2, nb, phi);
    REQUIRE(s.cells.size() == 9);
    CHECK(s.at(2, 1).alpha_sq == 2.0);
    CHECK(s.at(2, 1).nbar == 1.0);
    CHECK(s.at(1, 1).half_diamond() == doctest::Approx(0.5 * s.at(1, 1).report.diamond_distance));
    for (std::size_t i = 0; i < a2.size(); ++i) {
      for (std::size_t j = 0; j < nb.size(); ++j) {
        if (i > 0) {
          CHECK(s.at(i, j).report.infidelity >= s.at(i - 1, j).report.infidelity - 1e-6);
          CHECK(s.at(i, j).report.diamond_distance >= s.at(i - 1, j).report.diamond_distance - 1e-6);
        }
        if (j > 0) {
          CHECK(s.at(i, j).report.infidelity >= s.at(i, j - 1).report.infidelity - 1e-6);
          CHECK(s.at(i, j).report.diamond_distance >= s.at(i, j - 1).report.diamond_distance - 1e-6);
        }
      }
    }
  }

  SUBCASE("gradient direction depends on the phase") {
    // Finite differences about (0.5, 0.5): equal steps change <n> by the same amount.
    const std::vector<double> a{0.5, 0.6};
    const std::vector<double> n{0.5, 0.6};
    const Surface s0 = error_surface(p, m, a, n, 0.0);
    const Surface s1 = error_surface(p, m, a, n, kHalfPi);
    auto grads = [](const Surface& s) {
      const double base = s.at(0, 0).report.infidelity;
      return std::pair{s.at(1, 0).report.infidelity - base, s.at(0, 1).report.infidelity - base};
    };
    const auto [ga0, gn0] = grads(s0);
    const auto [ga1, gn1] = grads(s1);
    CHECK(ga0 > gn0);
    CHECK(gn1 > ga1);
  }
}
