#include "iongate/noise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "iongate/error.hpp"
#include "iongate/metrics.hpp"
#include "iongate/quadrature.hpp"

namespace iongate::noise {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void annotate(channel::ErrorReport& r, const fock::MotionalSpec& spec, int truncation) {
  r.metadata["alpha_sq"] = spec.alpha_sq();
  r.metadata["phi_rad"] = spec.phi();
  r.metadata["nbar"] = spec.nbar_th();
  r.metadata["truncation"] = truncation;
}

fock::MotionalDensityMatrix normalized_state(const fock::MotionalSpec& spec, double leakage) {
  const fock::MotionalDensityMatrix raw = fock::motional_density_matrix(spec, leakage);
  return fock::MotionalDensityMatrix(raw.matrix() / raw.trace());
}

// Propagators at the quadrature nodes for one (|alpha|, nbar); the phase only
// enters through the motional state, so scans over phi reuse them.
class AveragedGate {
 public:
  AveragedGate(const msgate::GateParams& params, const fock::MotionalSpec& spec,
               const NoiseModel& model, int order, double leakage)
      : leakage_(leakage) {
    model.validate();
    const quadrature::Rule rule = quadrature::normal_rule(model.sigma, order);
    std::vector<msgate::FrequencyOffset> offsets;
    for (double x : rule.nodes) offsets.push_back({model.center + x});
    const fock::MotionalSpec ready =
        channel::gate_ready_spec(params, spec.alpha_mag(), spec.phi(), spec.nbar_th(), offsets, leakage);
    spec_ = ready.with_truncation(std::max(ready.truncation(), spec.truncation()));
    const int needed = fock::populated_dim(normalized_state(spec_, leakage), leakage);
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      nodes_.push_back({rule.weights[k],
                        msgate::propagator(params, offsets[k], spec_.truncation(), needed, leakage)});
    }
    sigma_ = model.sigma;
  }

  int truncation() const { return spec_.truncation(); }
  std::size_t node_count() const { return nodes_.size(); }

  channel::ChoiMatrix channel(double phi) const {
    const fock::MotionalDensityMatrix rho = normalized_state(spec_.with_phi(phi), leakage_);
    std::vector<std::pair<double, channel::ChoiMatrix>> parts;
    parts.reserve(nodes_.size());
    for (const auto& [w, u] : nodes_) parts.emplace_back(w, channel::channel_from_propagator(u, rho));
    return channel::mix_channels(parts);
  }

  double infidelity(double phi) const {
    return metrics::process_infidelity(channel(phi), channel::ideal_gate_choi());
  }

  channel::ErrorReport report(double phi) const {
    channel::ErrorReport r = metrics::evaluate(channel(phi), channel::ideal_gate_choi());
    annotate(r, spec_.with_phi(phi), truncation());
    r.metadata["sigma_hz"] = sigma_ / kTwoPi;
    r.metadata["quadrature_nodes"] = static_cast<double>(node_count());
    return r;
  }

 private:
  double leakage_;
  double sigma_ = 0.0;
  fock::MotionalSpec spec_;
  std::vector<std::pair<double, CMatrix>> nodes_;
};

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double reduce_half_period(double phi) {
  double r = std::fmod(phi, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  return r;
}

}  // namespace

void NoiseModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("noise width must be >= 0");
  if (quadrature_order < 1) throw DomainError("quadrature order must be >= 1");
}

std::vector<SweepRow> drift_sweep(const msgate::GateParams& params, const fock::MotionalSpec& spec,
                                  std::span<const msgate::FrequencyOffset> offsets, double leakage) {
  std::vector<SweepRow> rows;
  if (offsets.empty()) return rows;
  const fock::MotionalSpec ready =
      channel::gate_ready_spec(params, spec.alpha_mag(), spec.phi(), spec.nbar_th(), offsets, leakage);
  const fock::MotionalSpec use = ready.with_truncation(std::max(ready.truncation(), spec.truncation()));
  const channel::ChoiMatrix ideal = channel::ideal_gate_choi();
  for (const auto& off : offsets) {
    SweepRow row;
    row.delta_nu = off.delta_nu;
    row.report = metrics::evaluate(channel::gate_channel(params, off, use, leakage), ideal);
    annotate(row.report, use, use.truncation());
    row.report.metadata["delta_nu_hz"] = off.delta_nu / kTwoPi;
    rows.push_back(std::move(row));
  }
  return rows;
}

channel::ChoiMatrix averaged_channel(const msgate::GateParams& params,
                                     const fock::MotionalSpec& spec, const NoiseModel& model,
                                     double leakage) {
  return AveragedGate(params, spec, model, model.quadrature_order, leakage).channel(spec.phi());
}

channel::ErrorReport averaged_gate_error(const msgate::GateParams& params,
                                         const fock::MotionalSpec& spec, const NoiseModel& model,
                                         const AverageOptions& options) {
  const AveragedGate gate(params, spec, model, model.quadrature_order, options.leakage);
  channel::ErrorReport r = gate.report(spec.phi());
  if (options.check_convergence && model.sigma > 0.0) {
    const AveragedGate fine(params, spec, model, 2 * model.quadrature_order + 1, options.leakage);
    const double i_fine = fine.infidelity(spec.phi());
    const double shift = std::abs(i_fine - r.infidelity) / std::max(std::abs(i_fine), 1e-300);
    r.metadata["quadrature_shift"] = shift;
    if (shift > 0.01) {
      r.warnings.push_back("quadrature unconverged: order " +
                           std::to_string(2 * model.quadrature_order + 1) + " moves I by " +
                           std::to_string(100.0 * shift) + "%");
    }
  }
  return r;
}

std::vector<PhaseRow> phase_scan(const msgate::GateParams& params, const fock::MotionalSpec& spec,
                                 const NoiseModel& model, std::span<const double> phis,
                                 double leakage) {
  std::vector<PhaseRow> rows;
  if (phis.empty()) return rows;
  const AveragedGate gate(params, spec, model, model.quadrature_order, leakage);
  for (double phi : phis) rows.push_back({phi, gate.report(phi)});
  return rows;
}

PhaseOptimum optimize_phase(const msgate::GateParams& params, const fock::MotionalSpec& spec,
                            const NoiseModel& model, Objective objective, double leakage) {
  const AveragedGate gate(params, spec, model, model.quadrature_order, leakage);
  PhaseOptimum out;
  if (spec.alpha_sq() < 1e-6) {
    out.flat = true;
    out.phi = 0.0;
    out.report = gate.report(0.0);
    out.report.warnings.push_back("flat landscape: no coherent displacement, any phase is optimal");
    out.scan.push_back({0.0, out.report});
    return out;
  }

  auto value = [&](const channel::ErrorReport& r) {
    return objective == Objective::kInfidelity ? r.infidelity : r.diamond_distance;
  };
  constexpr int kScan = 64;
  std::size_t best = 0;
  for (int k = 0; k < kScan; ++k) {
    const double phi = std::numbers::pi * k / kScan;
    out.scan.push_back({phi, gate.report(phi)});
    if (value(out.scan.back().report) < value(out.scan[best].report)) best = out.scan.size() - 1;
  }
  const double step = std::numbers::pi / kScan;
  auto f = [&](double phi) {
    return objective == Objective::kInfidelity ? gate.infidelity(phi) : gate.report(phi).diamond_distance;
  };
  const double center = out.scan[best].phi;
  const double refined = golden_section(f, center - step, center + step, 1e-3);
  out.phi = reduce_half_period(refined);
  out.report = gate.report(out.phi);
  if (value(out.scan[best].report) < value(out.report)) {
    out.phi = out.scan[best].phi;
    out.report = out.scan[best].report;
  }
  return out;
}

Surface error_surface(const msgate::GateParams& params, const NoiseModel& model,
                      std::span<const double> alpha_sq, std::span<const double> nbar, double phi,
                      double leakage) {
  Surface s;
  s.alpha_sq.assign(alpha_sq.begin(), alpha_sq.end());
  s.nbar.assign(nbar.begin(), nbar.end());
  s.phi = phi;
  for (double a : alpha_sq) {
    for (double n : nbar) {
      const fock::MotionalSpec spec = fock::MotionalSpec::from_alpha_sq(a, phi, n, 1);
      const AveragedGate gate(params, spec, model, model.quadrature_order, leakage);
      s.cells.push_back({a, n, gate.report(phi)});
    }
  }
  return s;
}

}  // namespace iongate::noise
