#include "iongate/sideband.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "iongate/error.hpp"

namespace iongate::sideband {

namespace {

double log_binomial(int k, int m, double p) {
  p = std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
  return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) + k * std::log(p) +
         (m - k) * std::log1p(-p);
}

// Rows: states, cols: Fock levels, each row normalized to unit sum.
Eigen::MatrixXd population_table(const std::vector<MotionState>& states, double leakage) {
  std::vector<RVector> pops;
  Eigen::Index width = 0;
  for (const auto& s : states) {
    pops.push_back(population_distribution(s, leakage));
    width = std::max(width, pops.back().size());
  }
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states.size()), width);
  for (std::size_t k = 0; k < pops.size(); ++k) {
    table.row(static_cast<Eigen::Index>(k)).head(pops[k].size()) = pops[k].transpose() / pops[k].sum();
  }
  return table;
}

// K(t, n) = cos(2 omega sqrt(n+1) t) exp(-gamma0 (n+1) t)
Eigen::MatrixXd flop_kernel(const RabiModel& m, const RabiDataset& d, Eigen::Index levels) {
  Eigen::MatrixXd k(static_cast<Eigen::Index>(d.points.size()), levels);
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    const double t = d.points[i].time;
    for (Eigen::Index n = 0; n < levels; ++n) {
      k(i, n) = std::cos(2.0 * m.omega_sb * std::sqrt(n + 1.0) * t) * std::exp(-m.gamma0 * (n + 1.0) * t);
    }
  }
  return k;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  if (n == 1 || lo == hi) return {std::sqrt(lo * hi)};
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

struct LatticePoint {
  double value = -std::numeric_limits<double>::infinity();
  int omega_index = 0;
  RabiModel model;
  std::vector<MotionState> states;
};

// Joint likelihood on a fixed lattice. The per-dataset terms separate once the
// shared rates are fixed, so each dataset picks its best state independently.
std::vector<LatticePoint> scan_lattice(const std::vector<RabiDataset>& data, const SearchBox& box,
                                       double leakage) {
  std::vector<MotionState> grid;
  const std::vector<double> levels{0.0, 0.1, 0.25, 0.5, 0.8, 1.2, 1.8, 2.5};
  for (double a : levels) {
    if (a > box.alpha_sq_hi) continue;
    for (double n : levels) {
      if (n <= box.nbar_hi) grid.push_back({a, n});
    }
  }
  const Eigen::MatrixXd pops = population_table(grid, leakage);

  // Binomial coefficient terms are constant across the lattice.
  const int n_omega = std::max(2, static_cast<int>(std::ceil(std::log(box.omega_hi / box.omega_lo) / 0.015)));
  const std::vector<double> omegas = log_spaced(box.omega_lo, box.omega_hi, n_omega);
  const std::vector<double> gammas = log_spaced(box.gamma_lo, box.gamma_hi, 5);

  std::vector<LatticePoint> out;
  for (std::size_t io = 0; io < omegas.size(); ++io) {
    for (double g : gammas) {
      LatticePoint lp;
      lp.model = {omegas[io], g};
      lp.omega_index = static_cast<int>(io);
      lp.value = 0.0;
      for (const auto& d : data) {
        if (d.points.empty()) {
          lp.states.push_back(grid.front());
          continue;
        }
        const Eigen::MatrixXd k = flop_kernel(lp.model, d, pops.cols());
        const Eigen::MatrixXd pe = 0.5 * (1.0 - (pops * k.transpose()).array()).matrix();
        double best = -std::numeric_limits<double>::infinity();
        Eigen::Index best_state = 0;
        for (Eigen::Index s = 0; s < pe.rows(); ++s) {
          double v = 0.0;
          for (Eigen::Index i = 0; i < pe.cols(); ++i) {
            const double p = std::clamp(pe(s, i), kProbabilityFloor, 1.0 - kProbabilityFloor);
            const auto& pt = d.points[i];
            v += pt.excited * std::log(p) + (pt.shots - pt.excited) * std::log1p(-p);
          }
          if (v > best) {
            best = v;
            best_state = s;
          }
        }
        lp.value += best;
        lp.states.push_back(grid[best_state]);
      }
      out.push_back(std::move(lp));
    }
  }
  return out;
}

std::vector<LatticePoint> pick_starts(std::vector<LatticePoint> lattice, int count) {
  std::stable_sort(lattice.begin(), lattice.end(),
                   [](const LatticePoint& a, const LatticePoint& b) { return a.value > b.value; });
  std::vector<LatticePoint> starts;
  for (const auto& lp : lattice) {
    if (static_cast<int>(starts.size()) == count) break;
    const bool crowded = std::any_of(starts.begin(), starts.end(), [&](const LatticePoint& s) {
      return std::abs(s.omega_index - lp.omega_index) < 2;
    });
    if (!crowded) starts.push_back(lp);
  }
  return starts;
}

// Simplex coordinates: log rates, then sqrt of each per-dataset parameter.
struct Objective {
  const std::vector<RabiDataset>* data;
  const SearchBox* box;
  double leakage;
  int evaluations = 0;

  static RabiModel model(const gsl_vector* x) {
    return {std::exp(gsl_vector_get(x, 0)), std::exp(gsl_vector_get(x, 1))};
  }
  static std::vector<MotionState> states(const gsl_vector* x, std::size_t n) {
    std::vector<MotionState> s(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = gsl_vector_get(x, 2 + 2 * k);
      const double v = gsl_vector_get(x, 3 + 2 * k);
      s[k] = {u * u, v * v};
    }
    return s;
  }

  double operator()(const gsl_vector* x) {
    ++evaluations;
    const RabiModel m = model(x);
    const std::vector<MotionState> s = states(x, data->size());
    double excess = 0.0;
    excess += std::max(0.0, box->omega_lo - m.omega_sb) / box->omega_lo;
    excess += std::max(0.0, m.omega_sb - box->omega_hi) / box->omega_hi;
    excess += std::max(0.0, box->gamma_lo - m.gamma0) / box->gamma_lo;
    excess += std::max(0.0, m.gamma0 - box->gamma_hi) / box->gamma_hi;
    for (const auto& st : s) {
      excess += std::max(0.0, st.alpha_sq - box->alpha_sq_hi) + std::max(0.0, st.nbar - box->nbar_hi);
    }
    if (excess > 0.0) return 1e30 * (1.0 + excess);
    return -log_likelihood(m, s, *data, leakage);
  }

  double log_likelihood(const RabiModel& m, const std::vector<MotionState>& s,
                        const std::vector<RabiDataset>& d, double leak) const {
    double total = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      total += dataset_log_likelihood(m, population_distribution(s[k], leak), d[k]);
    }
    return total;
  }
};

double objective_trampoline(const gsl_vector* x, void* params) {
  return (*static_cast<Objective*>(params))(x);
}

struct SimplexRun {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

SimplexRun run_simplex(Objective& obj, const std::vector<double>& x0, const std::vector<double>& steps,
                       const FitOptions& opt) {
  const std::size_t n = x0.size();
  gsl_multimin_function f{&objective_trampoline, n, &obj};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x, i, x0[i]);
    gsl_vector_set(ss, i, steps[i]);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  gsl_multimin_fminimizer_set(s, &f, x, ss);
  SimplexRun run;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opt.simplex_tolerance) == GSL_SUCCESS) {
      run.converged = true;
      break;
    }
  }
  run.value = gsl_multimin_fminimizer_minimum(s);
  for (std::size_t i = 0; i < n; ++i) run.x.push_back(gsl_vector_get(s->x, i));
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(ss);
  gsl_vector_free(x);
  return run;
}

struct GslQuiet {
  gsl_error_handler_t* old;
  GslQuiet() : old(gsl_set_error_handler_off()) {}
  ~GslQuiet() { gsl_set_error_handler(old); }
};

// Lower and upper end of the region {value >= level} along one axis, with
// linear interpolation between neighbouring cells; `edge_lo`/`edge_hi` record
// whether the region reaches the first/last grid line.
struct Extent {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool edge_lo = false, edge_hi = false;
  int cells = 0;
};

Extent region_extent(const Eigen::MatrixXd& v, const std::vector<double>& axis, double level,
                     bool along_rows) {
  Extent e;
  const Eigen::Index len = static_cast<Eigen::Index>(axis.size());
  const Eigen::Index other = along_rows ? v.cols() : v.rows();
  std::vector<bool> used(axis.size(), false);
  for (Eigen::Index o = 0; o < other; ++o) {
    auto at = [&](Eigen::Index i) { return along_rows ? v(i, o) : v(o, i); };
    for (Eigen::Index i = 0; i < len; ++i) {
      const bool in = at(i) >= level;
      if (in) {
        used[i] = true;
        e.lo = std::min(e.lo, axis[i]);
        e.hi = std::max(e.hi, axis[i]);
        if (i == 0) e.edge_lo = true;
        if (i == len - 1) e.edge_hi = true;
      }
      if (i + 1 < len && in != (at(i + 1) >= level)) {
        const double f = (level - at(i)) / (at(i + 1) - at(i));
        const double x = axis[i] + f * (axis[i + 1] - axis[i]);
        e.lo = std::min(e.lo, x);
        e.hi = std::max(e.hi, x);
      }
    }
  }
  e.cells = static_cast<int>(std::count(used.begin(), used.end(), true));
  return e;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace

void RabiDataset::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const RabiPoint& p = points[i];
    const std::string where = "dataset '" + label + "' point " + std::to_string(i + 1);
    if (!(p.time >= 0.0) || !std::isfinite(p.time)) throw DataError(where + ": time must be >= 0");
    if (p.shots <= 0) throw DataError(where + ": shots must be > 0");
    if (p.excited < 0 || p.excited > p.shots) throw DataError(where + ": excited count outside [0, shots]");
    if (i > 0 && !(p.time > points[i - 1].time)) throw DataError(where + ": times must be strictly increasing");
  }
}

void RabiModel::validate() const {
  if (!(omega_sb > 0.0) || !std::isfinite(omega_sb)) throw DomainError("sideband rate must be > 0");
  if (!(gamma0 >= 0.0) || !std::isfinite(gamma0)) throw DomainError("decoherence rate must be >= 0");
}

void SearchBox::validate() const {
  if (!(omega_lo > 0.0 && omega_hi >= omega_lo)) throw DomainError("bad sideband-rate bounds");
  if (!(gamma_lo > 0.0 && gamma_hi >= gamma_lo)) throw DomainError("bad decoherence-rate bounds");
  if (!(alpha_sq_hi > 0.0 && nbar_hi > 0.0)) throw DomainError("state bounds must be > 0");
}

RVector population_distribution(const fock::MotionalSpec& spec) {
  RVector p = fock::motional_density_matrix(spec).populations();
  return p.cwiseMax(0.0);
}

RVector population_distribution(const MotionState& state, double leakage) {
  if (!(state.alpha_sq >= 0.0) || !(state.nbar >= 0.0)) throw DomainError("state parameters must be >= 0");
  if (!(leakage > 0.0 && leakage < 1.0)) throw DomainError("leakage must lie in (0, 1)");
  // Displaced thermal state:
  // P_n = e^{-a/(1+nbar)}/(1+nbar) sum_k C(n,k) q^{n-k} r^k / k!,
  // q = nbar/(1+nbar), r = a/(1+nbar)^2.
  // Summed until the kept weight reaches 1 - leakage.
  const double a = state.alpha_sq, nb = state.nbar;
  const double ninf = -std::numeric_limits<double>::infinity();
  const double lq = nb > 0.0 ? std::log(nb / (1.0 + nb)) : ninf;
  const double lr = a > 0.0 ? std::log(a / ((1.0 + nb) * (1.0 + nb))) : ninf;
  const double lead = -a / (1.0 + nb) - std::log1p(nb);
  std::vector<double> lf{0.0};
  std::vector<double> p;
  double kept = 0.0;
  constexpr int kMaxLevels = 4000;
  for (int n = 0; n < kMaxLevels; ++n) {
    if (n > 0) lf.push_back(lf.back() + std::log(static_cast<double>(n)));
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double lq_part = n - k > 0 ? (n - k) * lq : 0.0;
      const double lr_part = k > 0 ? k * lr : 0.0;
      if (!std::isfinite(lq_part) || !std::isfinite(lr_part)) continue;
      s += std::exp(lf[n] - 2.0 * lf[k] - lf[n - k] + lq_part + lr_part + lead);
    }
    p.push_back(s);
    kept += s;
    if (n + 1 >= fock::kMinTruncation && kept >= 1.0 - leakage) break;
  }
  if (kept < 1.0 - leakage) throw TruncationError("motional state too large for the population table");
  return Eigen::Map<RVector>(p.data(), static_cast<Eigen::Index>(p.size()));
}

double excited_probability(const RabiModel& model, const RVector& populations, double t) {
  if (!(t >= 0.0)) throw DomainError("time must be >= 0");
  const double total = populations.sum();
  double s = 0.0;
  for (Eigen::Index n = 0; n < populations.size(); ++n) {
    const double k = n + 1.0;
    s += populations(n) * (1.0 - std::cos(2.0 * model.omega_sb * std::sqrt(k) * t) * std::exp(-model.gamma0 * k * t));
  }
  return std::clamp(0.5 * s / total, 0.0, 1.0);
}

double excited_probability(const RabiModel& model, const fock::MotionalSpec& spec, double t) {
  return excited_probability(model, population_distribution(spec), t);
}

double dataset_log_likelihood(const RabiModel& model, const RVector& populations,
                              const RabiDataset& data) {
  double total = 0.0;
  for (const auto& p : data.points) {
    total += log_binomial(p.excited, p.shots, excited_probability(model, populations, p.time));
  }
  return total;
}

double log_likelihood(const RabiModel& model, const std::vector<MotionState>& states,
                      const std::vector<RabiDataset>& data) {
  if (states.size() != data.size()) throw DomainError("need one motional state per dataset");
  double total = 0.0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (data[k].points.empty()) continue;
    total += dataset_log_likelihood(model, population_distribution(states[k]), data[k]);
  }
  return total;
}

std::vector<MotionState> FitResult::states() const {
  std::vector<MotionState> out;
  for (const auto& d : datasets) out.push_back(d.value);
  return out;
}

FitResult fit_mle(const std::vector<RabiDataset>& data, const FitOptions& options) {
  if (data.empty()) throw DomainError("fit needs at least one dataset");
  options.box.validate();
  for (const auto& d : data) d.validate();
  const GslQuiet quiet;

  const std::vector<LatticePoint> starts =
      pick_starts(scan_lattice(data, options.box, options.leakage), options.starts);

  Objective obj{&data, &options.box, options.leakage};
  std::vector<double> steps{0.02, 0.5};
  for (std::size_t k = 0; k < data.size(); ++k) {
    steps.push_back(0.15);
    steps.push_back(0.15);
  }

  SimplexRun best;
  for (const LatticePoint& lp : starts) {
    std::vector<double> x0{std::log(lp.model.omega_sb), std::log(lp.model.gamma0)};
    for (const auto& s : lp.states) {
      x0.push_back(std::sqrt(s.alpha_sq));
      x0.push_back(std::sqrt(s.nbar));
    }
    SimplexRun run = run_simplex(obj, x0, steps, options);
    // One restart from the end point guards against a collapsed simplex.
    if (run.converged) {
      SimplexRun again = run_simplex(obj, run.x, steps, options);
      if (again.value <= run.value) run = std::move(again);
    }
    if (run.value < best.value) best = std::move(run);
  }

  FitResult fit;
  fit.model = {std::exp(best.x[0]), std::exp(best.x[1])};
  for (std::size_t k = 0; k < data.size(); ++k) {
    DatasetEstimate e;
    e.label = data[k].label;
    e.value = {best.x[2 + 2 * k] * best.x[2 + 2 * k], best.x[3 + 2 * k] * best.x[3 + 2 * k]};
    fit.datasets.push_back(e);
  }
  fit.max_log_likelihood = -best.value;
  fit.evaluations = obj.evaluations;
  fit.converged = best.converged;
  if (!fit.converged) {
    fit.warnings.push_back("simplex did not reach tolerance " + std::to_string(options.simplex_tolerance) +
                           " within " + std::to_string(options.max_iterations) + " iterations");
  }
  return fit;
}

Contour likelihood_contour(const FitResult& fit, const std::vector<RabiDataset>& data,
                           std::size_t index, const ContourSpec& spec, double leakage) {
  if (index >= data.size() || index >= fit.datasets.size()) throw DomainError("dataset index out of range");
  if (spec.alpha_sq_points < 2 || spec.nbar_points < 2) throw DomainError("contour grid needs >= 2 points per axis");
  if (!(spec.alpha_sq_lo >= 0.0 && spec.nbar_lo >= 0.0 && spec.alpha_sq_hi > spec.alpha_sq_lo &&
        spec.nbar_hi > spec.nbar_lo)) {
    throw DomainError("bad contour grid bounds");
  }
  const RabiDataset& d = data[index];
  Contour c;
  c.alpha_sq = linspace(spec.alpha_sq_lo, spec.alpha_sq_hi, spec.alpha_sq_points);
  c.nbar = linspace(spec.nbar_lo, spec.nbar_hi, spec.nbar_points);
  c.log_likelihood.resize(spec.alpha_sq_points, spec.nbar_points);
  for (int i = 0; i < spec.alpha_sq_points; ++i) {
    for (int j = 0; j < spec.nbar_points; ++j) {
      c.log_likelihood(i, j) =
          dataset_log_likelihood(fit.model, population_distribution({c.alpha_sq[i], c.nbar[j]}, leakage), d);
    }
  }
  const double at_fit =
      dataset_log_likelihood(fit.model, population_distribution(fit.datasets[index].value, leakage), d);
  c.max_log_likelihood = std::max(at_fit, c.log_likelihood.maxCoeff());
  c.level = c.max_log_likelihood - 1.0;

  const Extent ea = region_extent(c.log_likelihood, c.alpha_sq, c.level, true);
  const Extent en = region_extent(c.log_likelihood, c.nbar, c.level, false);
  if (ea.cells == 0) {
    // The whole region sits between grid points.
    c.warnings.push_back("e^-1 region contains no grid point; grid too coarse");
    c.alpha_sq_min = c.alpha_sq_max = fit.datasets[index].value.alpha_sq;
    c.nbar_min = c.nbar_max = fit.datasets[index].value.nbar;
    return c;
  }
  c.alpha_sq_min = ea.lo;
  c.alpha_sq_max = ea.hi;
  c.nbar_min = en.lo;
  c.nbar_max = en.hi;
  const bool phys_a = ea.edge_lo && spec.alpha_sq_lo == 0.0;
  const bool phys_n = en.edge_lo && spec.nbar_lo == 0.0;
  c.boundary = phys_a || phys_n;
  c.closed = !((ea.edge_lo && !phys_a) || ea.edge_hi || (en.edge_lo && !phys_n) || en.edge_hi);
  if (!c.closed) c.warnings.push_back("e^-1 contour reaches the grid edge; enlarge the grid");
  if (ea.cells < 4 || en.cells < 4) {
    c.warnings.push_back("e^-1 contour spans fewer than 4 grid cells; grid too coarse");
  }
  const double scale = c.boundary ? 1.0 : 0.5;
  c.alpha_sq_err = scale * (c.alpha_sq_max - c.alpha_sq_min);
  c.nbar_err = scale * (c.nbar_max - c.nbar_min);
  return c;
}

Contour auto_contour(const FitResult& fit, const std::vector<RabiDataset>& data, std::size_t index,
                     int points, double leakage) {
  if (index >= fit.datasets.size()) throw DomainError("dataset index out of range");
  const MotionState centre = fit.datasets[index].value;
  double wa = 0.1, wn = 0.1;
  Contour c;
  for (int attempt = 0; attempt < 8; ++attempt) {
    ContourSpec spec;
    spec.alpha_sq_lo = std::max(0.0, centre.alpha_sq - wa);
    spec.alpha_sq_hi = centre.alpha_sq + wa;
    spec.nbar_lo = std::max(0.0, centre.nbar - wn);
    spec.nbar_hi = centre.nbar + wn;
    spec.alpha_sq_points = spec.nbar_points = points;
    c = likelihood_contour(fit, data, index, spec, leakage);

    bool done = true;
    auto touches = [](double v, double lo, double hi, double step) {
      return v <= lo + 0.5 * step || v >= hi - 0.5 * step;
    };
    const double sa = (spec.alpha_sq_hi - spec.alpha_sq_lo) / (points - 1);
    const double sn = (spec.nbar_hi - spec.nbar_lo) / (points - 1);
    const bool open_a = touches(c.alpha_sq_max, spec.alpha_sq_lo, spec.alpha_sq_hi, sa) ||
                        (spec.alpha_sq_lo > 0.0 && touches(c.alpha_sq_min, spec.alpha_sq_lo, spec.alpha_sq_hi, sa));
    const bool open_n = touches(c.nbar_max, spec.nbar_lo, spec.nbar_hi, sn) ||
                        (spec.nbar_lo > 0.0 && touches(c.nbar_min, spec.nbar_lo, spec.nbar_hi, sn));
    if (open_a) {
      wa *= 2.0;
      done = false;
    } else if ((c.alpha_sq_max - c.alpha_sq_min) < 8.0 * sa) {
      const double reach = std::max(c.alpha_sq_max - centre.alpha_sq, centre.alpha_sq - c.alpha_sq_min);
      wa = reach > 0.0 ? 1.6 * reach : wa / 4.0;
      done = false;
    }
    if (open_n) {
      wn *= 2.0;
      done = false;
    } else if ((c.nbar_max - c.nbar_min) < 8.0 * sn) {
      const double reach = std::max(c.nbar_max - centre.nbar, centre.nbar - c.nbar_min);
      wn = reach > 0.0 ? 1.6 * reach : wn / 4.0;
      done = false;
    }
    if (done) break;
  }
  return c;
}

std::vector<Contour> attach_uncertainties(FitResult& fit, const std::vector<RabiDataset>& data, int points) {
  std::vector<Contour> out;
  for (std::size_t k = 0; k < fit.datasets.size(); ++k) {
    out.push_back(auto_contour(fit, data, k, points));
    DatasetEstimate& e = fit.datasets[k];
    e.alpha_sq_err = out.back().alpha_sq_err;
    e.nbar_err = out.back().nbar_err;
    e.boundary = out.back().boundary;
    for (const auto& w : out.back().warnings) fit.warnings.push_back("dataset '" + e.label + "': " + w);
  }
  return out;
}

std::vector<Prediction> predict_gate_error(const FitResult& fit, const msgate::GateParams& params,
                                           const noise::NoiseModel& model, double phi) {
  std::vector<Prediction> out;
  for (const auto& d : fit.datasets) {
    const auto spec = fock::MotionalSpec::from_alpha_sq(d.value.alpha_sq, phi, d.value.nbar, fock::kMinTruncation);
    out.push_back({d.label, noise::averaged_gate_error(params, spec, model)});
  }
  return out;
}

RabiDataset simulate_dataset(const RabiModel& model, const MotionState& state,
                             const std::vector<double>& times, int shots, std::mt19937_64& rng,
                             const std::string& label) {
  model.validate();
  if (shots <= 0) throw DomainError("shots must be > 0");
  const RVector pops = population_distribution(state);
  RabiDataset d;
  d.label = label;
  for (double t : times) {
    std::binomial_distribution<int> draw(shots, excited_probability(model, pops, t));
    d.points.push_back({t, draw(rng), shots});
  }
  d.validate();
  return d;
}

}  // namespace iongate::sideband
