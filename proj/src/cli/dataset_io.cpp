#include "iongate/cli/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>

#include "iongate/error.hpp"

namespace iongate::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
bool parse_field(const std::string& s, T& v) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  return ec == std::errc() && p == end;
}

// Yields (line number, content) for non-blank, non-comment lines.
template <class F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    f(number, t);
  }
}

const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw DataError(where + ": missing field '" + key + "'");
  return j.at(key);
}

double num(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_number()) throw DataError(where + ": field '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

}  // namespace

std::string fmt(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

sideband::RabiDataset read_rabi_csv(std::istream& in, const std::string& label, const std::string& source) {
  sideband::RabiDataset d;
  d.label = label;
  bool header = false;
  for_each_line(in, [&](int line, const std::string& text) {
    const std::string where = source + ":" + std::to_string(line) + ": ";
    const auto cols = split(text);
    if (!header) {
      if (cols != std::vector<std::string>{"time_us", "excited", "shots"}) {
        throw DataError(where + "expected header 'time_us,excited,shots'");
      }
      header = true;
      return;
    }
    if (cols.size() != 3) throw DataError(where + "expected 3 fields, got " + std::to_string(cols.size()));
    sideband::RabiPoint p;
    double t_us = 0.0;
    if (!parse_field(cols[0], t_us) || !std::isfinite(t_us)) throw DataError(where + "bad time '" + cols[0] + "'");
    if (!parse_field(cols[1], p.excited)) throw DataError(where + "bad excited count '" + cols[1] + "'");
    if (!parse_field(cols[2], p.shots)) throw DataError(where + "bad shot count '" + cols[2] + "'");
    p.time = t_us * 1e-6;
    if (t_us < 0.0) throw DataError(where + "time must be >= 0");
    if (p.shots <= 0) throw DataError(where + "shots must be > 0");
    if (p.excited < 0 || p.excited > p.shots) throw DataError(where + "excited count outside [0, shots]");
    if (!d.points.empty() && !(p.time > d.points.back().time)) {
      throw DataError(where + "times must be strictly increasing");
    }
    d.points.push_back(p);
  });
  if (!header) throw DataError(source + ": missing header 'time_us,excited,shots'");
  if (d.points.empty()) throw DataError(source + ": no data rows");
  return d;
}

sideband::RabiDataset read_rabi_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return read_rabi_csv(in, std::filesystem::path(path).stem().string(), path);
}

void write_rabi_csv(std::ostream& out, const sideband::RabiDataset& d) {
  out << "time_us,excited,shots\n";
  for (const auto& p : d.points) out << fmt(p.time * 1e6) << ',' << p.excited << ',' << p.shots << '\n';
}

void write_error_csv(std::ostream& out, const std::vector<ErrorRow>& rows, bool with_sigma) {
  out << "delta_nu_hz,alpha_sq,phi_rad,nbar,infidelity,diamond_distance" << (with_sigma ? ",sigma_hz" : "") << '\n';
  for (const auto& r : rows) {
    out << fmt(r.delta_nu_hz) << ',' << fmt(r.alpha_sq) << ',' << fmt(r.phi_rad) << ',' << fmt(r.nbar) << ','
        << fmt(r.infidelity) << ',' << fmt(r.diamond_distance);
    if (with_sigma) out << ',' << fmt(r.sigma_hz);
    out << '\n';
  }
}

std::vector<ErrorRow> read_error_csv(std::istream& in, const std::string& source) {
  std::vector<ErrorRow> rows;
  std::size_t width = 0;
  for_each_line(in, [&](int line, const std::string& text) {
    const std::string where = source + ":" + std::to_string(line) + ": ";
    const auto cols = split(text);
    if (width == 0) {
      std::vector<std::string> base{"delta_nu_hz", "alpha_sq", "phi_rad", "nbar", "infidelity", "diamond_distance"};
      if (cols == base) {
        width = 6;
      } else {
        base.push_back("sigma_hz");
        if (cols != base) throw DataError(where + "unexpected header");
        width = 7;
      }
      return;
    }
    if (cols.size() != width) throw DataError(where + "expected " + std::to_string(width) + " fields");
    double v[7] = {};
    for (std::size_t i = 0; i < width; ++i) {
      if (!parse_field(cols[i], v[i])) throw DataError(where + "bad number '" + cols[i] + "'");
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  });
  if (width == 0) throw DataError(source + ": missing header");
  return rows;
}

void write_contour_csv(std::ostream& out, const sideband::Contour& c) {
  out << "alpha_sq,nbar,log_likelihood,inside\n";
  for (std::size_t i = 0; i < c.alpha_sq.size(); ++i) {
    for (std::size_t j = 0; j < c.nbar.size(); ++j) {
      const double v = c.log_likelihood(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out << fmt(c.alpha_sq[i]) << ',' << fmt(c.nbar[j]) << ',' << fmt(v) << ',' << (v >= c.level ? 1 : 0) << '\n';
    }
  }
}

nlohmann::ordered_json fit_to_json(const sideband::FitResult& fit, const std::vector<std::string>& contour_files) {
  nlohmann::ordered_json j;
  j["shared"] = {{"omega_sb_over_2pi_khz", fit.model.omega_sb / kTwoPi * 1e-3},
                 {"gamma0_per_s", fit.model.gamma0},
                 {"coherence_time_ms", fit.model.gamma0 > 0.0 ? 1e3 / fit.model.gamma0 : 0.0}};
  j["datasets"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < fit.datasets.size(); ++k) {
    const auto& d = fit.datasets[k];
    nlohmann::ordered_json e;
    e["label"] = d.label;
    e["alpha_sq"] = d.value.alpha_sq;
    e["alpha_sq_err"] = d.alpha_sq_err;
    e["nbar"] = d.value.nbar;
    e["nbar_err"] = d.nbar_err;
    e["mean_phonons"] = d.value.alpha_sq + d.value.nbar;
    e["at_boundary"] = d.boundary;
    if (k < contour_files.size()) e["contour_csv"] = contour_files[k];
    j["datasets"].push_back(e);
  }
  j["max_log_likelihood"] = fit.max_log_likelihood;
  j["converged"] = fit.converged;
  j["evaluations"] = fit.evaluations;
  j["warnings"] = fit.warnings;
  return j;
}

sideband::FitResult fit_from_json(const nlohmann::json& j) {
  sideband::FitResult fit;
  const auto& shared = field(j, "shared", "fit");
  fit.model.omega_sb = kTwoPi * 1e3 * num(shared, "omega_sb_over_2pi_khz", "fit.shared");
  fit.model.gamma0 = num(shared, "gamma0_per_s", "fit.shared");
  const auto& ds = field(j, "datasets", "fit");
  if (!ds.is_array() || ds.empty()) throw DataError("fit: 'datasets' must be a non-empty array");
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const std::string where = "fit.datasets[" + std::to_string(k) + "]";
    sideband::DatasetEstimate e;
    const auto& label = field(ds[k], "label", where);
    if (!label.is_string()) throw DataError(where + ": 'label' must be a string");
    e.label = label.get<std::string>();
    e.value.alpha_sq = num(ds[k], "alpha_sq", where);
    e.value.nbar = num(ds[k], "nbar", where);
    if (ds[k].contains("alpha_sq_err")) e.alpha_sq_err = num(ds[k], "alpha_sq_err", where);
    if (ds[k].contains("nbar_err")) e.nbar_err = num(ds[k], "nbar_err", where);
    if (ds[k].contains("at_boundary")) e.boundary = ds[k].at("at_boundary").get<bool>();
    if (e.value.alpha_sq < 0.0 || e.value.nbar < 0.0) throw DataError(where + ": negative state parameter");
    fit.datasets.push_back(e);
  }
  if (j.contains("max_log_likelihood")) fit.max_log_likelihood = num(j, "max_log_likelihood", "fit");
  if (j.contains("converged")) fit.converged = j.at("converged").get<bool>();
  return fit;
}

nlohmann::ordered_json report_to_json(const channel::ErrorReport& r) {
  nlohmann::ordered_json j;
  j["infidelity"] = r.infidelity;
  j["diamond_distance"] = r.diamond_distance;
  nlohmann::ordered_json md = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.metadata) md[k] = v;
  j["metadata"] = md;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace iongate::cli
