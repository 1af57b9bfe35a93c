#pragma once

// Flat-file formats: Rabi data CSV, scenario CSVs, fit JSON, contour CSV.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "iongate/sideband.hpp"

namespace iongate::cli {

/// Fixed-format number for CSV output, so identical inputs give identical bytes.
std::string fmt(double x);

/// Header `time_us,excited,shots`; blank lines and lines starting with '#' are
/// skipped. Errors are DataError with "<source>:<line>: ..." messages.
sideband::RabiDataset read_rabi_csv(std::istream& in, const std::string& label,
                                    const std::string& source = "<input>");
sideband::RabiDataset read_rabi_file(const std::string& path);
void write_rabi_csv(std::ostream& out, const sideband::RabiDataset& d);

struct ErrorRow {
  double delta_nu_hz = 0.0;
  double alpha_sq = 0.0;
  double phi_rad = 0.0;
  double nbar = 0.0;
  double infidelity = 0.0;
  double diamond_distance = 0.0;
  double sigma_hz = 0.0;
};

/// Columns delta_nu_hz,alpha_sq,phi_rad,nbar,infidelity,diamond_distance, plus
/// sigma_hz when `with_sigma`.
void write_error_csv(std::ostream& out, const std::vector<ErrorRow>& rows, bool with_sigma);
std::vector<ErrorRow> read_error_csv(std::istream& in, const std::string& source = "<input>");

/// alpha_sq,nbar,log_likelihood,inside
void write_contour_csv(std::ostream& out, const sideband::Contour& c);

nlohmann::ordered_json fit_to_json(const sideband::FitResult& fit,
                                   const std::vector<std::string>& contour_files = {});
/// Throws DataError on a missing or malformed field.
sideband::FitResult fit_from_json(const nlohmann::json& j);

nlohmann::ordered_json report_to_json(const channel::ErrorReport& r);

}  // namespace iongate::cli
