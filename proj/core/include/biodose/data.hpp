#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "biodose/errors.hpp"

namespace biodose {

/// One calibration observation: dose coordinates, observed aberration
/// frequency and its vertical uncertainty, plus optional raw counts.
struct DataPoint {
  double dn = 0.0;      // neutron dose (Gy)
  double dg = 0.0;      // gamma dose (Gy)
  double e = 0.0;       // observed aberration frequency (aberrations/cell)
  double sigma0 = 0.0;  // vertical uncertainty (aberrations/cell)
  std::optional<double> cells;        // w
  std::optional<double> aberrations;  // u

  /// Dose coordinate seen by single-radiation curve kinds.
  double scalar_dose() const { return dn + dg; }

  /// Throws ValidationError if any invariant is violated.
  void validate() const;
};

void validate_points(const std::vector<DataPoint>& points);

/// Poisson counting default for sigma0 when only (u, w) are given:
/// sqrt(max(u,1))/w.
double counting_sigma0(double aberrations, double cells);

/// Reads the calibration CSV schema `dn,dg,e,sigma0[,cells,aberrations]`.
/// The header row is required. A missing sigma0 value falls back to the
/// counting default and then requires the cells and aberrations columns.
/// Errors name the offending row and column.
std::vector<DataPoint> read_calibration_csv(std::istream& in);
std::vector<DataPoint> read_calibration_csv_file(const std::string& path);

}  // namespace biodose
