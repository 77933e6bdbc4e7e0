#include "biodose/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace biodose {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& field, std::size_t row, const std::string& column) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("row " + std::to_string(row) + ", column '" + column +
                          "': cannot parse '" + field + "' as a number");
  }
}

}  // namespace

double counting_sigma0(double aberrations, double cells) {
  return std::sqrt(std::max(aberrations, 1.0)) / cells;
}

void DataPoint::validate() const {
  if (!(sigma0 > 0.0)) throw ValidationError("sigma0 must be > 0");
  if (!(e >= 0.0)) throw ValidationError("aberration frequency must be >= 0");
  if (!(dn >= 0.0) || !(dg >= 0.0)) throw ValidationError("doses must be >= 0");
  if (cells.has_value() != aberrations.has_value())
    throw ValidationError("cells and aberrations must be given together");
  if (cells && aberrations) {
    if (!(*cells >= 1.0)) throw ValidationError("cells must be >= 1");
    if (!(*aberrations >= 0.0)) throw ValidationError("aberrations must be >= 0");
    if (std::abs(e - *aberrations / *cells) > 1e-12)
      throw ValidationError("e must equal aberrations/cells (u/w)");
  }
}

void validate_points(const std::vector<DataPoint>& points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      points[i].validate();
    } catch (const ValidationError& err) {
      throw ValidationError("data point " + std::to_string(i) + ": " + err.what());
    }
  }
}

std::vector<DataPoint> read_calibration_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty CSV: header row required");
  auto header = split_csv(line);
  for (auto& h : header) {
    std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
  }
  const std::vector<std::string> base = {"dn", "dg", "e", "sigma0"};
  if (header.size() < 4 || !std::equal(base.begin(), base.end(), header.begin()))
    throw ValidationError("bad CSV header: expected 'dn,dg,e,sigma0[,cells,aberrations]'");
  bool has_counts = false;
  if (header.size() >= 6 && header[4] == "cells" && header[5] == "aberrations") has_counts = true;
  else if (header.size() > 4)
    throw ValidationError("bad CSV header: optional columns must be 'cells,aberrations'");

  std::vector<DataPoint> points;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw ValidationError("row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " columns, got " +
                            std::to_string(fields.size()));
    DataPoint p;
    p.dn = parse_number(fields[0], row, "dn");
    p.dg = parse_number(fields[1], row, "dg");
    p.e = parse_number(fields[2], row, "e");
    if (has_counts) {
      p.cells = parse_number(fields[4], row, "cells");
      p.aberrations = parse_number(fields[5], row, "aberrations");
    }
    if (fields[3].empty()) {
      if (!p.cells)
        throw ValidationError("row " + std::to_string(row) +
                              ": sigma0 is empty; either supply sigma0 or add the "
                              "cells,aberrations columns for the counting default");
      p.sigma0 = counting_sigma0(*p.aberrations, *p.cells);
    } else {
      p.sigma0 = parse_number(fields[3], row, "sigma0");
    }
    try {
      p.validate();
    } catch (const ValidationError& err) {
      throw ValidationError("row " + std::to_string(row) + ": " + err.what());
    }
    points.push_back(p);
  }
  return points;
}

std::vector<DataPoint> read_calibration_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV file: " + path);
  return read_calibration_csv(in);
}

}  // namespace biodose
