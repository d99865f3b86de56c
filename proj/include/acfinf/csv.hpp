#pragma once

#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "acfinf/error.hpp"
#include "acfinf/estimators.hpp"

namespace acfinf {

// Single-column, headerless CSV of floats. Blank lines are skipped; anything
// after the first comma on a line is ignored.
inline std::vector<double> read_column(std::istream& in, const std::string& what = "input") {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comma = line.find(',');
    std::string field = line.substr(0, comma);
    const auto first = field.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    field = field.substr(first, field.find_last_not_of(" \t\r") - first + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(field, &used);
      if (used != field.size()) throw std::invalid_argument(field);
      out.push_back(v);
    } catch (const std::exception&) {
      throw InvalidSeries(what + ": cannot parse '" + field + "' on line " + std::to_string(line_no));
    }
  }
  return out;
}

inline std::vector<double> read_column_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_column(in, path);
}

inline void write_column(std::ostream& out, const std::vector<double>& values) {
  out << std::setprecision(17);
  for (double v : values) out << v << '\n';
}

inline void write_acf_csv(std::ostream& out, const AcfEstimate& est) {
  out << "lag,gamma,rho\n" << std::setprecision(17);
  for (std::size_t k = 0; k <= est.max_lag; ++k) out << k << ',' << est.gamma[k] << ',' << est.rho[k] << '\n';
}

}  // namespace acfinf
