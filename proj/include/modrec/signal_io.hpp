#pragma once

// Sample files: CSV with header `n,value`, one row per sample, values written
// with 17 significant digits so binary64 round-trips exactly.

#include "modrec/types.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace modrec::io {

inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

inline double parse_double(const std::string& text, const std::string& context) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw ConfigError(context + ": not a number: '" + text + "'");
  return value;
}

inline void write_signal_csv(std::ostream& out, const RealVector& samples) {
  out << "n,value\n";
  for (Eigen::Index i = 0; i < samples.size(); ++i) out << i << ',' << format_double(samples[i]) << '\n';
}

inline void write_signal_csv(const std::string& path, const RealVector& samples) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot open '" + path + "' for writing");
  write_signal_csv(out, samples);
  if (!out) throw NumericalError("write failed for '" + path + "'");
}

inline RealVector read_signal_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(source + ": empty signal file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "n,value") throw ConfigError(source + ": expected header 'n,value', got '" + line + "'");

  std::vector<double> values;
  long row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError(source + ": malformed row '" + line + "'");
    const std::string context = source + " row " + std::to_string(row + 1);
    const double index = parse_double(line.substr(0, comma), context);
    if (index != static_cast<double>(row)) {
      throw ConfigError(context + ": sample index " + line.substr(0, comma) + " out of sequence");
    }
    values.push_back(parse_double(line.substr(comma + 1), context));
    ++row;
  }
  return Eigen::Map<const RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline RealVector read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open signal file '" + path + "'");
  return read_signal_csv(in, path);
}

}  // namespace modrec::io
