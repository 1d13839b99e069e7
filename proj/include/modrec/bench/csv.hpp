#pragma once

// CSV output for sweeps. The header strings are part of the public format.

#include "modrec/bench/summary.hpp"
#include "modrec/signal_io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace modrec::bench {

inline constexpr const char* kRawHeader = "method,of,snr_db,trial,seed,nmse,nmse_db,runtime_ms,iterations,exact";
inline constexpr const char* kSummaryHeader =
    "method,sweep_var,sweep_value,mean_nmse,median_nmse,std_nmse,mean_nmse_db,exact_rate,mean_runtime_ms";

inline void write_raw_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  using io::format_double;
  out << kRawHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.method) << ',' << format_double(r.of) << ',' << format_double(r.snr_db) << ','
        << r.trial_index << ',' << r.seed << ',' << format_double(r.nmse) << ',' << format_double(r.nmse_db) << ','
        << format_double(r.runtime_ms) << ',' << r.iterations_run << ',' << (r.exact_recovery ? 1 : 0) << '\n';
  }
}

inline void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  using io::format_double;
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << to_string(r.sweep_var) << ',' << format_double(r.sweep_value) << ','
        << format_double(r.mean_nmse) << ',' << format_double(r.median_nmse) << ',' << format_double(r.std_nmse)
        << ',' << format_double(r.mean_nmse_db) << ',' << format_double(r.exact_rate) << ','
        << format_double(r.mean_runtime_ms) << '\n';
  }
}

namespace csv_detail {

template <typename Writer, typename Data>
void write_file(const std::string& path, const Data& data, Writer writer) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot open '" + path + "' for writing");
  writer(out, data);
  out.flush();
  if (!out) throw NumericalError("write failed for '" + path + "'");
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline long long parse_integer(const std::string& text, const std::string& context) {
  const double v = io::parse_double(text, context);
  if (v != std::floor(v)) throw ConfigError(context + ": expected an integer, got '" + text + "'");
  return static_cast<long long>(v);
}

inline std::uint64_t parse_u64(const std::string& text, const std::string& context) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0') throw ConfigError(context + ": expected an unsigned integer, got '" + text + "'");
  return v;
}

}  // namespace csv_detail

inline void emit_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  csv_detail::write_file(path, records, [](std::ostream& o, const auto& d) { write_raw_csv(o, d); });
}

inline void emit_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
  csv_detail::write_file(path, rows, [](std::ostream& o, const auto& d) { write_summary_csv(o, d); });
}

inline std::vector<TrialRecord> read_raw_csv(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line) || line != kRawHeader) {
    throw ConfigError(source + ": expected header '" + std::string(kRawHeader) + "'");
  }
  std::vector<TrialRecord> records;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::string ctx = source + " line " + std::to_string(row);
    const auto f = csv_detail::split(line);
    if (f.size() != 10) throw ConfigError(ctx + ": expected 10 fields, got " + std::to_string(f.size()));
    TrialRecord r;
    r.method = parse_method(f[0]);
    r.of = io::parse_double(f[1], ctx);
    r.snr_db = io::parse_double(f[2], ctx);
    r.trial_index = static_cast<int>(csv_detail::parse_integer(f[3], ctx));
    r.seed = csv_detail::parse_u64(f[4], ctx);
    r.nmse = io::parse_double(f[5], ctx);
    r.nmse_db = io::parse_double(f[6], ctx);
    r.runtime_ms = io::parse_double(f[7], ctx);
    r.iterations_run = static_cast<int>(csv_detail::parse_integer(f[8], ctx));
    if (f[9] != "0" && f[9] != "1") throw ConfigError(ctx + ": exact must be 0 or 1");
    r.exact_recovery = f[9] == "1";
    records.push_back(r);
  }
  return records;
}

inline std::vector<TrialRecord> read_raw_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_raw_csv(in, path);
}

/// CSV text with the named column removed from every line.
inline std::string drop_column(const std::string& csv_text, const std::string& column) {
  std::stringstream in(csv_text);
  std::string line;
  std::getline(in, line);
  const auto header = csv_detail::split(line);
  const auto it = std::find(header.begin(), header.end(), column);
  detail::require(it != header.end(), "drop_column: no column '" + column + "'");
  const auto skip = static_cast<std::size_t>(it - header.begin());

  std::string out;
  do {
    const auto fields = csv_detail::split(line);
    for (std::size_t i = 0, written = 0; i < fields.size(); ++i) {
      if (i == skip) continue;
      if (written++) out += ',';
      out += fields[i];
    }
    out += '\n';
  } while (std::getline(in, line));
  return out;
}

}  // namespace modrec::bench
