#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lsilab/core.hpp"

namespace lsilab {

enum class RowDirection { upper, lower, estimate };
enum class RowFlag { pass, fail, na };

inline const char* to_string(RowDirection d) {
  switch (d) {
    case RowDirection::upper: return "upper";
    case RowDirection::lower: return "lower";
    default: return "estimate";
  }
}

inline const char* to_string(RowFlag f) {
  switch (f) {
    case RowFlag::pass: return "pass";
    case RowFlag::fail: return "fail";
    default: return "na";
  }
}

// One report line: a single numeric result with its provenance (method id),
// the grid point it belongs to, and the verdict of the inequality attached
// to this row, if any. log_value accompanies bounds whose closed form
// overflowed to +inf and is omitted otherwise.
struct ReportRow {
  std::string experiment;
  std::vector<std::pair<std::string, double>> instance;
  std::string constant;
  std::string method;
  double value = 0.0;
  std::optional<double> log_value;
  RowDirection direction = RowDirection::estimate;
  RowFlag flag = RowFlag::na;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

// 17 significant digits round-trip every double exactly; the literals
// inf/-inf/nan stand in for the non-finite values in both output formats.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string instance_key(const ReportRow& row) {
  std::string out;
  for (std::size_t i = 0; i < row.instance.size(); ++i) {
    if (i) out += ';';
    out += row.instance[i].first;
    out += '=';
    out += format_double(row.instance[i].second);
  }
  return out;
}

// Canonical report order: independent of execution order, so parallel sweeps
// serialize identically.
inline void canonical_sort(std::vector<ReportRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     if (a.experiment != b.experiment) return a.experiment < b.experiment;
                     const std::string ka = instance_key(a), kb = instance_key(b);
                     if (ka != kb) return ka < kb;
                     if (a.constant != b.constant) return a.constant < b.constant;
                     return a.method < b.method;
                   });
}

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Numbers are emitted bare; the non-finite stand-ins need quoting to stay
// inside the JSON grammar.
inline std::string json_number(double x) {
  const std::string s = format_double(x);
  return std::isfinite(x) ? s : "\"" + s + "\"";
}

}  // namespace detail

inline void emit_json(const std::vector<ReportRow>& rows, std::ostream& os) {
  os << "[\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const ReportRow& row = rows[r];
    os << "  {\"experiment\":\"" << detail::json_escape(row.experiment) << "\","
       << "\"instance\":{";
    for (std::size_t i = 0; i < row.instance.size(); ++i) {
      if (i) os << ',';
      os << '"' << detail::json_escape(row.instance[i].first)
         << "\":" << detail::json_number(row.instance[i].second);
    }
    os << "},\"constant\":\"" << detail::json_escape(row.constant) << "\","
       << "\"method\":\"" << detail::json_escape(row.method) << "\","
       << "\"value\":" << detail::json_number(row.value) << ',';
    if (row.log_value)
      os << "\"log_value\":" << detail::json_number(*row.log_value) << ',';
    os << "\"direction\":\"" << to_string(row.direction) << "\","
       << "\"pass\":\"" << to_string(row.flag) << "\","
       << "\"seed\":" << row.seed << ','
       << "\"wall_ms\":" << detail::json_number(row.wall_ms) << '}'
       << (r + 1 < rows.size() ? ",\n" : "\n");
  }
  os << "]\n";
}

inline constexpr const char* csv_header =
    "experiment,instance,constant,method,value,direction,pass,seed,wall_ms";

// The instance column joins key=value pairs with ';' so no field ever needs
// CSV quoting; log_value is carried by the JSON format only.
inline void emit_csv(const std::vector<ReportRow>& rows, std::ostream& os) {
  os << csv_header << '\n';
  for (const ReportRow& row : rows) {
    os << row.experiment << ',' << instance_key(row) << ',' << row.constant
       << ',' << row.method << ',' << format_double(row.value) << ','
       << to_string(row.direction) << ',' << to_string(row.flag) << ','
       << row.seed << ',' << format_double(row.wall_ms) << '\n';
  }
}

inline bool all_flags_pass(const std::vector<ReportRow>& rows) {
  for (const ReportRow& row : rows)
    if (row.flag == RowFlag::fail) return false;
  return true;
}

}  // namespace lsilab
