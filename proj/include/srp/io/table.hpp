#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace srp::io {

using Cell = std::variant<double, std::int64_t, std::string>;

// Fixed ten decimals; nan and inf spelled out.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", v);
  std::string s(buf);
  if (s == "-0.0000000000") s.erase(0, 1);
  return s;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n') ? ' ' : c;
  }
  return out + "\"";
}

/// Column-ordered table plus the key/value echo of the run that produced it.
struct Table {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw std::logic_error("Table::add_row: expected " + std::to_string(columns.size()) +
                             " cells, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
};

inline std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_real(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

inline void write_csv(std::ostream& os, const Table& t) {
  for (const auto& [k, v] : t.header) os << "# " << k << "=" << v << "\n";
  for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << csv_escape(cell_text(row[j]));
    os << "\n";
  }
}

// {"spec": {...}, "rows": [{column: value, ...}, ...]}; reals carry the same
// ten decimals as the CSV.
inline nlohmann::ordered_json to_json(const Table& t) {
  nlohmann::ordered_json doc;
  doc["spec"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : t.header) doc["spec"][k] = v;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < row.size(); ++j) {
      const Cell& c = row[j];
      if (const auto* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d))
          obj[t.columns[j]] = std::stod(format_real(*d));
        else
          obj[t.columns[j]] = format_real(*d);
      } else if (const auto* i = std::get_if<std::int64_t>(&c)) {
        obj[t.columns[j]] = *i;
      } else {
        obj[t.columns[j]] = std::get<std::string>(c);
      }
    }
    doc["rows"].push_back(std::move(obj));
  }
  return doc;
}

inline void write_json(std::ostream& os, const Table& t) { os << to_json(t).dump(2) << "\n"; }

enum class Format { csv, json };

inline void write_table(std::ostream& os, const Table& t, Format f) {
  if (f == Format::csv)
    write_csv(os, t);
  else
    write_json(os, t);
}

/// Writes to `path`, or to stdout when path is empty or "-".
inline void write_table(const std::string& path, const Table& t, Format f) {
  if (path.empty() || path == "-") {
    write_table(std::cout, t, f);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  write_table(out, t, f);
  if (!out) throw std::runtime_error("error writing " + path);
}

}  // namespace srp::io
