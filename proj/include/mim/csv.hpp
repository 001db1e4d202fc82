#pragma once

// Minimal CSV output: '#'-prefixed key=value metadata, a header row, then
// comma-separated rows. Doubles use the shortest decimal that round-trips.

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mim/error.hpp"

namespace mim {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

using Metadata = std::vector<std::pair<std::string, std::string>>;
using CsvCell = std::variant<double, long, std::string>;

inline std::string format_cell(const CsvCell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<long>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const Metadata& meta, const std::vector<std::string>& columns)
      : out_(path, std::ios::binary), columns_(columns.size()) {
    if (!out_) throw Error("cannot open '" + path + "' for writing");
    for (const auto& [k, v] : meta) out_ << "# " << k << '=' << v << '\n';
    write_line(columns);
  }

  void row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_) throw Error("CSV row width does not match the header");
    std::vector<std::string> text;
    text.reserve(cells.size());
    for (const auto& c : cells) text.push_back(format_cell(c));
    write_line(text);
  }

 private:
  void write_line(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace mim
