#include "nvw/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "nvw/error.hpp"

namespace nvw {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) fail(ErrorCode::IoError, "number formatting failed");
  return std::string(buf, res.ptr);
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  fail(ErrorCode::IoError, "csv column '" + name + "' not found");
}

void write_csv_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out << ',';
    out << format_double(values[k]);
  }
  out << '\n';
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::IoError, "csv is empty");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t end = line.find(',', pos);
      if (end == std::string::npos) end = line.size();
      double v = 0.0;
      auto res = std::from_chars(line.data() + pos, line.data() + end, v);
      if (res.ec != std::errc() || res.ptr != line.data() + end) {
        fail(ErrorCode::IoError, "malformed csv number in '" + line + "'");
      }
      row.push_back(v);
      pos = end + 1;
    }
    if (row.size() != table.header.size()) fail(ErrorCode::IoError, "csv row width mismatch");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace nvw
