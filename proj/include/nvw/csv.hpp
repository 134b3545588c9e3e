#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nvw {

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws if absent.
  std::size_t column(const std::string& name) const;
};

void write_csv_row(std::ostream& out, const std::vector<double>& values);
CsvTable read_csv(std::istream& in);

}  // namespace nvw
