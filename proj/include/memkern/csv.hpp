#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace memkern {

/// Column-major numeric table. Written with a header row, comma separators
/// and 17 significant digits so that values round-trip exactly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
};

std::string format_double(double v);

void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

}  // namespace memkern
