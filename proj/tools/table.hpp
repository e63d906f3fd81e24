#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace fracsob::cli {

using Cell = std::variant<double, long long, std::string, bool>;

/// A CSV table with a fixed header. Doubles are written with 17 significant
/// digits through std::to_chars so output does not depend on the locale.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  void write(std::ostream& os) const;
  bool empty() const noexcept { return rows.empty(); }
};

std::string format_double(double v);

/// Minimal RFC 4180 reader: header row plus data rows as strings.
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column, or throws std::runtime_error naming it.
  std::size_t column(const std::string& name) const;
  bool has(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

CsvData read_csv(std::istream& is);

}  // namespace fracsob::cli
