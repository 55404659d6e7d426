#pragma once

#include <string>
#include <vector>

namespace goq {

/// Minimal CSV table: header plus rows of already formatted cells.
/// Output dialect: comma separated, '.' decimal, LF line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells);
  std::string str() const;
  void write(const std::string& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest round-trip decimal form (17 significant digits at most).
std::string fmt_num(double v);
/// Fixed number of significant digits.
std::string fmt_sig(double v, int digits);

}  // namespace goq
