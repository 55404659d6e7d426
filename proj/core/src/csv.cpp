#include "goq/csv.hpp"

#include "goq/prob_model.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace goq {

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw std::logic_error("CsvTable: row width does not match header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void CsvTable::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << str();
}

std::string fmt_num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

CsvDataset parse_csv_dataset(const std::string& text, const CsvReadOptions& opt) {
  CsvDataset out;
  std::vector<std::vector<double>> rows;
  int width = opt.columns;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto cells = split(line);
    std::vector<double> values(cells.size());
    std::string problem;
    for (std::size_t i = 0; i < cells.size() && problem.empty(); ++i) {
      if (!parse_double(cells[i], values[i])) problem = "column " + std::to_string(i + 1) + " is not a number";
    }
    if (first) {
      first = false;
      if (!problem.empty()) {
        for (auto c : cells) out.header.emplace_back(trim(c));
        if (width == 0) width = static_cast<int>(cells.size());
        continue;
      }
    }
    if (problem.empty()) {
      if (width == 0) width = static_cast<int>(cells.size());
      if (static_cast<int>(cells.size()) != width)
        problem = "expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size());
    }
    if (!problem.empty()) {
      if (!opt.lenient) throw ConfigError("csv line " + std::to_string(lineno) + ": " + problem);
      out.skipped.push_back({lineno, problem});
      continue;
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ConfigError("csv: no data rows");
  out.data.resize(width, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (int i = 0; i < width; ++i) out.data(i, static_cast<Eigen::Index>(k)) = rows[k][i];
  return out;
}

CsvDataset read_csv_dataset(const std::string& path, const CsvReadOptions& opt) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read dataset '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_csv_dataset(ss.str(), opt);
}

}  // namespace goq
