#include "vtt/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace vtt::csv {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    rows.emplace_back(line_no, split_row(line));
  }
  return rows;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", value);
  return buf;
}

double parse_double(const std::string& cell) {
  if (cell.empty()) {
    throw std::invalid_argument("empty numeric cell");
  }
  char* end = nullptr;
  const double value = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) {
    throw std::invalid_argument("not a number: '" + cell + "'");
  }
  return value;
}

}  // namespace vtt::csv
