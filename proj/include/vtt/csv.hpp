#ifndef VTT_CSV_HPP
#define VTT_CSV_HPP

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace vtt::csv {

// Raised on malformed input; `line` is the 1-based physical line number.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& message, std::size_t line)
      : std::runtime_error(message + " (line " + std::to_string(line) + ")"),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Splits one CSV line on commas. Fields in this project are plain tokens
// (ids, numbers), so no quoting rules apply; a trailing '\r' is stripped.
std::vector<std::string> split_row(const std::string& line);

// Reads all non-empty lines; each entry is (line number, cells).
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(
    const std::filesystem::path& path);

// Shortest decimal form that still round-trips doubles well past 1e-9.
std::string format_double(double value);

// strtod with full-consumption check; throws std::invalid_argument.
double parse_double(const std::string& cell);

}  // namespace vtt::csv

#endif  // VTT_CSV_HPP
