#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rydreg {

inline constexpr std::string_view kVersion = "0.1.0";

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// Ordered key/value block written as "# meta: key=value" lines.
class MetaHeader {
 public:
  MetaHeader& set(std::string key, std::string value);
  MetaHeader& set(std::string key, double value);
  MetaHeader& set_int(std::string key, long long value);

  const std::string* find(std::string_view key) const;
  std::string get(std::string_view key) const;  // throws ConfigError when absent
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  void write(std::ostream& out) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Reads leading "# meta:" lines (other '#' lines are skipped) and stops at the
// first non-comment line, which is returned through first_line.
MetaHeader read_meta(std::istream& in, std::string& first_line);

std::vector<std::string> split(std::string_view text, char sep);
std::vector<double> parse_doubles(std::string_view text, char sep = ';');
std::string join_doubles(const std::vector<double>& values, char sep = ';');
double parse_double(std::string_view text);

}  // namespace rydreg
