#include "rydreg/csv.hpp"

#include <charconv>
#include <system_error>

#include "rydreg/errors.hpp"

namespace rydreg {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

MetaHeader& MetaHeader::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
  return *this;
}

MetaHeader& MetaHeader::set(std::string key, double value) {
  return set(std::move(key), format_double(value));
}

MetaHeader& MetaHeader::set_int(std::string key, long long value) {
  return set(std::move(key), std::to_string(value));
}

const std::string* MetaHeader::find(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

std::string MetaHeader::get(std::string_view key) const {
  if (const auto* v = find(key)) return *v;
  throw ConfigError("missing metadata key '" + std::string(key) + "'");
}

void MetaHeader::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << "# meta: " << k << '=' << v << '\n';
}

MetaHeader read_meta(std::istream& in, std::string& first_line) {
  MetaHeader meta;
  constexpr std::string_view prefix = "# meta: ";
  std::string line;
  first_line.clear();
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(prefix, 0) == 0) {
      const auto body = line.substr(prefix.size());
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw ConfigError("malformed metadata line: " + line);
      meta.set(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    if (!line.empty() && line.front() == '#') continue;
    first_line = line;
    break;
  }
  return meta;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError("not a number: '" + std::string(text) + "'");
  return v;
}

std::vector<double> parse_doubles(std::string_view text, char sep) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, sep)) out.push_back(parse_double(part));
  return out;
}

std::string join_doubles(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += format_double(values[i]);
  }
  return out;
}

}  // namespace rydreg
