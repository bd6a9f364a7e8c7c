#include "holo/units.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

#include "holo/error.hpp"

namespace holo {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

namespace {

// Leading number and the remaining suffix.
std::pair<double, std::string_view> split_number(std::string_view text, std::string_view what) {
  text = trim(text);
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [next, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || !std::isfinite(v))
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return {v, trim(std::string_view(next, std::size_t(end - next)))};
}

}  // namespace

double parse_length(std::string_view text) {
  const auto [v, unit] = split_number(text, "length");
  if (unit == "nm") return v * 1e-9;
  if (unit == "um" || unit == "\xC2\xB5m" || unit == "\xCE\xBCm") return v * 1e-6;
  if (unit == "mm") return v * 1e-3;
  if (unit == "cm") return v * 1e-2;
  if (unit == "m") return v;
  if (unit.empty())
    throw ConfigError("length '" + std::string(trim(text)) + "' needs a unit (nm, um, mm, m)");
  throw ConfigError("unknown length unit '" + std::string(unit) + "'");
}

double parse_real(std::string_view text) {
  const auto [v, rest] = split_number(text, "number");
  if (!rest.empty()) throw ConfigError("invalid number '" + std::string(trim(text)) + "'");
  return v;
}

unsigned long long parse_count(std::string_view text) {
  text = trim(text);
  unsigned long long v = 0;
  auto [next, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || next != text.data() + text.size() || text.empty())
    throw ConfigError("invalid count '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "'");
}

std::string format_mm(double meters) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f mm", meters * 1e3);
  return buf;
}

}  // namespace holo
