#pragma once

#include <string>
#include <string_view>

namespace holo {

/// Parses "<number><unit>" with unit in {nm, um, µm, mm, cm, m} into meters.
/// A unit is mandatory. Throws ConfigError.
double parse_length(std::string_view text);

double parse_real(std::string_view text);
/// Non-negative integer.
unsigned long long parse_count(std::string_view text);
/// true/false, yes/no, on/off, 1/0.
bool parse_bool(std::string_view text);

/// "%.2f mm"
std::string format_mm(double meters);

std::string_view trim(std::string_view text);

}  // namespace holo
