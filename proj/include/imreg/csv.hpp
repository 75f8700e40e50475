#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace imreg::csv {

/// 17 significant digits, enough to round-trip any double.
std::string fmt(double v);

/// Writes values separated by commas and terminated by a newline.
void write_row(std::ostream& os, const std::vector<double>& values);

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Strict parse; throws std::invalid_argument on trailing garbage.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);
unsigned long long parse_uint(std::string_view text);

}  // namespace imreg::csv
