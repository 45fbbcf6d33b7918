#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geotrips::csv {

/// Splits one CSV line into fields. Handles RFC 4180 quoting within the line;
/// returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_line(std::string_view line);

/// Quotes a field when it contains a separator, quote or newline.
std::string quote(std::string_view field);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

/// Splits a whole buffer into lines, dropping '\r' before '\n'.
std::vector<std::string_view> split_lines(std::string_view buffer);

std::string_view trim(std::string_view text);

}  // namespace geotrips::csv
