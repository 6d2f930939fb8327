#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hivmob {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
void append_double(std::string& out, double v);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

/// Splits on '\t'; no quoting.
std::vector<std::string_view> split_tabs(std::string_view line);

/// Strips trailing '\r', spaces and tabs.
std::string_view rtrim(std::string_view s);

}  // namespace hivmob
