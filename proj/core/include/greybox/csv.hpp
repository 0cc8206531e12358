#pragma once

// Minimal RFC 4180 reader/writer (comma separator, double-quote escaping,
// LF or CRLF line ends). Numbers are written in shortest round-trip form.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace greybox::csv {

using Row = std::vector<std::string>;

/// Throws Error{Parse} with the line number for unbalanced quotes.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
std::string format_row(const Row& row);
std::string format_number(double v);
/// Throws Error{Parse} naming `what` if `s` is not a complete number.
double parse_number(std::string_view s, std::string_view what);
std::int64_t parse_integer(std::string_view s, std::string_view what);

}  // namespace greybox::csv
