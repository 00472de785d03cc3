#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace reqfuse::csv {

using Row = std::vector<std::string>;

/// Parses RFC-4180 text: quoted fields may hold commas, doubled quotes and
/// line breaks. Accepts LF or CRLF record terminators. A trailing newline does
/// not produce an empty record.
std::vector<Row> parse(std::string_view text);
std::vector<Row> read_file(const std::string& path);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string format_row(const Row& row);
void write_row(std::ostream& out, const Row& row);

/// 17-significant-digit rendering; round-trips every finite double.
std::string format_double(double value);
double parse_double(std::string_view text);

}  // namespace reqfuse::csv
