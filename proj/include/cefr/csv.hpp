#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cefr::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, LF or
/// CRLF row ends. A leading UTF-8 BOM is skipped. Empty lines are dropped.
/// Throws Error{MalformedCsv} with the 1-based line in the detail map.
std::vector<Row> parse(std::string_view text, char delimiter = ',');

/// Quotes a field only when it contains the delimiter, a quote, CR or LF.
std::string quote(std::string_view field, char delimiter = ',');

/// One row, LF-terminated.
std::string format_row(const Row& row, char delimiter = ',');

} // namespace cefr::csv
