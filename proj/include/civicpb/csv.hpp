#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace civicpb::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain delimiters, doubled quotes and
// line breaks. A trailing CR before LF is dropped. Blank lines are skipped.
std::vector<Row> parse(std::string_view text, char delimiter = ',');

// Quotes a field only when it contains the delimiter, a quote or a line break.
std::string escape(std::string_view field, char delimiter = ',');

void write_row(std::ostream& out, const Row& row, char delimiter = ',');

}  // namespace civicpb::csv
