#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cebread::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
// newlines. Each returned row carries the 1-based line it started on.
struct ParsedRow {
  std::size_t line = 0;
  Row fields;
};

std::vector<ParsedRow> parse(std::string_view text);

std::string escape(std::string_view field);
void write_row(std::ostream& os, const Row& row);

// Shortest representation that round-trips to the same double.
std::string format_number(double v);

}  // namespace cebread::csv
