#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tmeval::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> fields;
};

struct Table {
  std::string source;
  std::vector<std::string> header;
  std::vector<Row> rows;

  /// Index of a header column, or npos.
  std::size_t column(std::string_view name) const;
  /// Like column() but throws ParseError naming the missing column.
  std::size_t require_column(std::string_view name) const;
};

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// RFC 4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF,
/// optional UTF-8 BOM. Blank lines are skipped. Every row must have the
/// header's field count.
Table parse(std::string_view text, std::string source = "<memory>");
Table read_file(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Appends one CSV record (with trailing '\n') to out, quoting as needed.
void append_row(std::string& out, const std::vector<std::string>& fields);

/// Shortest decimal string that parses back to exactly the same double.
/// NaN is written as "NaN", infinities as "inf"/"-inf".
std::string format_double(double value);

/// Strict decimal parse of a whole field. Throws ParseError on failure.
double parse_double(std::string_view field, const std::string& source,
                    std::size_t line);
long long parse_int(std::string_view field, const std::string& source,
                    std::size_t line);

}  // namespace tmeval::csv
