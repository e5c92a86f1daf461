#include "tmeval/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tmeval/error.hpp"

namespace tmeval::csv {

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return npos;
}

std::size_t Table::require_column(std::string_view name) const {
  const auto idx = column(name);
  if (idx == npos) {
    throw ParseError(source, 1, "missing column '" + std::string(name) + "'");
  }
  return idx;
}

Table parse(std::string_view text, std::string source) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  Table table;
  table.source = std::move(source);

  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;

  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_has_content = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = fields.size() == 1 && fields[0].empty() && !record_has_content;
    if (!blank) {
      records.push_back(std::move(fields));
      record_lines.push_back(record_line);
    }
    fields.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw ParseError(table.source, line, "unexpected quote inside field");
        }
        in_quotes = true;
        field_was_quoted = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        if (field_was_quoted) {
          throw ParseError(table.source, line, "text after closing quote");
        }
        field.push_back(c);
        record_has_content = true;
    }
  }
  if (in_quotes) throw ParseError(table.source, line, "unterminated quoted field");
  if (record_has_content || !field.empty()) end_record();

  if (records.empty()) throw ParseError(table.source, 1, "empty file (no header)");
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size()) {
      throw ParseError(table.source, record_lines[r],
                       "expected " + std::to_string(table.header.size()) +
                           " fields, found " + std::to_string(records[r].size()));
    }
    table.rows.push_back({record_lines[r], std::move(records[r])});
  }
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

Table read_file(const std::filesystem::path& path) {
  return parse(read_text(path), path.string());
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    const auto& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out += f;
      continue;
    }
    out.push_back('"');
    for (char c : f) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
  }
  out.push_back('\n');
}

std::string format_double(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, const std::string& source,
                    std::size_t line) {
  if (field == "NaN" || field == "nan" || field == "NA") return std::nan("");
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != last) {
    throw ParseError(source, line, "invalid number '" + std::string(field) + "'");
  }
  return value;
}

long long parse_int(std::string_view field, const std::string& source,
                    std::size_t line) {
  long long value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw ParseError(source, line, "invalid integer '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace tmeval::csv
