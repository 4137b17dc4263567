#include "barrier/csv.hpp"

#include "barrier/error.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace barrier::csv {

std::vector<Record> parse(std::string_view content) {
  if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);

  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes an empty line from an empty field
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields[0].empty() && !field_started;
    if (!blank) records.push_back(std::move(current));
    current = Record{};
    field_started = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
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
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') break;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        current.line = line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) {
    throw Error(Errc::MalformedRow, "unterminated quoted field starting on line " +
                                        std::to_string(current.line));
  }
  if (field_started || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

Table::Table(std::vector<std::string> header, std::vector<Record> rows)
    : header_(std::move(header)), rows_(std::move(rows)) {}

std::optional<std::size_t> Table::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
  if (auto idx = find_column(name)) return *idx;
  throw Error(Errc::MissingColumn, "missing column: " + std::string(name));
}

Table parse_table(std::string_view content, std::string_view source_name) {
  auto records = parse(content);
  if (records.empty()) {
    throw Error(Errc::MalformedRow, std::string(source_name) + ": missing header row");
  }
  std::vector<std::string> header;
  for (auto& f : records.front().fields) {
    // tolerate stray whitespace around header names
    auto b = f.find_first_not_of(" \t");
    auto e = f.find_last_not_of(" \t");
    header.push_back(b == std::string::npos ? std::string{} : f.substr(b, e - b + 1));
  }
  std::vector<Record> rows(std::make_move_iterator(records.begin() + 1),
                           std::make_move_iterator(records.end()));
  for (const auto& r : rows) {
    if (r.fields.size() != header.size()) {
      throw Error(Errc::MalformedRow, std::string(source_name) + ": line " +
                                          std::to_string(r.line) + " has " +
                                          std::to_string(r.fields.size()) + " fields, expected " +
                                          std::to_string(header.size()));
    }
  }
  return Table(std::move(header), std::move(rows));
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::NotFound, path.string() + ": not found");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_table(buf.str(), path.string());
}

std::string quote_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote_field(fields[i]);
  }
  out << '\n';
}

}  // namespace barrier::csv
