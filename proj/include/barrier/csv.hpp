#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace barrier::csv {

/// One parsed record with the 1-based physical line it started on.
struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines,
/// CRLF or LF line ends. A UTF-8 BOM on the first line is skipped.
std::vector<Record> parse(std::string_view content);

/// Header-indexed table.
class Table {
 public:
  Table() = default;
  Table(std::vector<std::string> header, std::vector<Record> rows);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Record>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  std::optional<std::size_t> find_column(std::string_view name) const;
  /// Throws Error(MissingColumn) naming the column.
  std::size_t require_column(std::string_view name) const;

 private:
  std::vector<std::string> header_;
  std::vector<Record> rows_;
};

/// Reads a file whose first record is the header. Blank lines are skipped;
/// rows whose width differs from the header throw Error(MalformedRow).
/// A missing file throws Error(NotFound).
Table read_table(const std::filesystem::path& path);
Table parse_table(std::string_view content, std::string_view source_name);

std::string quote_field(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace barrier::csv
