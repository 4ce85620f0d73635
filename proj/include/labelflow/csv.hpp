#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labelflow {

// RFC 4180 style: fields quoted only when they contain a comma, quote, CR or LF.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const;
  // Throws std::runtime_error naming the missing column.
  std::size_t require_column(std::string_view name) const;
};

// Throws std::runtime_error on unterminated quotes or ragged rows.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv_file(const std::string& path);

}  // namespace labelflow
