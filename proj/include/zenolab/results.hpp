#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace zenolab {

enum class ColumnType { Real, Int, Bool, String };

const char* to_string(ColumnType type);

struct Column {
  std::string name;
  ColumnType type = ColumnType::Real;
};

using Cell = std::variant<double, long long, bool, std::string>;

class ResultTable {
 public:
  ResultTable() = default;
  explicit ResultTable(std::vector<Column> columns);

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }

  /// Rejects rows whose length or cell types disagree with the columns.
  void add_row(std::vector<Cell> row);
  /// Inserts, or replaces the value of an existing key in place.
  void set_metadata(const std::string& key, std::string value);
  void erase_metadata(const std::string& key);
  const std::string* find_metadata(const std::string& key) const;

  std::size_t column_index(const std::string& name) const;

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, std::string>> metadata_;
};

/// %.17g; non-finite values become "inf", "-inf" and "nan".
std::string format_real(double x);

std::string to_csv(const ResultTable& table);
std::string to_json(const ResultTable& table);

enum class TableFormat { Csv, Json };

/// Writes the table to `path`, or to stdout when path is "-". Throws IoError.
void emit(const ResultTable& table, TableFormat format, const std::filesystem::path& path);

/// Parses text produced by to_json back into a table.
ResultTable parse_json_table(const std::string& text);

}  // namespace zenolab
