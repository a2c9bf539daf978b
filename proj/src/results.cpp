#include "zenolab/results.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "zenolab/errors.hpp"

namespace zenolab {

using json = nlohmann::ordered_json;

const char* to_string(ColumnType type) {
  switch (type) {
    case ColumnType::Real: return "real";
    case ColumnType::Int: return "int";
    case ColumnType::Bool: return "bool";
    case ColumnType::String: return "string";
  }
  return "?";
}

namespace {

bool matches(const Cell& c, ColumnType t) {
  switch (t) {
    case ColumnType::Real: return std::holds_alternative<double>(c);
    case ColumnType::Int: return std::holds_alternative<long long>(c);
    case ColumnType::Bool: return std::holds_alternative<bool>(c);
    case ColumnType::String: return std::holds_alternative<std::string>(c);
  }
  return false;
}

std::string cell_text(const Cell& c) {
  if (const double* x = std::get_if<double>(&c)) return format_real(*x);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const bool* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return std::get<std::string>(c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

std::string json_string(const std::string& s) {
  return json(s).dump();
}

}  // namespace

ResultTable::ResultTable(std::vector<Column> columns) : columns_(std::move(columns)) {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (columns_[i].name == columns_[j].name) throw ValidationError("duplicate column " + columns_[i].name);
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size())
    throw ValidationError("row has " + std::to_string(row.size()) + " cells, table has " +
                          std::to_string(columns_.size()) + " columns");
  for (std::size_t i = 0; i < row.size(); ++i)
    if (!matches(row[i], columns_[i].type))
      throw ValidationError("cell type mismatch in column " + columns_[i].name);
  rows_.push_back(std::move(row));
}

void ResultTable::set_metadata(const std::string& key, std::string value) {
  for (auto& kv : metadata_)
    if (kv.first == key) {
      kv.second = std::move(value);
      return;
    }
  metadata_.emplace_back(key, std::move(value));
}

void ResultTable::erase_metadata(const std::string& key) {
  std::erase_if(metadata_, [&](const auto& kv) { return kv.first == key; });
}

const std::string* ResultTable::find_metadata(const std::string& key) const {
  for (const auto& kv : metadata_)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

std::size_t ResultTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  throw ValidationError("no column named " + name);
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (const auto& [k, v] : table.metadata()) out += "# " + one_line(k) + "=" + one_line(v) + "\n";
  for (std::size_t i = 0; i < table.columns().size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.columns()[i].name);
  }
  out += '\n';
  for (const auto& row : table.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cell_text(row[i]));
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const ResultTable& table) {
  std::string out = "{\"metadata\":{";
  bool first = true;
  for (const auto& [k, v] : table.metadata()) {
    if (!first) out += ',';
    first = false;
    out += json_string(k) + ":" + json_string(v);
  }
  out += "},\"columns\":[";
  for (std::size_t i = 0; i < table.columns().size(); ++i) {
    if (i) out += ',';
    out += "{\"name\":" + json_string(table.columns()[i].name) + ",\"type\":\"" +
           to_string(table.columns()[i].type) + "\"}";
  }
  out += "],\"rows\":[";
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    if (r) out += ',';
    out += '[';
    const auto& row = table.rows()[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const double* x = std::get_if<double>(&row[i]))
        out += std::isfinite(*x) ? format_real(*x) : "\"" + format_real(*x) + "\"";
      else if (const std::string* s = std::get_if<std::string>(&row[i]))
        out += json_string(*s);
      else
        out += cell_text(row[i]);
    }
    out += ']';
  }
  out += "]}\n";
  return out;
}

void emit(const ResultTable& table, TableFormat format, const std::filesystem::path& path) {
  const std::string text = format == TableFormat::Csv ? to_csv(table) : to_json(table);
  if (path == "-") {
    std::cout << text << std::flush;
    if (!std::cout) throw IoError("failed to write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed to write " + path.string());
}

ResultTable parse_json_table(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("result table is not valid JSON: ") + e.what());
  }
  try {
    std::vector<Column> columns;
    for (const auto& c : doc.at("columns")) {
      const std::string type = c.at("type").get<std::string>();
      ColumnType t;
      if (type == "real")
        t = ColumnType::Real;
      else if (type == "int")
        t = ColumnType::Int;
      else if (type == "bool")
        t = ColumnType::Bool;
      else if (type == "string")
        t = ColumnType::String;
      else
        throw ValidationError("unknown column type " + type);
      columns.push_back({c.at("name").get<std::string>(), t});
    }
    ResultTable table(columns);
    for (const auto& [k, v] : doc.at("metadata").items()) table.set_metadata(k, v.get<std::string>());
    for (const auto& row : doc.at("rows")) {
      std::vector<Cell> cells;
      for (std::size_t i = 0; i < row.size() && i < columns.size(); ++i) {
        const json& v = row[i];
        switch (columns[i].type) {
          case ColumnType::Real:
            if (v.is_string()) {
              const std::string s = v.get<std::string>();
              if (s == "inf")
                cells.emplace_back(HUGE_VAL);
              else if (s == "-inf")
                cells.emplace_back(-HUGE_VAL);
              else if (s == "nan")
                cells.emplace_back(std::nan(""));
              else
                throw ValidationError("bad real value " + s);
            } else {
              cells.emplace_back(v.get<double>());
            }
            break;
          case ColumnType::Int: cells.emplace_back(v.get<long long>()); break;
          case ColumnType::Bool: cells.emplace_back(v.get<bool>()); break;
          case ColumnType::String: cells.emplace_back(v.get<std::string>()); break;
        }
      }
      if (row.size() != columns.size()) throw ValidationError("row length differs from column count");
      table.add_row(std::move(cells));
    }
    return table;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed result table: ") + e.what());
  }
}

}  // namespace zenolab
