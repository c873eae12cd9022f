#include "lngp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lngp/common.hpp"

namespace lngp {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ValidationError("CSV is missing required column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV file: " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("CSV file is empty: " + path);
  table.header = split_line(line);
  if (table.header.size() == 1 && table.header[0].empty())
    throw ValidationError("CSV header is empty: " + path);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != table.header.size())
      throw ValidationError("CSV row " + std::to_string(lineno) + " in " +
                            path + " has " + std::to_string(fields.size()) +
                            " fields, expected " +
                            std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header)
    : header_(std::move(header)) {
  if (header_.empty()) throw Error("CsvWriter: header must be non-empty");
}

void CsvWriter::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw Error("CsvWriter: row width " + std::to_string(row.size()) +
                " does not match header width " +
                std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

void CsvWriter::add_row(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_double(v));
  add_row(std::move(row));
}

void CsvWriter::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot open file for writing: " + path);
  std::ostringstream body;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) body << ',';
    body << header_[i];
  }
  body << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) body << ',';
      body << row[i];
    }
    body << '\n';
  }
  out << body.str();
  if (!out) throw Error("failed writing file: " + path);
}

}  // namespace lngp
