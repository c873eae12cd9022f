#pragma once

#include <string>
#include <vector>

namespace lngp {

// Minimal CSV support for the table formats this project reads and writes.
// Fields never contain commas, quotes, or newlines, so no quoting layer is
// needed; a stray quoted field in input is treated as malformed.

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a named column; throws ValidationError if absent.
  std::size_t column(const std::string& name) const;
};

// Read a whole CSV file. Throws ValidationError on missing file, ragged
// rows, or an empty header.
CsvTable read_csv(const std::string& path);

// Format a double with 17 significant digits (round-trips exactly through
// strtod), trimming none.
std::string format_double(double value);

// Writer that accumulates rows and flushes to disk atomically-ish (write
// then rename is overkill here; a plain stream write is used).
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  // Convenience: formats all values with format_double.
  void add_row(const std::vector<double>& values);

  // Write to path; throws Error on I/O failure.
  void write(const std::string& path) const;

  std::size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace lngp
