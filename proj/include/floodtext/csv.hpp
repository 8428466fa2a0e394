#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace floodtext {

// One CSV record plus the 1-based physical line its first character sits on.
struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// Incremental RFC-4180 reader: quoted fields, doubled-quote escapes, and
// embedded newlines inside quotes. Accepts both LF and CRLF endings.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Returns false once the stream is exhausted.
  bool next(CsvRecord& out);

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace floodtext
