#include "floodtext/csv.hpp"

#include <istream>
#include <ostream>

#include "floodtext/error.hpp"

namespace floodtext {

bool CsvReader::next(CsvRecord& out) {
  out.fields.clear();
  out.line = line_;

  std::string field;
  bool in_quotes = false;
  bool saw_any = false;
  bool field_quoted = false;

  int ci;
  while ((ci = in_.get()) != std::char_traits<char>::eof()) {
    const char c = static_cast<char>(ci);
    saw_any = true;

    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(c);
      }
      continue;
    }

    switch (c) {
      case '"':
        if (field.empty() && !field_quoted) {
          in_quotes = true;
          field_quoted = true;
        } else {
          throw RowError(out.line, "stray quote inside unquoted field");
        }
        break;
      case ',':
        out.fields.push_back(std::move(field));
        field.clear();
        field_quoted = false;
        break;
      case '\r':
        break;
      case '\n':
        ++line_;
        out.fields.push_back(std::move(field));
        return true;
      default:
        field.push_back(c);
    }
  }

  if (in_quotes) {
    throw RowError(out.line, "unterminated quoted field");
  }
  if (!saw_any) {
    return false;
  }
  out.fields.push_back(std::move(field));
  return true;
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = false;
  for (char c : field) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      needs_quotes = true;
      break;
    }
  }
  if (!needs_quotes) return field;

  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

}  // namespace floodtext
