#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cityometrics/errors.hpp"

namespace cityom::csv {

// RFC-4180-style field splitting: double quotes guard commas, doubled
// quotes escape themselves. Returns false with *error set on unbalanced
// quoting (caller decides whether that quarantines or aborts).
inline bool parse_line(std::string_view line, std::vector<std::string>& fields,
                       std::string* error = nullptr) {
  fields.clear();
  std::string cur;
  bool in_quotes = false;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\r' && i + 1 == line.size()) {
      // tolerate CRLF input
    } else {
      cur.push_back(c);
    }
    ++i;
  }
  if (in_quotes) {
    if (error) *error = "unbalanced quote";
    return false;
  }
  fields.push_back(std::move(cur));
  return true;
}

inline std::string escape_field(std::string_view f) {
  bool needs_quotes = f.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(f);
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape_field(fields[i]);
  }
  return out;
}

// Line-oriented CSV reader. Lines beginning with '#' are header-block
// comments and are skipped; line numbers refer to the physical file.
class Reader {
public:
  explicit Reader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open " + path);
  }

  // Next data row. Malformed quoting raises SchemaError.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.empty() || line[0] == '#') continue;
      std::string err;
      if (!parse_line(line, fields, &err)) throw SchemaError(path_ + ": " + err, line_no_);
      return true;
    }
    return false;
  }

  long line_no() const { return line_no_; }
  const std::string& path() const { return path_; }

private:
  std::string path_;
  std::ifstream in_;
  long line_no_ = 0;
};

// Buffered writer; `str()` gives the full artifact body so callers can
// write it atomically.
class Writer {
public:
  void comment(std::string_view key, std::string_view value) {
    buf_ << "# " << key << "=" << value << "\n";
  }
  void raw_comment(std::string_view text) { buf_ << "# " << text << "\n"; }
  void row(const std::vector<std::string>& fields) { buf_ << join_row(fields) << "\n"; }
  std::string str() const { return buf_.str(); }

private:
  std::ostringstream buf_;
};

}  // namespace cityom::csv
