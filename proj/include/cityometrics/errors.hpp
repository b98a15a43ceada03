#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cityom {

// Base for all toolkit errors. `kind()` is the stable machine-readable
// identifier emitted in the CLI's error JSON.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

private:
  std::string kind_;
};

class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error("io", msg) {}
};

class SchemaError : public Error {
public:
  SchemaError(const std::string& msg, long row)
      : Error("schema", msg + " (row " + std::to_string(row) + ")"), row_(row) {}
  long row() const { return row_; }

private:
  long row_;
};

class DuplicateKeyError : public Error {
public:
  DuplicateKeyError(const std::string& msg, long first_row, long second_row)
      : Error("duplicate_key", msg + " (rows " + std::to_string(first_row) + " and " +
                                   std::to_string(second_row) + ")"),
        first_row_(first_row), second_row_(second_row) {}
  long first_row() const { return first_row_; }
  long second_row() const { return second_row_; }

private:
  long first_row_;
  long second_row_;
};

class DanglingReferenceError : public Error {
public:
  DanglingReferenceError(const std::string& msg, long row)
      : Error("dangling_reference", msg + " (row " + std::to_string(row) + ")"), row_(row) {}
  long row() const { return row_; }

private:
  long row_;
};

class DuplicateIdError : public Error {
public:
  explicit DuplicateIdError(const std::string& msg) : Error("duplicate_id", msg) {}
};

class EmptyTierError : public Error {
public:
  explicit EmptyTierError(const std::string& msg) : Error("empty_tier", msg) {}
};

class MissingPopulationError : public Error {
public:
  explicit MissingPopulationError(const std::string& msg) : Error("missing_population", msg) {}
};

class GazetteerMismatchError : public Error {
public:
  explicit GazetteerMismatchError(const std::string& msg) : Error("gazetteer_mismatch", msg) {}
};

class UnresolvedAffiliationsError : public Error {
public:
  UnresolvedAffiliationsError(const std::string& msg, long unresolved, long total)
      : Error("unresolved_affiliations", msg), unresolved_(unresolved), total_(total) {}
  long unresolved() const { return unresolved_; }
  long total() const { return total_; }

private:
  long unresolved_;
  long total_;
};

class UnknownInstitutionError : public Error {
public:
  explicit UnknownInstitutionError(const std::string& msg) : Error("unknown_institution", msg) {}
};

class UnknownMetroError : public Error {
public:
  explicit UnknownMetroError(const std::string& msg) : Error("unknown_metro", msg) {}
};

class UnknownUnitError : public Error {
public:
  explicit UnknownUnitError(const std::string& msg) : Error("unknown_unit", msg) {}
};

class ReportMismatchError : public Error {
public:
  explicit ReportMismatchError(const std::string& msg) : Error("report_mismatch", msg) {}
};

class EmptyCorpusError : public Error {
public:
  explicit EmptyCorpusError(const std::string& msg) : Error("empty_corpus", msg) {}
};

// Collects every violation, not just the first.
class ConfigError : public Error {
public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error("config", join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace cityom
