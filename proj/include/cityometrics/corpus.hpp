#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cityometrics/affiliation.hpp"
#include "cityometrics/csv.hpp"
#include "cityometrics/errors.hpp"
#include "cityometrics/hash.hpp"
#include "cityometrics/json_min.hpp"
#include "cityometrics/parallel.hpp"
#include "cityometrics/text.hpp"

namespace cityom {

struct PublicationRecord {
  std::string id;
  int year = 0;
  std::vector<AffiliationEntry> affiliations;

  // ingestion provenance; not serialized, not part of record identity
  int source_index = -1;
  long line_no = 0;

  friend bool operator==(const PublicationRecord& a, const PublicationRecord& b) {
    return a.id == b.id && a.year == b.year && a.affiliations == b.affiliations;
  }
};

struct UnresolvedRef {
  std::string record_id;
  int affiliation_index = 0;
  std::string reason;

  friend bool operator==(const UnresolvedRef&, const UnresolvedRef&) = default;
  friend bool operator<(const UnresolvedRef& a, const UnresolvedRef& b) {
    return std::tie(a.record_id, a.affiliation_index, a.reason) <
           std::tie(b.record_id, b.affiliation_index, b.reason);
  }
};

struct QuarantineLine {
  std::string source;
  long line_no = 0;
  std::string record_id;  // empty when the id could not be read
  std::string reason;

  friend bool operator<(const QuarantineLine& a, const QuarantineLine& b) {
    return std::tie(a.source, a.line_no) < std::tie(b.source, b.line_no);
  }
};

struct Corpus {
  std::vector<PublicationRecord> records;   // canonical order: sorted by id
  std::vector<UnresolvedRef> unresolved;    // sorted
  std::vector<QuarantineLine> quarantine;   // sorted by (source, line)
  std::vector<std::string> sources;
  int year_min = 0;
  int year_max = 0;

  bool empty() const { return records.empty(); }

  const PublicationRecord* find(std::string_view id) const {
    auto it = std::lower_bound(records.begin(), records.end(), id,
                               [](const PublicationRecord& r, std::string_view v) { return r.id < v; });
    return (it != records.end() && it->id == id) ? &*it : nullptr;
  }

  // Record-level equality; provenance and quarantine bookkeeping excluded.
  bool same_records(const Corpus& other) const {
    return records == other.records && year_min == other.year_min && year_max == other.year_max;
  }
};

enum class CorpusFormat { jsonl, csv };

inline CorpusFormat corpus_format_from_string(std::string_view s) {
  std::string v = text::to_lower(s);
  if (v == "jsonl") return CorpusFormat::jsonl;
  if (v == "csv") return CorpusFormat::csv;
  throw ConfigError({"unknown corpus format '" + std::string(s) + "' (expected jsonl or csv)"});
}

namespace detail {

// Build the record's entry list from raw affiliation strings: split on
// semicolons (multiple addresses in one field), parse each, collapse
// exact duplicates, and record parse failures as unresolved entries.
inline void add_raw_affiliations(std::string_view raw_field, std::vector<AffiliationEntry>& out) {
  for (std::string_view piece : text::split(raw_field, ';')) {
    std::string_view t = text::trim(piece);
    if (t.empty()) continue;
    AffiliationParse p = parse_affiliation(t);
    if (p.entry) {
      out.push_back(std::move(*p.entry));
    } else {
      AffiliationEntry failed;
      failed.raw = std::string(t);
      out.push_back(std::move(failed));
    }
  }
}

inline void collapse_duplicates(std::vector<AffiliationEntry>& entries) {
  std::vector<AffiliationEntry> kept;
  kept.reserve(entries.size());
  for (auto& e : entries) {
    bool dup = false;
    for (const auto& k : kept)
      if (k == e) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(std::move(e));
  }
  entries = std::move(kept);
}

struct LineResult {
  bool ok = false;
  PublicationRecord record;
  std::string error;   // set when !ok
  std::string record_id;  // best-effort id for quarantine rows
};

// Fast-path scan of one JSONL record; returns false when the line does
// not match the expected shape (caller falls back to the JSON library).
inline bool scan_record_line(std::string_view line, LineResult& out) {
  jsonmin::Cursor c{line.data(), line.data() + line.size()};
  if (!c.consume('{')) return false;
  bool have_id = false, have_year = false, have_affs = false;
  std::string key;
  if (!c.peek('}')) {
    do {
      if (!jsonmin::parse_string(c, key)) return false;
      if (!c.consume(':')) return false;
      if (key == "id") {
        if (!jsonmin::parse_string(c, out.record.id)) return false;
        have_id = true;
      } else if (key == "year") {
        long long y;
        if (!jsonmin::parse_int(c, y)) return false;
        out.record.year = static_cast<int>(y);
        have_year = true;
      } else if (key == "affiliations") {
        if (!c.consume('[')) return false;
        have_affs = true;
        if (!c.peek(']')) {
          do {
            if (!c.consume('{')) return false;
            AffiliationEntry e;
            std::string raw;
            bool structured = false, have_raw = false;
            if (!c.peek('}')) {
              do {
                std::string k2;
                if (!jsonmin::parse_string(c, k2)) return false;
                if (!c.consume(':')) return false;
                if (k2 == "raw") {
                  if (!jsonmin::parse_string(c, raw)) return false;
                  have_raw = true;
                } else if (k2 == "institution") {
                  if (!jsonmin::parse_string(c, e.institution)) return false;
                } else if (k2 == "locality") {
                  if (!jsonmin::parse_string(c, e.locality_name)) return false;
                } else if (k2 == "admin") {
                  if (!jsonmin::parse_string(c, e.admin_name)) return false;
                } else if (k2 == "country") {
                  if (!jsonmin::parse_string(c, e.country_name)) return false;
                  structured = true;
                } else if (k2 == "resolved") {
                  if (!jsonmin::parse_string(c, e.resolved_locality)) return false;
                } else {
                  if (!jsonmin::skip_value(c)) return false;
                }
              } while (c.consume(','));
            }
            if (!c.consume('}')) return false;
            if (structured) {
              if (e.country_name.empty()) {
                out.error = "structured affiliation has empty 'country'";
                out.record_id = out.record.id;
                return true;
              }
              e.raw = std::move(raw);
              out.record.affiliations.push_back(std::move(e));
            } else if (have_raw) {
              add_raw_affiliations(raw, out.record.affiliations);
            } else {
              out.error = "affiliation object has neither 'raw' nor structured fields";
              out.record_id = out.record.id;
              return true;  // scanned fine, semantically malformed
            }
          } while (c.consume(','));
        }
        if (!c.consume(']')) return false;
      } else {
        if (!jsonmin::skip_value(c)) return false;
      }
    } while (c.consume(','));
  }
  if (!c.consume('}')) return false;
  c.skip_ws();
  if (!c.at_end()) return false;

  out.record_id = out.record.id;
  if (!have_id || out.record.id.empty()) {
    out.error = "missing or empty 'id'";
    return true;
  }
  if (!have_year) {
    out.error = "missing 'year'";
    return true;
  }
  if (!have_affs || out.record.affiliations.empty()) {
    out.error = "empty 'affiliations'";
    return true;
  }
  collapse_duplicates(out.record.affiliations);
  out.ok = true;
  return true;
}

// Full-fidelity fallback used when the fast path rejects a line.
inline void parse_record_line_json(std::string_view line, LineResult& out) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    out.error = "not a JSON object";
    return;
  }
  if (j.contains("id") && j["id"].is_string()) out.record_id = j["id"].get<std::string>();
  if (out.record_id.empty()) {
    out.error = "missing or empty 'id'";
    return;
  }
  if (!j.contains("year") || !j["year"].is_number_integer()) {
    out.error = "missing 'year'";
    return;
  }
  if (!j.contains("affiliations") || !j["affiliations"].is_array() || j["affiliations"].empty()) {
    out.error = "empty 'affiliations'";
    return;
  }
  out.record.id = out.record_id;
  out.record.year = j["year"].get<int>();
  for (const auto& a : j["affiliations"]) {
    if (!a.is_object()) {
      out.error = "affiliation is not an object";
      return;
    }
    if (a.contains("country") && a["country"].is_string()) {
      AffiliationEntry e;
      auto get = [&](const char* k) -> std::string {
        return a.contains(k) && a[k].is_string() ? a[k].get<std::string>() : std::string();
      };
      e.raw = get("raw");
      e.institution = get("institution");
      e.locality_name = get("locality");
      e.admin_name = get("admin");
      e.country_name = get("country");
      e.resolved_locality = get("resolved");
      if (e.country_name.empty()) {
        out.error = "structured affiliation has empty 'country'";
        return;
      }
      out.record.affiliations.push_back(std::move(e));
    } else if (a.contains("raw") && a["raw"].is_string()) {
      add_raw_affiliations(a["raw"].get<std::string>(), out.record.affiliations);
    } else {
      out.error = "affiliation object has neither 'raw' nor structured fields";
      return;
    }
  }
  if (out.record.affiliations.empty()) {
    out.error = "empty 'affiliations'";
    return;
  }
  collapse_duplicates(out.record.affiliations);
  out.ok = true;
}

inline LineResult parse_record_line(std::string_view line) {
  LineResult r;
  if (scan_record_line(line, r)) return r;
  r = LineResult{};
  parse_record_line_json(line, r);
  return r;
}

inline LineResult parse_csv_record(std::string_view line) {
  LineResult r;
  std::vector<std::string> fields;
  std::string err;
  if (!csv::parse_line(line, fields, &err)) {
    r.error = err;
    return r;
  }
  if (fields.size() != 3) {
    r.error = "expected 3 columns id,year,raw_affiliations";
    return r;
  }
  r.record_id = fields[0];
  if (fields[0].empty()) {
    r.error = "missing or empty 'id'";
    return r;
  }
  char* endp = nullptr;
  long y = std::strtol(fields[1].c_str(), &endp, 10);
  if (endp == fields[1].c_str() || *endp != '\0') {
    r.error = "year is not an integer";
    return r;
  }
  r.record.id = fields[0];
  r.record.year = static_cast<int>(y);
  add_raw_affiliations(fields[2], r.record.affiliations);
  if (r.record.affiliations.empty()) {
    r.error = "empty 'affiliations'";
    return r;
  }
  collapse_duplicates(r.record.affiliations);
  r.ok = true;
  return r;
}

struct IngestPartial {
  std::vector<PublicationRecord> records;
  std::vector<QuarantineLine> quarantine;
};

}  // namespace detail

// Finalize after all files are merged: canonical record order, parse
// failures recorded, duplicate ids rejected, year range computed.
inline void finalize_corpus(Corpus& corpus) {
  std::stable_sort(corpus.records.begin(), corpus.records.end(),
                   [](const PublicationRecord& a, const PublicationRecord& b) { return a.id < b.id; });

  std::vector<std::string> dups;
  for (size_t i = 1; i < corpus.records.size(); ++i) {
    const auto& a = corpus.records[i - 1];
    const auto& b = corpus.records[i];
    if (a.id == b.id) {
      auto where = [&](const PublicationRecord& r) {
        std::string src = (r.source_index >= 0 && r.source_index < (int)corpus.sources.size())
                              ? corpus.sources[r.source_index]
                              : std::string("<memory>");
        return src + ":" + std::to_string(r.line_no);
      };
      dups.push_back("duplicate id '" + a.id + "' (" + where(a) + " and " + where(b) + ")");
    }
  }
  if (!dups.empty()) {
    std::string msg;
    for (size_t i = 0; i < dups.size(); ++i) {
      if (i) msg += "; ";
      msg += dups[i];
    }
    throw DuplicateIdError(msg);
  }

  // parse failures -> unresolved refs (quarantined, not dropped)
  std::vector<UnresolvedRef> parse_refs;
  for (const auto& r : corpus.records)
    for (size_t i = 0; i < r.affiliations.size(); ++i)
      if (!r.affiliations[i].parsed())
        parse_refs.push_back({r.id, static_cast<int>(i),
                              "parse: fewer than 2 segments; no country separable"});
  // keep any resolve-stage refs that were already present
  for (auto& u : corpus.unresolved)
    if (!text::starts_with(u.reason, "parse:")) parse_refs.push_back(std::move(u));
  std::sort(parse_refs.begin(), parse_refs.end());
  corpus.unresolved = std::move(parse_refs);

  std::sort(corpus.quarantine.begin(), corpus.quarantine.end());

  corpus.year_min = corpus.year_max = 0;
  bool first = true;
  for (const auto& r : corpus.records) {
    if (first) {
      corpus.year_min = corpus.year_max = r.year;
      first = false;
    } else {
      corpus.year_min = std::min(corpus.year_min, r.year);
      corpus.year_max = std::max(corpus.year_max, r.year);
    }
  }
}

// Ingest one or more corpus files. Chunked parallel parsing with an
// in-order merge; the result is identical to sequential ingestion and to
// ingestion of the same lines in any order or file split.
inline Corpus ingest(const std::vector<std::string>& paths, CorpusFormat format,
                     unsigned threads = 1) {
  Corpus corpus;
  corpus.sources = paths;

  constexpr size_t kChunk = 2048;
  for (size_t src = 0; src < paths.size(); ++src) {
    std::ifstream in(paths[src], std::ios::binary);
    if (!in) throw IoError("cannot open corpus file " + paths[src]);

    // stream the file in chunk batches so peak memory stays bounded
    std::vector<std::pair<long, std::string>> lines;  // (line_no, text)
    lines.reserve(kChunk * 4);
    long line_no = 0;
    bool csv_header_checked = false;
    std::string line;

    auto flush = [&]() {
      if (lines.empty()) return;
      auto partial = chunked_fold<detail::IngestPartial>(
          lines.size(), kChunk, threads,
          [&](size_t begin, size_t end) {
            detail::IngestPartial p;
            for (size_t i = begin; i < end; ++i) {
              detail::LineResult r = (format == CorpusFormat::jsonl)
                                         ? detail::parse_record_line(lines[i].second)
                                         : detail::parse_csv_record(lines[i].second);
              if (r.ok) {
                r.record.source_index = static_cast<int>(src);
                r.record.line_no = lines[i].first;
                p.records.push_back(std::move(r.record));
              } else {
                p.quarantine.push_back({paths[src], lines[i].first, r.record_id, r.error});
              }
            }
            return p;
          },
          [](detail::IngestPartial& acc, detail::IngestPartial&& next) {
            std::move(next.records.begin(), next.records.end(), std::back_inserter(acc.records));
            std::move(next.quarantine.begin(), next.quarantine.end(),
                      std::back_inserter(acc.quarantine));
          });
      std::move(partial.records.begin(), partial.records.end(),
                std::back_inserter(corpus.records));
      std::move(partial.quarantine.begin(), partial.quarantine.end(),
                std::back_inserter(corpus.quarantine));
      lines.clear();
    };

    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (format == CorpusFormat::csv && !csv_header_checked) {
        csv_header_checked = true;
        if (line == "id,year,raw_affiliations") continue;
      }
      lines.emplace_back(line_no, line);
      if (lines.size() >= kChunk * 8) flush();
    }
    flush();
  }

  finalize_corpus(corpus);
  return corpus;
}

inline Corpus ingest(const std::string& path, CorpusFormat format, unsigned threads = 1) {
  return ingest(std::vector<std::string>{path}, format, threads);
}

// One canonical JSONL line per record. Parsed entries carry raw +
// structured fields (re-ingest bypasses the parser, so round-trips are
// field-for-field); unparsed entries carry raw only.
inline std::string record_to_jsonl(const PublicationRecord& r) {
  std::string out;
  out.reserve(128 + r.affiliations.size() * 96);
  out += "{\"id\":\"";
  jsonmin::escape_to(out, r.id);
  out += "\",\"year\":";
  out += std::to_string(r.year);
  out += ",\"affiliations\":[";
  for (size_t i = 0; i < r.affiliations.size(); ++i) {
    const auto& a = r.affiliations[i];
    if (i) out.push_back(',');
    out.push_back('{');
    bool first = true;
    auto field = [&](const char* key, const std::string& val) {
      if (val.empty()) return;
      if (!first) out.push_back(',');
      first = false;
      out.push_back('"');
      out += key;
      out += "\":\"";
      jsonmin::escape_to(out, val);
      out.push_back('"');
    };
    field("raw", a.raw);
    if (a.parsed()) {
      field("institution", a.institution);
      field("locality", a.locality_name);
      field("admin", a.admin_name);
      field("country", a.country_name);
      field("resolved", a.resolved_locality);
    }
    out.push_back('}');
  }
  out += "]}";
  return out;
}

inline std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& r : corpus.records) {
    out += record_to_jsonl(r);
    out.push_back('\n');
  }
  return out;
}

// Content hash over canonical record order; stamped into every report so
// mismatched inputs are detectable.
inline std::string corpus_hash(const Corpus& corpus) {
  Fnv1a64 h;
  h.update_u64(corpus.records.size());
  for (const auto& r : corpus.records) {
    h.update(r.id);
    h.update_u64(static_cast<uint64_t>(static_cast<int64_t>(r.year)));
    h.update_u64(r.affiliations.size());
    for (const auto& a : r.affiliations) {
      h.update(a.raw);
      h.update("\x1f");
      h.update(a.institution);
      h.update("\x1f");
      h.update(a.locality_name);
      h.update("\x1f");
      h.update(a.admin_name);
      h.update("\x1f");
      h.update(a.country_name);
      h.update("\x1f");
      h.update(a.resolved_locality);
      h.update("\x1e");
    }
  }
  return h.hex();
}

}  // namespace cityom
