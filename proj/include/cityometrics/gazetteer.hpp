#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cityometrics/affiliation.hpp"
#include "cityometrics/corpus.hpp"
#include "cityometrics/csv.hpp"
#include "cityometrics/errors.hpp"
#include "cityometrics/text.hpp"

namespace cityom {

enum class SettlementType {
  city,
  town,
  borough,
  township,
  village,
  hamlet,
  census_designated_place,
  district,
  other
};

inline std::string to_string(SettlementType t) {
  switch (t) {
    case SettlementType::city: return "city";
    case SettlementType::town: return "town";
    case SettlementType::borough: return "borough";
    case SettlementType::township: return "township";
    case SettlementType::village: return "village";
    case SettlementType::hamlet: return "hamlet";
    case SettlementType::census_designated_place: return "census_designated_place";
    case SettlementType::district: return "district";
    case SettlementType::other: return "other";
  }
  return "other";
}

inline std::optional<SettlementType> settlement_type_from_string(std::string_view s) {
  std::string v = text::to_lower(s);
  if (v == "city") return SettlementType::city;
  if (v == "town") return SettlementType::town;
  if (v == "borough") return SettlementType::borough;
  if (v == "township") return SettlementType::township;
  if (v == "village") return SettlementType::village;
  if (v == "hamlet") return SettlementType::hamlet;
  if (v == "census_designated_place" || v == "cdp") return SettlementType::census_designated_place;
  if (v == "district") return SettlementType::district;
  if (v == "other") return SettlementType::other;
  return std::nullopt;
}

struct Locality {
  std::string id;
  std::string name;
  std::vector<std::string> alt_names;
  std::string admin_name;  // empty = absent
  std::string country;
  double lat = 0.0;
  double lon = 0.0;
  std::optional<int64_t> population;
  SettlementType settlement_type = SettlementType::other;
};

struct Institution {
  std::string id;
  std::string name;
  std::vector<std::string> alt_names;
  std::string hq_locality;
};

// Great-circle distance, mean Earth radius 6371.0088 km.
inline double distance_km(const Locality& a, const Locality& b) {
  constexpr double kEarthRadiusKm = 6371.0088;
  constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
  if (a.lat == b.lat && a.lon == b.lon) return 0.0;
  double phi1 = a.lat * kDegToRad;
  double phi2 = b.lat * kDegToRad;
  double dphi = (b.lat - a.lat) * kDegToRad;
  double dlambda = (b.lon - a.lon) * kDegToRad;
  double s1 = std::sin(dphi / 2.0);
  double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

enum class ResolveStatus { resolved, not_found, ambiguous };

struct ResolveResult {
  ResolveStatus status = ResolveStatus::not_found;
  std::string locality_id;  // set when resolved
  const char* reason() const {
    switch (status) {
      case ResolveStatus::resolved: return "resolved";
      case ResolveStatus::ambiguous: return "ambiguous_name";
      case ResolveStatus::not_found: return "not_found";
    }
    return "not_found";
  }
};

// Curated reported-name corrections, the only channel besides exact
// matching (no fuzzy matching anywhere).
class AliasTable {
public:
  void add(std::string_view alias, std::string_view country, std::string_view locality_id) {
    map_[key(alias, country)] = std::string(locality_id);
  }
  const std::string* lookup(std::string_view alias, std::string_view country) const {
    auto it = map_.find(key(alias, country));
    return it == map_.end() ? nullptr : &it->second;
  }
  size_t size() const { return map_.size(); }

private:
  static std::string key(std::string_view alias, std::string_view country) {
    return text::normalize_name(alias) + "\x1f" + text::normalize_name(country);
  }
  std::unordered_map<std::string, std::string> map_;
};

class LocalityRegistry {
public:
  void add(Locality loc) { rows_.push_back(std::move(loc)); }

  // Validates invariants and builds lookup indexes. `row_of` maps a rows_
  // index to its source row number for error messages (optional).
  void finalize(const std::vector<long>* row_of = nullptr) {
    std::sort(rows_.begin(), rows_.end(),
              [](const Locality& a, const Locality& b) { return a.id < b.id; });
    by_id_.clear();
    primary_nac_.clear();
    primary_.clear();
    alt_nac_.clear();
    alt_.clear();
    auto row_no = [&](size_t i) -> long { return row_of && i < row_of->size() ? (*row_of)[i] : -1; };
    for (size_t i = 0; i < rows_.size(); ++i) {
      const Locality& l = rows_[i];
      if (l.id.empty()) throw SchemaError("locality with empty id", row_no(i));
      if (!(l.lat >= -90.0 && l.lat <= 90.0))
        throw SchemaError("latitude out of range for '" + l.id + "'", row_no(i));
      if (!(l.lon > -180.0 && l.lon <= 180.0))
        throw SchemaError("longitude out of range for '" + l.id + "'", row_no(i));
      if (l.population && *l.population < 0)
        throw SchemaError("negative population for '" + l.id + "'", row_no(i));
      if (!by_id_.emplace(l.id, i).second)
        throw DuplicateKeyError("duplicate locality id '" + l.id + "'", -1, row_no(i));
    }
    for (size_t i = 0; i < rows_.size(); ++i) {
      const Locality& l = rows_[i];
      std::string nc = nck(l.name, l.country);
      auto [it, fresh] = primary_nac_.emplace(nack(l.name, l.admin_name, l.country), i);
      if (!fresh)
        throw DuplicateKeyError("duplicate (name, admin, country) for '" + l.name + "', '" +
                                    l.admin_name + "', '" + l.country + "'",
                                row_no(it->second), row_no(i));
      primary_[nc].push_back(i);
      for (const auto& alt : l.alt_names) {
        alt_nac_[nack(alt, l.admin_name, l.country)].push_back(i);
        alt_[nck(alt, l.country)].push_back(i);
      }
    }
  }

  size_t size() const { return rows_.size(); }
  const std::vector<Locality>& all() const { return rows_; }

  const Locality* find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &rows_[it->second];
  }

  // Deterministic exact-match resolution: alias table first, then
  // (name, admin, country), then unique (name, country), then the same
  // two steps over alt-names.
  ResolveResult resolve(const AffiliationEntry& entry, const AliasTable* aliases = nullptr) const {
    ResolveResult out;
    if (entry.locality_name.empty() || entry.country_name.empty()) {
      out.status = ResolveStatus::not_found;
      return out;
    }
    if (aliases) {
      if (const std::string* id = aliases->lookup(entry.locality_name, entry.country_name)) {
        out.status = ResolveStatus::resolved;
        out.locality_id = *id;
        return out;
      }
    }
    bool saw_ambiguous = false;
    if (!entry.admin_name.empty()) {
      auto it = primary_nac_.find(nack(entry.locality_name, entry.admin_name, entry.country_name));
      if (it != primary_nac_.end()) {
        out.status = ResolveStatus::resolved;
        out.locality_id = rows_[it->second].id;
        return out;
      }
    }
    if (auto r = lookup_unique(primary_, nck(entry.locality_name, entry.country_name),
                               saw_ambiguous)) {
      out.status = ResolveStatus::resolved;
      out.locality_id = rows_[*r].id;
      return out;
    }
    if (!entry.admin_name.empty()) {
      auto it = alt_nac_.find(nack(entry.locality_name, entry.admin_name, entry.country_name));
      if (it != alt_nac_.end() && it->second.size() == 1) {
        out.status = ResolveStatus::resolved;
        out.locality_id = rows_[it->second.front()].id;
        return out;
      }
      if (it != alt_nac_.end() && it->second.size() > 1) saw_ambiguous = true;
    }
    if (auto r = lookup_unique(alt_, nck(entry.locality_name, entry.country_name), saw_ambiguous)) {
      out.status = ResolveStatus::resolved;
      out.locality_id = rows_[*r].id;
      return out;
    }
    out.status = saw_ambiguous ? ResolveStatus::ambiguous : ResolveStatus::not_found;
    return out;
  }

private:
  static std::string nack(std::string_view name, std::string_view admin, std::string_view country) {
    return text::normalize_name(name) + "\x1f" + text::normalize_name(admin) + "\x1f" +
           text::normalize_name(country);
  }
  static std::string nck(std::string_view name, std::string_view country) {
    return text::normalize_name(name) + "\x1f" + text::normalize_name(country);
  }

  static std::optional<size_t> lookup_unique(
      const std::unordered_map<std::string, std::vector<size_t>>& index, const std::string& key,
      bool& saw_ambiguous) {
    auto it = index.find(key);
    if (it == index.end()) return std::nullopt;
    if (it->second.size() == 1) return it->second.front();
    saw_ambiguous = true;
    return std::nullopt;
  }

  std::vector<Locality> rows_;
  std::unordered_map<std::string, size_t> by_id_;
  std::unordered_map<std::string, size_t> primary_nac_;
  std::unordered_map<std::string, std::vector<size_t>> primary_;
  std::unordered_map<std::string, std::vector<size_t>> alt_nac_;
  std::unordered_map<std::string, std::vector<size_t>> alt_;
};

class InstitutionRegistry {
public:
  void add(Institution inst) { rows_.push_back(std::move(inst)); }

  void finalize(const LocalityRegistry& localities, const std::vector<long>* row_of = nullptr) {
    std::sort(rows_.begin(), rows_.end(),
              [](const Institution& a, const Institution& b) { return a.id < b.id; });
    by_id_.clear();
    by_name_.clear();
    auto row_no = [&](size_t i) -> long { return row_of && i < row_of->size() ? (*row_of)[i] : -1; };
    for (size_t i = 0; i < rows_.size(); ++i) {
      const Institution& inst = rows_[i];
      if (inst.id.empty()) throw SchemaError("institution with empty id", row_no(i));
      if (!by_id_.emplace(inst.id, i).second)
        throw DuplicateKeyError("duplicate institution id '" + inst.id + "'", -1, row_no(i));
      if (!localities.find(inst.hq_locality))
        throw DanglingReferenceError(
            "institution '" + inst.id + "' references unknown hq locality '" + inst.hq_locality + "'",
            row_no(i));
      by_name_[text::normalize_name(inst.name)].push_back(i);
      for (const auto& alt : inst.alt_names) by_name_[text::normalize_name(alt)].push_back(i);
    }
  }

  size_t size() const { return rows_.size(); }
  const std::vector<Institution>& all() const { return rows_; }

  const Institution* find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &rows_[it->second];
  }

  // Exact normalized name / alt-name match; nullptr when absent or
  // ambiguous (ambiguity reported via `ambiguous` when given).
  const Institution* match(std::string_view name, bool* ambiguous = nullptr) const {
    if (ambiguous) *ambiguous = false;
    auto it = by_name_.find(text::normalize_name(name));
    if (it == by_name_.end()) return nullptr;
    // an institution may be indexed under several of its own names
    size_t first = it->second.front();
    for (size_t idx : it->second)
      if (idx != first) {
        if (ambiguous) *ambiguous = true;
        return nullptr;
      }
    return &rows_[first];
  }

private:
  std::vector<Institution> rows_;
  std::unordered_map<std::string, size_t> by_id_;
  std::unordered_map<std::string, std::vector<size_t>> by_name_;
};

enum class Tier { MSA, CSA, custom };

inline std::string to_string(Tier t) {
  switch (t) {
    case Tier::MSA: return "MSA";
    case Tier::CSA: return "CSA";
    case Tier::custom: return "custom";
  }
  return "custom";
}

inline std::optional<Tier> tier_from_string(std::string_view s) {
  std::string v = text::to_lower(s);
  if (v == "msa") return Tier::MSA;
  if (v == "csa") return Tier::CSA;
  if (v == "custom") return Tier::custom;
  return std::nullopt;
}

// locality -> metro per tier; a locality maps to at most one metro per tier.
class MembershipTable {
public:
  void add(std::string_view locality_id, std::string_view metro_id, Tier tier, long row = -1) {
    auto& tier_map = tiers_[tier];
    auto [it, fresh] =
        tier_map.emplace(std::string(locality_id), Entry{std::string(metro_id), row});
    if (!fresh)
      throw DuplicateKeyError("locality '" + std::string(locality_id) + "' mapped twice in tier " +
                                  to_string(tier),
                              it->second.row, row);
  }

  // locality -> metro for one tier; nullptr when the tier has no entries.
  std::map<std::string, std::string> tier(Tier t) const {
    std::map<std::string, std::string> out;
    auto it = tiers_.find(t);
    if (it == tiers_.end()) return out;
    for (const auto& [loc, e] : it->second) out.emplace(loc, e.metro_id);
    return out;
  }

  bool has_tier(Tier t) const {
    auto it = tiers_.find(t);
    return it != tiers_.end() && !it->second.empty();
  }

  bool empty() const { return tiers_.empty(); }
  size_t size() const {
    size_t n = 0;
    for (const auto& [t, m] : tiers_) n += m.size();
    return n;
  }

private:
  struct Entry {
    std::string metro_id;
    long row = -1;
  };
  std::map<Tier, std::map<std::string, Entry>> tiers_;
};

struct TravelTimeEdge {
  std::string a;
  std::string b;
  double minutes = 0.0;
};

// ---------------------------------------------------------------------------
// CSV loaders. Schema violations abort with the offending row number.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split_alt_names(std::string_view joined) {
  std::vector<std::string> out;
  for (std::string_view piece : text::split(joined, '|')) {
    std::string_view t = text::trim(piece);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

inline double parse_double_field(const std::string& s, const char* what, long row) {
  char* endp = nullptr;
  double v = std::strtod(s.c_str(), &endp);
  if (endp == s.c_str() || *endp != '\0')
    throw SchemaError(std::string(what) + " is not a number: '" + s + "'", row);
  return v;
}

inline int64_t parse_int_field(const std::string& s, const char* what, long row) {
  char* endp = nullptr;
  long long v = std::strtoll(s.c_str(), &endp, 10);
  if (endp == s.c_str() || *endp != '\0')
    throw SchemaError(std::string(what) + " is not an integer: '" + s + "'", row);
  return v;
}

}  // namespace detail

// Gazetteer CSV: id,name,alt_names,admin,country,lat,lon,population,settlement_type
inline LocalityRegistry load_gazetteer(const std::string& path) {
  csv::Reader reader(path);
  LocalityRegistry registry;
  std::vector<long> rows;
  std::vector<std::string> f;
  bool first = true;
  while (reader.next(f)) {
    if (first) {
      first = false;
      if (!f.empty() && f[0] == "id") continue;  // header line
    }
    long row = reader.line_no();
    if (f.size() != 9) throw SchemaError(path + ": expected 9 columns", row);
    Locality loc;
    loc.id = f[0];
    loc.name = f[1];
    loc.alt_names = detail::split_alt_names(f[2]);
    loc.admin_name = f[3];
    loc.country = f[4];
    loc.lat = detail::parse_double_field(f[5], "lat", row);
    loc.lon = detail::parse_double_field(f[6], "lon", row);
    if (!f[7].empty()) loc.population = detail::parse_int_field(f[7], "population", row);
    auto st = settlement_type_from_string(f[8]);
    if (!st) throw SchemaError("unknown settlement_type '" + f[8] + "'", row);
    loc.settlement_type = *st;
    if (loc.name.empty()) throw SchemaError("empty name", row);
    if (loc.country.empty()) throw SchemaError("empty country", row);
    registry.add(std::move(loc));
    rows.push_back(row);
  }
  // row numbers follow the pre-sort order; re-map after sort by id
  // (finalize sorts internally, so pass row numbers keyed by sorted order)
  std::vector<std::pair<std::string, long>> id_rows;
  id_rows.reserve(registry.all().size());
  for (size_t i = 0; i < registry.all().size(); ++i)
    id_rows.emplace_back(registry.all()[i].id, rows[i]);
  std::sort(id_rows.begin(), id_rows.end());
  std::vector<long> sorted_rows;
  sorted_rows.reserve(id_rows.size());
  for (auto& [id, r] : id_rows) sorted_rows.push_back(r);
  registry.finalize(&sorted_rows);
  return registry;
}

// Membership CSV: locality_id,metro_id,tier
inline MembershipTable load_memberships(const std::string& path, const LocalityRegistry& registry) {
  csv::Reader reader(path);
  MembershipTable table;
  std::vector<std::string> f;
  bool first = true;
  while (reader.next(f)) {
    if (first) {
      first = false;
      if (!f.empty() && f[0] == "locality_id") continue;
    }
    long row = reader.line_no();
    if (f.size() != 3) throw SchemaError(path + ": expected 3 columns", row);
    if (!registry.find(f[0]))
      throw DanglingReferenceError("membership references unknown locality '" + f[0] + "'", row);
    if (f[1].empty()) throw SchemaError("empty metro_id", row);
    auto t = tier_from_string(f[2]);
    if (!t) throw SchemaError("unknown tier '" + f[2] + "'", row);
    table.add(f[0], f[1], *t, row);
  }
  return table;
}

// Institution CSV: id,name,alt_names,hq_locality_id
inline InstitutionRegistry load_institutions(const std::string& path,
                                             const LocalityRegistry& registry) {
  csv::Reader reader(path);
  InstitutionRegistry insts;
  std::vector<long> rows;
  std::vector<std::string> f;
  bool first = true;
  while (reader.next(f)) {
    if (first) {
      first = false;
      if (!f.empty() && f[0] == "id") continue;
    }
    long row = reader.line_no();
    if (f.size() != 4) throw SchemaError(path + ": expected 4 columns", row);
    Institution inst;
    inst.id = f[0];
    inst.name = f[1];
    inst.alt_names = detail::split_alt_names(f[2]);
    inst.hq_locality = f[3];
    if (inst.name.empty()) throw SchemaError("empty name", row);
    insts.add(std::move(inst));
    rows.push_back(row);
  }
  std::vector<std::pair<std::string, long>> id_rows;
  for (size_t i = 0; i < insts.all().size(); ++i) id_rows.emplace_back(insts.all()[i].id, rows[i]);
  std::sort(id_rows.begin(), id_rows.end());
  std::vector<long> sorted_rows;
  for (auto& [id, r] : id_rows) sorted_rows.push_back(r);
  insts.finalize(registry, &sorted_rows);
  return insts;
}

// Travel-time CSV: locality_a,locality_b,minutes
inline std::vector<TravelTimeEdge> load_travel_times(const std::string& path,
                                                     const LocalityRegistry& registry) {
  csv::Reader reader(path);
  std::vector<TravelTimeEdge> edges;
  std::map<std::pair<std::string, std::string>, long> seen;
  std::vector<std::string> f;
  bool first = true;
  while (reader.next(f)) {
    if (first) {
      first = false;
      if (!f.empty() && f[0] == "locality_a") continue;
    }
    long row = reader.line_no();
    if (f.size() != 3) throw SchemaError(path + ": expected 3 columns", row);
    TravelTimeEdge e;
    e.a = f[0];
    e.b = f[1];
    e.minutes = detail::parse_double_field(f[2], "minutes", row);
    if (e.a == e.b) throw SchemaError("self-loop travel edge '" + e.a + "'", row);
    if (!(e.minutes > 0)) throw SchemaError("minutes must be positive", row);
    if (!registry.find(e.a))
      throw DanglingReferenceError("travel edge references unknown locality '" + e.a + "'", row);
    if (!registry.find(e.b))
      throw DanglingReferenceError("travel edge references unknown locality '" + e.b + "'", row);
    auto key = e.a < e.b ? std::make_pair(e.a, e.b) : std::make_pair(e.b, e.a);
    auto [it, fresh] = seen.emplace(key, row);
    if (!fresh)
      throw DuplicateKeyError("duplicate travel edge (" + key.first + ", " + key.second + ")",
                              it->second, row);
    edges.push_back(std::move(e));
  }
  return edges;
}

// Alias CSV: alias,country,locality_id
inline AliasTable load_aliases(const std::string& path, const LocalityRegistry& registry) {
  csv::Reader reader(path);
  AliasTable table;
  std::vector<std::string> f;
  bool first = true;
  while (reader.next(f)) {
    if (first) {
      first = false;
      if (!f.empty() && f[0] == "alias") continue;
    }
    long row = reader.line_no();
    if (f.size() != 3) throw SchemaError(path + ": expected 3 columns", row);
    if (!registry.find(f[2]))
      throw DanglingReferenceError("alias references unknown locality '" + f[2] + "'", row);
    table.add(f[0], f[1], f[2]);
  }
  return table;
}

// Resolve every affiliation in place. Previous resolve outcomes are
// recomputed; parse-failure quarantine entries are preserved. Returns the
// number of entries that failed to resolve.
inline size_t resolve_corpus(Corpus& corpus, const LocalityRegistry& registry,
                             const AliasTable* aliases = nullptr, unsigned threads = 1) {
  struct Partial {
    std::vector<UnresolvedRef> refs;
    size_t failed = 0;
  };
  auto partial = chunked_fold<Partial>(
      corpus.records.size(), 1024, threads,
      [&](size_t begin, size_t end) {
        Partial p;
        for (size_t i = begin; i < end; ++i) {
          PublicationRecord& rec = corpus.records[i];
          for (size_t k = 0; k < rec.affiliations.size(); ++k) {
            AffiliationEntry& e = rec.affiliations[k];
            if (!e.parsed()) continue;  // already quarantined as a parse failure
            ResolveResult r = registry.resolve(e, aliases);
            if (r.status == ResolveStatus::resolved) {
              e.resolved_locality = r.locality_id;
            } else {
              e.resolved_locality.clear();
              p.refs.push_back({rec.id, static_cast<int>(k),
                                std::string("resolve: ") + r.reason()});
              ++p.failed;
            }
          }
        }
        return p;
      },
      [](Partial& acc, Partial&& next) {
        std::move(next.refs.begin(), next.refs.end(), std::back_inserter(acc.refs));
        acc.failed += next.failed;
      });

  std::vector<UnresolvedRef> kept;
  for (auto& u : corpus.unresolved)
    if (text::starts_with(u.reason, "parse:")) kept.push_back(std::move(u));
  std::move(partial.refs.begin(), partial.refs.end(), std::back_inserter(kept));
  std::sort(kept.begin(), kept.end());
  corpus.unresolved = std::move(kept);
  return partial.failed;
}

}  // namespace cityom
